#include "rrfnn/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

#include "rrfnn/errors.hpp"

namespace rrfnn {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw InvalidArgument("bad value '" + std::string(text) + "' for key " + std::string(key));
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw InvalidArgument("bad value '" + std::string(text) + "' for key " + std::string(key) +
                          " (expected true or false)");
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> items;
    while (true) {
        const auto comma = text.find(',');
        items.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return items;
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view text) {
    std::vector<std::size_t> out;
    for (auto item : split_list(text)) out.push_back(parse_number<std::size_t>(key, item));
    return out;
}

std::string show(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string show(bool v) { return v ? "true" : "false"; }

template <class T>
    requires std::is_unsigned_v<T>
std::string show(T v) {
    return std::to_string(v);
}

std::string show_list(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t n = 0; n < values.size(); ++n) out += (n ? ", " : "") + std::to_string(values[n]);
    return out;
}

struct Entry {
    ConfigKey key;
    std::function<void(Settings&, std::string_view)> set;
    std::function<std::string(const Settings&)> get;
};

#define RRFNN_NUMBER(name, help, type, field)                                                  \
    Entry {                                                                                     \
        {name, help}, [](Settings& s, std::string_view v) { field = parse_number<type>(name, v); }, \
            [](const Settings& s) { return show(field); }                                       \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        // TrainConfig
        RRFNN_NUMBER("epochs", "training epochs", std::size_t, s.grid.train.epochs),
        RRFNN_NUMBER("batch_size", "mini-batch size", std::size_t, s.grid.train.batch_size),
        RRFNN_NUMBER("learning_rate", "Adam step size", double, s.grid.train.adam.learning_rate),
        RRFNN_NUMBER("beta1", "Adam first-moment decay", double, s.grid.train.adam.beta1),
        RRFNN_NUMBER("beta2", "Adam second-moment decay", double, s.grid.train.adam.beta2),
        RRFNN_NUMBER("epsilon", "Adam denominator offset", double, s.grid.train.adam.epsilon),
        Entry{{"shuffle_each_epoch", "reshuffle training samples every epoch"},
              [](Settings& s, std::string_view v) { s.grid.train.shuffle_each_epoch = parse_bool("shuffle_each_epoch", v); },
              [](const Settings& s) { return show(s.grid.train.shuffle_each_epoch); }},
        // SceneConfig
        RRFNN_NUMBER("height", "scene rows", std::size_t, s.scene.height),
        RRFNN_NUMBER("width", "scene columns", std::size_t, s.scene.width),
        RRFNN_NUMBER("bands", "scene spectral bands", std::size_t, s.scene.bands),
        Entry{{"classes", "class count C (scene and model)"},
              [](Settings& s, std::string_view v) {
                  s.scene.classes = parse_number<std::size_t>("classes", v);
                  s.grid.model.classes = s.scene.classes;
              },
              [](const Settings& s) { return show(s.grid.model.classes); }},
        RRFNN_NUMBER("region_granularity", "expected region diameter in pixels", double, s.scene.region_granularity),
        RRFNN_NUMBER("signature_separation", "inter-class spectral distance scale", double,
                     s.scene.signature_separation),
        RRFNN_NUMBER("noise_std", "per-band additive noise std", double, s.scene.noise_std),
        RRFNN_NUMBER("brightness_jitter", "per-pixel lognormal brightness sigma", double, s.scene.brightness_jitter),
        RRFNN_NUMBER("spatial_blur", "box blur radius, 0 disables", std::size_t, s.scene.spatial_blur),
        RRFNN_NUMBER("majority_class", "class with the larger prior", std::size_t, s.scene.majority_class),
        RRFNN_NUMBER("majority_weight", "prior weight of the majority class", double, s.scene.majority_weight),
        RRFNN_NUMBER("scene_seed", "scene generator seed", std::uint64_t, s.scene.seed),
        // ExperimentGrid
        Entry{{"tws_values", "comma-separated patch sides (odd)"},
              [](Settings& s, std::string_view v) { s.grid.tws_values = parse_sizes("tws_values", v); },
              [](const Settings& s) { return show_list(s.grid.tws_values); }},
        Entry{{"ts_values", "comma-separated training samples per class"},
              [](Settings& s, std::string_view v) { s.grid.ts_values = parse_sizes("ts_values", v); },
              [](const Settings& s) { return show_list(s.grid.ts_values); }},
        RRFNN_NUMBER("repeats", "hold-out repeats per cell", std::size_t, s.grid.repeats),
        Entry{{"variants", "comma-separated subset of rank_r_fnn, dense_fnn"},
              [](Settings& s, std::string_view v) {
                  std::vector<Variant> out;
                  for (auto item : split_list(v)) out.push_back(parse_variant(item));
                  s.grid.variants = out;
              },
              [](const Settings& s) {
                  std::string out;
                  for (std::size_t n = 0; n < s.grid.variants.size(); ++n) {
                      out += (n ? ", " : "") + std::string(to_string(s.grid.variants[n]));
                  }
                  return out;
              }},
        RRFNN_NUMBER("hidden", "hidden neurons Q", std::size_t, s.grid.model.hidden),
        RRFNN_NUMBER("rank", "CP rank R", std::size_t, s.grid.model.rank),
        Entry{{"activation", "sigmoid, relu or tanh"},
              [](Settings& s, std::string_view v) { s.grid.model.activation = parse_activation(trim(v)); },
              [](const Settings& s) { return std::string(to_string(s.grid.model.activation)); }},
        Entry{{"use_bias", "add hidden and output biases"},
              [](Settings& s, std::string_view v) { s.grid.model.use_bias = parse_bool("use_bias", v); },
              [](const Settings& s) { return show(s.grid.model.use_bias); }},
        RRFNN_NUMBER("init_scale", "multiplier on every initialization bound", double, s.grid.init_scale),
        RRFNN_NUMBER("confidence", "confidence level of reported intervals", double, s.grid.confidence),
        Entry{{"seed", "base seed of splits, initialization and shuffling"},
              [](Settings& s, std::string_view v) {
                  s.grid.base_seed = parse_number<std::uint64_t>("seed", v);
                  s.grid.train.seed = s.grid.base_seed;
              },
              [](const Settings& s) { return show(s.grid.base_seed); }},
    };
    return table;
}

#undef RRFNN_NUMBER

const Entry& find_entry(std::string_view key) {
    for (const Entry& e : entries()) {
        if (e.key.name == key) return e;
    }
    std::string valid;
    for (const Entry& e : entries()) valid += (valid.empty() ? "" : ", ") + e.key.name;
    throw InvalidArgument("unknown config key '" + std::string(key) + "'; valid keys: " + valid);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const Entry& e : entries()) out.push_back(e.key);
        return out;
    }();
    return keys;
}

void set_config_value(Settings& settings, std::string_view key, std::string_view value) {
    find_entry(trim(key)).set(settings, value);
}

std::string get_config_value(const Settings& settings, std::string_view key) {
    return find_entry(trim(key)).get(settings);
}

void apply_config_text(Settings& settings, std::string_view text, std::string_view source) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw InvalidArgument(where + "expected key = value");
        try {
            set_config_value(settings, line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(where + e.what());
        }
    }
}

void apply_config_file(Settings& settings, const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open config file " + path.string());
    std::ostringstream text;
    text << file.rdbuf();
    apply_config_text(settings, text.str(), path.string());
}

std::string to_config_text(const Settings& settings) {
    std::string out;
    for (const Entry& e : entries()) out += e.key.name + " = " + e.get(settings) + "\n";
    return out;
}

}  // namespace rrfnn
