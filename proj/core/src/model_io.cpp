#include "rrfnn/model_io.hpp"

#include <cmath>

#include "rrfnn/byte_io.hpp"
#include "rrfnn/errors.hpp"

namespace rrfnn {

namespace {

constexpr std::string_view kRankRMagic = "RRFNN1";
constexpr std::string_view kDenseMagic = "DNFNN1";

template <class Model>
void write_model(const Model& model, std::string_view magic, std::uint32_t rank,
                 const std::filesystem::path& path) {
    const NetworkShape& s = model.shape();
    byte_io::Writer w;
    w.bytes(magic);
    w.put(static_cast<std::uint32_t>(s.hidden));
    w.put(rank);
    w.put(static_cast<std::uint32_t>(s.classes));
    w.put(static_cast<std::uint32_t>(s.side));
    w.put(static_cast<std::uint32_t>(s.bands));
    w.put(static_cast<std::uint32_t>(s.activation));
    w.put(static_cast<std::uint32_t>(s.use_bias ? 1 : 0));
    for (double v : model.parameters()) w.put(v);
    w.save(path);
}

template <class Model>
Model read_parameters(byte_io::Reader& r, const NetworkShape& shape) {
    Model model(shape);
    r.expect_payload(model.parameter_count() * sizeof(double));
    for (double& v : model.parameters()) {
        const std::size_t at = r.offset();
        v = r.get<double>("parameter");
        if (!std::isfinite(v)) throw FormatError("non-finite parameter", at);
    }
    return model;
}

}  // namespace

void save_model(const RankRFNN& model, const std::filesystem::path& path) {
    write_model(model, kRankRMagic, static_cast<std::uint32_t>(model.shape().rank), path);
}

void save_model(const DenseFNN& model, const std::filesystem::path& path) {
    write_model(model, kDenseMagic, 0, path);
}

AnyModel load_model(const std::filesystem::path& path) {
    auto r = byte_io::Reader::open(path);
    bool rank_r = true;
    if (!r.match_magic(kRankRMagic)) {
        if (!r.match_magic(kDenseMagic)) {
            throw FormatError("not a model file: expected magic 'RRFNN1' or 'DNFNN1'", 0);
        }
        rank_r = false;
    }
    NetworkShape shape;
    shape.hidden = r.get<std::uint32_t>("hidden count");
    shape.rank = r.get<std::uint32_t>("rank");
    shape.classes = r.get<std::uint32_t>("class count");
    shape.side = r.get<std::uint32_t>("patch side");
    shape.bands = r.get<std::uint32_t>("band count");
    const std::size_t activation_at = r.offset();
    const auto activation = r.get<std::uint32_t>("activation id");
    if (activation > 2) throw FormatError("unknown activation id " + std::to_string(activation), activation_at);
    shape.activation = static_cast<Activation>(activation);
    const std::size_t bias_at = r.offset();
    const auto bias = r.get<std::uint32_t>("bias flag");
    if (bias > 1) throw FormatError("bias flag must be 0 or 1", bias_at);
    shape.use_bias = bias == 1;

    try {
        shape.validate(rank_r);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("invalid model header: ") + e.what(), r.offset());
    }
    if (rank_r) return read_parameters<RankRFNN>(r, shape);
    shape.rank = 0;
    return read_parameters<DenseFNN>(r, shape);
}

}  // namespace rrfnn
