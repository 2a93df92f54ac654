#pragma once

// Flat key = value configuration files.
//
//   # comment
//   epochs = 100
//   tws_values = 9, 15, 21
//
// Blank lines and text after '#' are ignored. Every key maps to one field of
// TrainConfig, SceneConfig or ExperimentGrid; see config_keys() for the list.
// `classes` sets both the scene class count and the model's C. `seed` is the
// base seed of training runs and grids; the scene has its own `scene_seed`.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rrfnn/experiment.hpp"
#include "rrfnn/synth.hpp"

namespace rrfnn {

struct Settings {
    SceneConfig scene;
    ExperimentGrid grid;
};

struct ConfigKey {
    std::string name;
    std::string help;
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key from its textual value. Throws InvalidArgument for an unknown
/// key (listing the valid ones) or a malformed value.
void set_config_value(Settings& settings, std::string_view key, std::string_view value);
std::string get_config_value(const Settings& settings, std::string_view key);

/// Applies every assignment in `text`; errors name `source` and the line.
void apply_config_text(Settings& settings, std::string_view text, std::string_view source = "<config>");
/// Throws IoError if the file cannot be read.
void apply_config_file(Settings& settings, const std::filesystem::path& path);

/// Every key with its current value, in config_keys() order; parses back to
/// the same settings.
std::string to_config_text(const Settings& settings);

}  // namespace rrfnn
