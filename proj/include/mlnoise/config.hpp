#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mlnoise/experiment.hpp"

namespace mlnoise {

// Key/value experiment config with [section] headers, `#`/`;` comments, and
// line-precise error messages. Sections: dataset, noise, selection,
// estimation, training, output.
ExperimentConfig parse_experiment_config(const std::filesystem::path& file);
ExperimentConfig parse_experiment_config_text(const std::string& text,
                                              const std::string& origin = "<string>");

// Applies one `section.key=value` override on top of a parsed config.
void apply_override(ExperimentConfig& config, const std::string& assignment);

// The config rendered back out (used to echo effective settings).
std::string render_config(const ExperimentConfig& config);

}  // namespace mlnoise
