// Experiment config files: line-oriented `key = value`, `[section]` headers,
// `#` comments.
//
//   [run]        horizon trials base_seed steady_window divergence_threshold
//                denoise_algorithm
//   [network]    topology (geometric|ring|edge_list) nodes radius half_width
//                seed edge_list weights (uniform|non_cooperative)
//   [system]     order coefficients
//   [source]     kind (gaussian|delay_line) variances variance_min
//                variance_max variance_seed samples synthetic_length
//                scale_exponent
//   [noise]      snr_db variance
//   [algorithms] mu gamma
//   [algorithm <label>]  ordering (atc|cta) leaky mu gamma
//
// Keys above the first header are looked up among the fixed sections by
// name. Any [algorithm <label>] section replaces the default four-algorithm
// list. Lists are comma separated. Relative paths resolve against the
// config file's directory.
#pragma once

#include "dlms/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace dlms {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  ConfigError(const std::string& what, int line)
      : std::runtime_error("config line " + std::to_string(line) + ": " + what) {}

  /// Offending key, empty for syntax errors.
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

/// Throws std::runtime_error if the file cannot be read, ConfigError if it
/// does not parse or validate.
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Throws ConfigError naming the first key whose value is out of range.
void validate(const ExperimentConfig& cfg);

/// Text that parse_config reads back into an equal config.
std::string emit_config(const ExperimentConfig& cfg);

}  // namespace dlms
