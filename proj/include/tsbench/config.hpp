#pragma once

#include <filesystem>
#include <string>

#include "tsbench/experiment.hpp"

namespace tsbench {

/// Thrown when a config file cannot be read or parsed.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sweep configuration from YAML. Recognized keys (lists accept a scalar):
///
///   d, M, sigma          teacher grid
///   depth, scheme        student depth(s) and width scheme(s): same, 4M, tune, best
///   epsilon              error targets
///   epsilon_overrides    list of {d, M, epsilon} replacing the targets per teacher
///   trials, n0, n_cap    trials per cell, first N, largest N
///   n_list               fixed sample sizes (disables doubling)
///   seed, parallelism, out, n_mc, max_epochs, batch_size
///
/// Unknown keys are rejected.
SweepConfig parse_sweep_config(const std::string& yaml_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

}  // namespace tsbench
