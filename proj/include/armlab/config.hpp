#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "armlab/trainer.hpp"

namespace armlab {

struct EvalConfig {
  int n_tasks = 2000;
  uint64_t eval_seed = 1234;
  int64_t eval_interval = 25;
};

struct ExperimentConfig {
  TrainConfig train;
  EvalConfig eval;
  std::string output_dir = "out";
  bool emit_charts = true;
};

// Carries the line number and key of the offending config entry.
struct ConfigError : std::runtime_error {
  int line;
  std::string key;
  ConfigError(const std::string& msg, int line_, std::string key_)
      : std::runtime_error(msg), line(line_), key(std::move(key_)) {}
};

// Hierarchical key-value text: `section.key = value` lines, `#` comments,
// space-separated vectors. Unknown keys and malformed values raise
// ConfigError with a line/field diagnostic.
ExperimentConfig parse_experiment_config(const std::string& text);

ExperimentConfig load_experiment_config(const std::string& path);

// Default config rendered in the same format (the `init` starting point).
std::string default_config_text();

}  // namespace armlab
