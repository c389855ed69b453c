#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace armlab {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;  // config/input errors

struct CliOptions {
  std::string config_path;
  std::string checkpoint_path;           // modes
  std::optional<std::string> out_dir;    // --out; ARM_LAB_OUT wins over both
  std::optional<uint64_t> seed_override; // --seed
  bool no_charts = false;                // --no-charts
  std::string corpus_path;               // replay
  std::string truth_path;                // replay
};

int cmd_train(const CliOptions& opts);
int cmd_compare(const CliOptions& opts);
int cmd_ablate(const CliOptions& opts);
int cmd_modes(const CliOptions& opts);
int cmd_replay(const CliOptions& opts);

}  // namespace armlab
