#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "armlab/env.hpp"
#include "armlab/policy.hpp"
#include "armlab/shaping.hpp"

namespace armlab {

struct TrainConfig {
  ShapingMode mode = ShapingMode::AdaGrpo;
  int group_size = 8;            // G
  int64_t total_steps = 300;     // T: optimizer steps; shaping t runs 1..T
  int tasks_per_step = 64;
  int minibatches_per_step = 4;  // must divide tasks_per_step
  double learning_rate = 0.2;
  double clip_epsilon = 0.2;
  double kl_coefficient = 1e-3;
  bool decay_enabled = true;
  int64_t checkpoint_interval = 25;
  EnvConfig env = default_config();
  uint64_t seed = 17;
};

void validate(const TrainConfig& config);

// Per-step, per-difficulty training telemetry. Difficulties that drew no
// tasks in a step report the sampling policy's action probabilities as their
// format distribution and zero reward/tokens.
struct StepMetrics {
  int64_t step = 0;
  std::array<double, kDifficultyCount> mean_reward{};
  std::array<std::array<double, kFormatCount>, kDifficultyCount> format_distribution{};
  std::array<double, kDifficultyCount> mean_tokens{};
  std::array<int64_t, kDifficultyCount> rollout_count{};
  int64_t cumulative_rollout_tokens = 0;
  double wall_time_seconds = 0.0;  // recorded, never written to CSV
};

struct TrainResult {
  TabularPolicy final_policy;
  std::vector<StepMetrics> metrics;
  std::vector<Checkpoint> checkpoints;  // every checkpoint_interval steps + final
};

TrainResult train(const TrainConfig& config);

// CSV schema: step,difficulty,mean_reward,frac_direct,frac_short,frac_code,
// frac_long,mean_tokens,cum_tokens — one row per (step, difficulty).
void write_metrics_csv(std::ostream& out, const std::vector<StepMetrics>& metrics);

struct ComparisonReport {
  double final_mean_reward_a = 0.0;
  double final_mean_reward_b = 0.0;
  double final_mean_reward_diff = 0.0;   // a - b
  double response_length_ratio = 0.0;    // mean tokens/rollout, final window, a/b
  double cumulative_token_ratio = 0.0;   // cum tokens at T, a/b
  TrainResult run_a;
  TrainResult run_b;
};

// Runs both configs (which must share env and seed) and reports the headline
// ratios. "Final" quantities average the last max(1, T/10) steps; the final
// reward averages the last max(1, T/30) steps.
ComparisonReport compare_runs(const TrainConfig& config_a, const TrainConfig& config_b);

struct AblationReport {
  std::vector<int64_t> eval_steps;
  std::vector<double> eval_reward_decay;
  std::vector<double> eval_reward_no_decay;
  double variance_decay = 0.0;     // over the second half of eval points
  double variance_no_decay = 0.0;
  bool degenerate_sample = false;  // fewer than 2 points in the second half
};

// Decay on/off with a shared seed; checkpoint policies are evaluated by
// sampled adaptive rollouts on a held-out task stream.
AblationReport ablate_decay(const TrainConfig& base_config, int eval_tasks,
                            uint64_t eval_seed, int64_t eval_interval);

}  // namespace armlab
