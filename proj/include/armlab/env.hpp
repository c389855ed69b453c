#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "armlab/format.hpp"
#include "armlab/rng.hpp"
#include "armlab/shaping.hpp"
#include "armlab/transcript.hpp"

namespace armlab {

using Matrix34 = std::array<std::array<double, kFormatCount>, kDifficultyCount>;

// Synthetic task distribution: per-(difficulty, format) correctness
// probabilities and token costs, plus a difficulty mixture.
struct EnvConfig {
  Matrix34 accuracy{};
  Matrix34 token_mean{};
  double token_jitter = 0.1;  // fraction of token_mean, uniform jitter
  std::array<double, kDifficultyCount> difficulty_mix{};
  int answer_space = 26;  // size of the answer alphabet per task
  uint64_t seed = 0;
};

struct TaskInstance {
  uint64_t task_id = 0;
  Difficulty difficulty = Difficulty::Easy;
  std::string ground_truth;
};

// Shipped defaults: accuracy and token costs per difficulty row, five-way
// difficulty-agnostic numbers otherwise.
EnvConfig default_config();

// Throws std::invalid_argument when probabilities, mixture, token means, or
// the alphabet size are out of range.
void validate(const EnvConfig& config);

// Spreadsheet-style symbol for alphabet index i: A..Z, AA, AB, ...
std::string answer_symbol(int index);
int answer_symbol_index(std::string_view symbol);

GradeSpec grade_spec_for(const TaskInstance& task);

TaskInstance sample_task(const EnvConfig& config, RngStream& rng);

// One environment response in the given format: correct with probability
// accuracy[d][f] (else a uniform wrong symbol), token count uniform in
// token_mean*(1 +/- jitter). logprob_old is left for the caller to fill.
Rollout rollout_once(const TaskInstance& task, ReasoningFormat format,
                     const EnvConfig& config, RngStream& rng);

inline constexpr int kOracleMaxGroupSize = 8;

// Exact expectation of the group-mean shaped reward under the given format
// policy, by enumeration of all (format, correct)^G outcome tuples weighted
// by their probabilities. No sampling; G <= 8 enforced (8^G leaves).
double expected_shaped_reward_oracle(const EnvConfig& config,
                                     const std::array<double, kFormatCount>& policy_probs,
                                     Difficulty difficulty, int group_size,
                                     const ShapingSchedule& sched, ShapingMode mode);

}  // namespace armlab
