#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "armlab/env.hpp"
#include "armlab/policy.hpp"

namespace armlab {

// Pluggable answer provider; defaults to the synthetic env's rollout_once.
using AnswerProvider =
    std::function<Rollout(const TaskInstance&, ReasoningFormat, RngStream&)>;

AnswerProvider env_answer_provider(const EnvConfig& config);

struct ModeResult {
  std::string answer;
  int reward = 0;
  int64_t total_tokens = 0;  // sum over all rollouts performed for the request
  std::vector<ReasoningFormat> formats_used;
  bool long_cot_invoked = false;
};

// Policy picks the format (sampled by default, argmax when greedy).
ModeResult run_adaptive(const TaskInstance& task, const TabularPolicy& policy,
                        const AnswerProvider& provider, RngStream& rng,
                        bool greedy = false);

// Externally forced format.
ModeResult run_instruction_guided(const TaskInstance& task, ReasoningFormat format,
                                  const AnswerProvider& provider, RngStream& rng);

// Direct/Short/Code first; adopt their answer if all three agree (under grade
// normalization), otherwise fall back to one LongCoT rollout. Token totals
// always include every rollout performed.
ModeResult run_consensus(const TaskInstance& task, const AnswerProvider& provider,
                         RngStream& rng);

enum class InferenceMode {
  Adaptive,
  InstructionDirect,
  InstructionShortCoT,
  InstructionCode,
  InstructionLongCoT,
  Consensus,
};

std::string_view mode_name(InferenceMode mode);

struct ModeStats {
  double accuracy = 0.0;
  double mean_tokens = 0.0;
  double long_cot_usage = 0.0;  // fraction of requests that invoked LongCoT
};

using ModeReport = std::array<ModeStats, kDifficultyCount>;

// Aggregates ModeResults over n_tasks tasks per difficulty.
ModeReport mode_report(InferenceMode mode, int n_tasks, const EnvConfig& env,
                       const TabularPolicy& policy, uint64_t seed);

// CSV mirroring the usage table: one row per (mode, difficulty) for the six
// modes, plus a long_cot_usage row per difficulty echoing the consensus
// arm's usage column.
void write_modes_csv(std::ostream& out, int n_tasks, const EnvConfig& env,
                     const TabularPolicy& policy, uint64_t seed);

}  // namespace armlab
