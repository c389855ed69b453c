#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "armlab/format.hpp"

namespace armlab {

// One sampled output: what the policy chose, how it scored, what it cost.
struct Rollout {
  ReasoningFormat format = ReasoningFormat::DirectAnswer;
  int reward = 0;            // binary, Eq.-1 grade
  int64_t token_count = 0;
  double logprob_old = 0.0;  // log-prob of the action under the sampling policy
  std::string answer;
};

// G rollouts for one task; the unit over which shaping and advantages operate.
struct RolloutGroup {
  std::vector<Rollout> rollouts;
  uint64_t task_id = 0;
  Difficulty difficulty = Difficulty::Easy;
};

// Training-progress state (t, T) parameterizing the diversity anneal.
struct ShapingSchedule {
  int64_t t = 0;
  int64_t T = 1;

  ShapingSchedule(int64_t t_, int64_t T_) : t(t_), T(T_) {
    if (T < 1) throw std::invalid_argument("ShapingSchedule: T must be >= 1");
    if (t < 0 || t > T)
      throw std::invalid_argument("ShapingSchedule: t must be in [0, T]");
  }
};

enum class ShapingMode { AdaGrpo, Grpo };

using FormatCounts = std::array<int, kFormatCount>;

// How often each format appears in the group; counts sum to G.
FormatCounts format_counts(const RolloutGroup& group);

// decay(t) = F/G + 0.5*(1 - F/G)*(1 + cos(pi*t/T)): 1 at t=0, F/G at t=T,
// nonincreasing in between.
double decay_factor(int format_count, int group_size, const ShapingSchedule& sched);

// alpha(t) = (G/F) * decay(t): G/F at t=0, 1 at t=T; identically 1 when F=G.
double diversity_scale(int format_count, int group_size, const ShapingSchedule& sched);

// r'_i: alpha_i(t)*r_i in AdaGrpo mode, r_i unchanged in Grpo mode.
std::vector<double> shape_rewards(const RolloutGroup& group,
                                  const ShapingSchedule& sched, ShapingMode mode);

// Variant used by the decay ablation: decay_i(t) replaced by the constant 1,
// so alpha = G/F for the whole run.
std::vector<double> shape_rewards(const RolloutGroup& group,
                                  const ShapingSchedule& sched, ShapingMode mode,
                                  bool decay_enabled);

// Within-group standardization (population std). All-equal groups get exactly
// zero advantages rather than a division by a vanishing std.
std::vector<double> group_advantages(const std::vector<double>& shaped);

inline constexpr double kStdEpsilon = 1e-8;

}  // namespace armlab
