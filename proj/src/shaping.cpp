#include "armlab/shaping.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace armlab {

FormatCounts format_counts(const RolloutGroup& group) {
  FormatCounts counts{};
  for (const auto& r : group.rollouts) ++counts[format_index(r.format)];
  return counts;
}

double decay_factor(int format_count, int group_size, const ShapingSchedule& sched) {
  if (format_count < 1 || format_count > group_size)
    throw std::invalid_argument("decay_factor: need 1 <= F <= G");
  const double f = static_cast<double>(format_count) / group_size;
  const double progress = static_cast<double>(sched.t) / static_cast<double>(sched.T);
  return f + 0.5 * (1.0 - f) * (1.0 + std::cos(std::numbers::pi * progress));
}

double diversity_scale(int format_count, int group_size, const ShapingSchedule& sched) {
  const double decay = decay_factor(format_count, group_size, sched);
  return (static_cast<double>(group_size) / format_count) * decay;
}

std::vector<double> shape_rewards(const RolloutGroup& group,
                                  const ShapingSchedule& sched, ShapingMode mode) {
  return shape_rewards(group, sched, mode, /*decay_enabled=*/true);
}

std::vector<double> shape_rewards(const RolloutGroup& group,
                                  const ShapingSchedule& sched, ShapingMode mode,
                                  bool decay_enabled) {
  std::vector<double> shaped;
  shaped.reserve(group.rollouts.size());
  if (mode == ShapingMode::Grpo) {
    for (const auto& r : group.rollouts) shaped.push_back(static_cast<double>(r.reward));
    return shaped;
  }
  const int group_size = static_cast<int>(group.rollouts.size());
  const FormatCounts counts = format_counts(group);
  for (const auto& r : group.rollouts) {
    const int f_count = counts[format_index(r.format)];
    const double alpha =
        decay_enabled ? diversity_scale(f_count, group_size, sched)
                      : static_cast<double>(group_size) / f_count;
    shaped.push_back(alpha * r.reward);
  }
  return shaped;
}

std::vector<double> group_advantages(const std::vector<double>& shaped) {
  const size_t n = shaped.size();
  if (n < 2)
    throw std::invalid_argument("group_advantages: need at least 2 rewards");

  double mean = 0.0;
  for (double v : shaped) mean += v;
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (double v : shaped) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);  // population std
  const double std_dev = std::sqrt(var);

  std::vector<double> adv(n, 0.0);
  if (std_dev <= kStdEpsilon) return adv;
  for (size_t i = 0; i < n; ++i) adv[i] = (shaped[i] - mean) / std_dev;
  return adv;
}

}  // namespace armlab
