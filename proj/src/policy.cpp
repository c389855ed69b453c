#include "armlab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace armlab {

ProbVector action_probs(const TabularPolicy& policy, Difficulty difficulty) {
  const auto& row = policy.logits[difficulty_index(difficulty)];
  for (double l : row) {
    if (!std::isfinite(l))
      throw std::invalid_argument("action_probs: non-finite logit");
  }
  const double m = *std::max_element(row.begin(), row.end());
  ProbVector p{};
  double z = 0.0;
  for (int f = 0; f < kFormatCount; ++f) {
    p[f] = std::exp(row[f] - m);
    z += p[f];
  }
  for (double& v : p) v /= z;
  return p;
}

SampledAction sample_format(const TabularPolicy& policy, Difficulty difficulty,
                            RngStream& rng) {
  const ProbVector p = action_probs(policy, difficulty);
  const int f = rng.categorical(p);
  return SampledAction{static_cast<ReasoningFormat>(f), std::log(p[f])};
}

double kl_categorical(const ProbVector& p, const ProbVector& q) {
  double kl = 0.0;
  for (int i = 0; i < kFormatCount; ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw std::invalid_argument("kl_categorical: q has zero mass where p > 0");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

SurrogateResult surrogate_loss_and_grad(const TabularPolicy& policy,
                                        const TabularPolicy& old_policy,
                                        const TabularPolicy& ref_policy,
                                        const std::vector<RolloutGroup>& groups,
                                        const std::vector<double>& advantages,
                                        const SurrogateConfig& cfg) {
  size_t total_rollouts = 0;
  for (const auto& g : groups) total_rollouts += g.rollouts.size();
  if (total_rollouts != advantages.size())
    throw std::invalid_argument(
        "surrogate_loss_and_grad: advantage count != rollout count");
  if (groups.empty())
    throw std::invalid_argument("surrogate_loss_and_grad: empty batch");

  const double eps = cfg.clip_epsilon;
  const double lo = 1.0 - eps, hi = 1.0 + eps;
  const size_t n_groups = groups.size();

  std::array<ProbVector, kDifficultyCount> p_cur, p_old;
  std::set<int> difficulties;
  for (const auto& g : groups) difficulties.insert(difficulty_index(g.difficulty));
  for (int d : difficulties) {
    p_cur[d] = action_probs(policy, static_cast<Difficulty>(d));
    p_old[d] = action_probs(old_policy, static_cast<Difficulty>(d));
  }

  SurrogateResult res;
  double objective = 0.0;
  size_t adv_idx = 0;
  for (const auto& g : groups) {
    const int d = difficulty_index(g.difficulty);
    const double group_w = 1.0 / (static_cast<double>(n_groups) * g.rollouts.size());
    for (const auto& r : g.rollouts) {
      const double a = advantages[adv_idx++];
      const int f = format_index(r.format);
      if (p_old[d][f] == 0.0)
        throw std::invalid_argument(
            "surrogate_loss_and_grad: taken action has zero old-policy probability");
      const double ratio = p_cur[d][f] / p_old[d][f];
      const double unclipped = ratio * a;
      const double clipped = std::clamp(ratio, lo, hi) * a;
      objective += group_w * std::min(unclipped, clipped);

      // Derivative of min(ratio*A, clip(ratio)*A) w.r.t. ratio.
      double dterm;
      if (unclipped <= clipped) {
        dterm = a;
      } else {
        dterm = (ratio > lo && ratio < hi) ? a : 0.0;
      }
      // d ratio / d logits[d][f'] = ratio * (1{f'=f} - p_cur[d][f']).
      const double s = group_w * dterm * ratio;
      for (int fp = 0; fp < kFormatCount; ++fp) {
        const double indicator = (fp == f) ? 1.0 : 0.0;
        res.grad[d][fp] -= s * (indicator - p_cur[d][fp]);  // loss = -objective
      }
    }
  }

  // KL penalty, averaged over the difficulties present in the batch.
  const double dcount = static_cast<double>(difficulties.size());
  for (int d : difficulties) {
    const ProbVector p_ref = action_probs(ref_policy, static_cast<Difficulty>(d));
    const double kl = kl_categorical(p_cur[d], p_ref);
    objective -= cfg.kl_coefficient / dcount * kl;
    // d KL / d logits[d][f] = p[f] * (log(p[f]/q[f]) - KL).
    for (int f = 0; f < kFormatCount; ++f) {
      const double g =
          p_cur[d][f] * (std::log(p_cur[d][f] / p_ref[f]) - kl);
      res.grad[d][f] += cfg.kl_coefficient / dcount * g;
    }
  }

  res.loss = -objective;
  return res;
}

TabularPolicy apply_update(const TabularPolicy& policy, const Logits34& grad,
                           double learning_rate) {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("apply_update: learning_rate must be positive");
  TabularPolicy next = policy;
  for (int d = 0; d < kDifficultyCount; ++d) {
    for (int f = 0; f < kFormatCount; ++f) {
      if (!std::isfinite(grad[d][f]))
        throw std::invalid_argument("apply_update: non-finite gradient");
      next.logits[d][f] -= learning_rate * grad[d][f];
    }
  }
  return next;
}

namespace {
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << "arm_lab_checkpoint v1\n";
  out << "step " << ckpt.step << "\n";
  out << "total_steps " << ckpt.total_steps << "\n";
  for (auto d : kAllDifficulties) {
    out << "logits " << difficulty_name(d);
    for (double v : ckpt.policy.logits[difficulty_index(d)]) out << ' ' << fmt17(v);
    out << "\n";
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "arm_lab_checkpoint v1")
    throw std::runtime_error("checkpoint: bad header");
  Checkpoint c;
  std::string key;
  in >> key >> c.step;
  if (key != "step" || !in) throw std::runtime_error("checkpoint: bad step line");
  in >> key >> c.total_steps;
  if (key != "total_steps" || !in)
    throw std::runtime_error("checkpoint: bad total_steps line");
  for (auto d : kAllDifficulties) {
    std::string name;
    in >> key >> name;
    if (key != "logits" || name != difficulty_name(d) || !in)
      throw std::runtime_error("checkpoint: bad logits row");
    for (int f = 0; f < kFormatCount; ++f) {
      if (!(in >> c.policy.logits[difficulty_index(d)][f]))
        throw std::runtime_error("checkpoint: bad logit value");
    }
  }
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  write_checkpoint(out, ckpt);
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace armlab
