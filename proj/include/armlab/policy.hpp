#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "armlab/format.hpp"
#include "armlab/rng.hpp"
#include "armlab/shaping.hpp"

namespace armlab {

using Logits34 = std::array<std::array<double, kFormatCount>, kDifficultyCount>;
using ProbVector = std::array<double, kFormatCount>;

// Softmax policy over formats, one logit row per difficulty.
struct TabularPolicy {
  Logits34 logits{};  // zero-initialized: uniform over formats
};

struct SurrogateConfig {
  double clip_epsilon = 0.2;    // paper does not state epsilon; common default
  double kl_coefficient = 1e-3;
};

// Max-subtracted softmax of the difficulty's logit row.
ProbVector action_probs(const TabularPolicy& policy, Difficulty difficulty);

struct SampledAction {
  ReasoningFormat format;
  double logprob;
};

SampledAction sample_format(const TabularPolicy& policy, Difficulty difficulty,
                            RngStream& rng);

// Exact categorical KL(p || q) with 0*log(0/q) = 0; throws on p>0 where q=0.
double kl_categorical(const ProbVector& p, const ProbVector& q);

struct SurrogateResult {
  double loss = 0.0;   // negated objective
  Logits34 grad{};     // d loss / d logits
};

// Negated clipped-surrogate objective over the batch: mean over groups of
// mean over rollouts of min(ratio*A, clip(ratio)*A), minus the KL penalty
// averaged over the difficulties present. `advantages` is flat, aligned with
// the concatenation of group rollouts.
SurrogateResult surrogate_loss_and_grad(const TabularPolicy& policy,
                                        const TabularPolicy& old_policy,
                                        const TabularPolicy& ref_policy,
                                        const std::vector<RolloutGroup>& groups,
                                        const std::vector<double>& advantages,
                                        const SurrogateConfig& cfg);

// Gradient-descent step on the loss: logits -= learning_rate * grad.
TabularPolicy apply_update(const TabularPolicy& policy, const Logits34& grad,
                           double learning_rate = 0.1);

// Checkpoint text format: flat record of the 12 logits plus step metadata,
// %.17g so doubles round-trip bit-exactly.
struct Checkpoint {
  int64_t step = 0;
  int64_t total_steps = 0;
  TabularPolicy policy;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace armlab
