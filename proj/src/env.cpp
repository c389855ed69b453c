#include "armlab/env.hpp"

#include <cmath>
#include <stdexcept>

namespace armlab {

EnvConfig default_config() {
  EnvConfig c;
  // Rows: easy, medium, hard. Columns: direct, short_cot, code, long_cot.
  c.accuracy = {{{0.83, 0.79, 0.83, 0.86},
                 {0.35, 0.73, 0.74, 0.83},
                 {0.00, 0.10, 0.10, 0.20}}};
  c.token_mean = {{{10, 34, 144, 277},
                   {14, 231, 343, 662},
                   {12, 2010, 1821, 4130}}};
  c.token_jitter = 0.1;
  c.difficulty_mix = {0.4, 0.5, 0.1};
  c.answer_space = 26;
  c.seed = 0;
  return c;
}

void validate(const EnvConfig& config) {
  for (auto d : kAllDifficulties) {
    for (auto f : kAllFormats) {
      const double a = config.accuracy[difficulty_index(d)][format_index(f)];
      if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument("EnvConfig: accuracy outside [0,1]");
      const double m = config.token_mean[difficulty_index(d)][format_index(f)];
      if (!(m > 0.0))
        throw std::invalid_argument("EnvConfig: token_mean must be positive");
    }
  }
  if (!(config.token_jitter >= 0.0 && config.token_jitter < 1.0))
    throw std::invalid_argument("EnvConfig: token_jitter must be in [0,1)");
  double mix_sum = 0.0;
  for (double p : config.difficulty_mix) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("EnvConfig: difficulty_mix entry outside [0,1]");
    mix_sum += p;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9)
    throw std::invalid_argument("EnvConfig: difficulty_mix must sum to 1");
  if (config.answer_space < 2)
    throw std::invalid_argument("EnvConfig: answer_space must be >= 2");
}

std::string answer_symbol(int index) {
  if (index < 0) throw std::invalid_argument("answer_symbol: negative index");
  std::string s;
  int n = index;
  do {
    s.insert(s.begin(), static_cast<char>('A' + n % 26));
    n = n / 26 - 1;
  } while (n >= 0);
  return s;
}

int answer_symbol_index(std::string_view symbol) {
  int v = 0;
  for (char c : symbol) {
    if (c < 'A' || c > 'Z')
      throw std::invalid_argument("answer_symbol_index: bad symbol");
    v = v * 26 + (c - 'A' + 1);
  }
  if (v == 0) throw std::invalid_argument("answer_symbol_index: empty symbol");
  return v - 1;
}

GradeSpec grade_spec_for(const TaskInstance& task) {
  return GradeSpec{task.ground_truth, AnswerKind::Literal};
}

TaskInstance sample_task(const EnvConfig& config, RngStream& rng) {
  TaskInstance task;
  task.task_id = rng.next_u64();
  task.difficulty = static_cast<Difficulty>(rng.categorical(config.difficulty_mix));
  task.ground_truth =
      answer_symbol(static_cast<int>(rng.uniform_int(config.answer_space)));
  return task;
}

Rollout rollout_once(const TaskInstance& task, ReasoningFormat format,
                     const EnvConfig& config, RngStream& rng) {
  const int d = difficulty_index(task.difficulty);
  const int f = format_index(format);

  Rollout r;
  r.format = format;
  if (rng.bernoulli(config.accuracy[d][f])) {
    r.answer = task.ground_truth;
  } else {
    // Uniform over the wrong symbols: draw from [0, k-1) and skip past the
    // ground-truth index.
    const int gt_index = answer_symbol_index(task.ground_truth);
    int wrong = static_cast<int>(rng.uniform_int(config.answer_space - 1));
    if (wrong >= gt_index) ++wrong;
    r.answer = answer_symbol(wrong);
  }
  r.reward = grade(r.answer, grade_spec_for(task));

  const double mean = config.token_mean[d][f];
  const double lo = mean * (1.0 - config.token_jitter);
  const double hi = mean * (1.0 + config.token_jitter);
  r.token_count = static_cast<int64_t>(std::llround(rng.uniform_real(lo, hi)));
  return r;
}

namespace {

struct OracleState {
  const EnvConfig* config;
  const std::array<double, kFormatCount>* probs;
  int d;
  int group_size;
  const ShapingSchedule* sched;
  ShapingMode mode;
  std::array<int, kFormatCount> n{};  // per-format counts so far
  std::array<int, kFormatCount> k{};  // per-format correct counts so far
  double expectation = 0.0;
};

// Depth-first over ordered (format, correct) assignments; at each leaf the
// group-mean shaped reward depends only on (n, k).
void enumerate(OracleState& st, int slot, double prob) {
  if (slot == st.group_size) {
    double sum = 0.0;
    for (int f = 0; f < kFormatCount; ++f) {
      if (st.k[f] == 0) continue;
      const double alpha = st.mode == ShapingMode::AdaGrpo
                               ? diversity_scale(st.n[f], st.group_size, *st.sched)
                               : 1.0;
      sum += st.k[f] * alpha;
    }
    st.expectation += prob * (sum / st.group_size);
    return;
  }
  for (int f = 0; f < kFormatCount; ++f) {
    const double pf = (*st.probs)[f];
    if (pf == 0.0) continue;
    const double acc = st.config->accuracy[st.d][f];
    ++st.n[f];
    if (acc > 0.0) {
      ++st.k[f];
      enumerate(st, slot + 1, prob * pf * acc);
      --st.k[f];
    }
    if (acc < 1.0) enumerate(st, slot + 1, prob * pf * (1.0 - acc));
    --st.n[f];
  }
}

}  // namespace

double expected_shaped_reward_oracle(const EnvConfig& config,
                                     const std::array<double, kFormatCount>& policy_probs,
                                     Difficulty difficulty, int group_size,
                                     const ShapingSchedule& sched, ShapingMode mode) {
  double psum = 0.0;
  for (double p : policy_probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("oracle: policy_probs entry outside [0,1]");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("oracle: policy_probs must sum to 1");
  if (group_size < 2 || group_size > kOracleMaxGroupSize)
    throw std::invalid_argument("oracle: group_size must be in [2, 8]");

  OracleState st;
  st.config = &config;
  st.probs = &policy_probs;
  st.d = difficulty_index(difficulty);
  st.group_size = group_size;
  st.sched = &sched;
  st.mode = mode;
  enumerate(st, 0, 1.0);
  return st.expectation;
}

}  // namespace armlab
