#include "armlab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace armlab {

void validate(const TrainConfig& config) {
  if (config.group_size < 2)
    throw std::invalid_argument("TrainConfig: group_size must be >= 2");
  if (config.total_steps < 0)
    throw std::invalid_argument("TrainConfig: total_steps must be >= 0");
  if (config.tasks_per_step < 1)
    throw std::invalid_argument("TrainConfig: tasks_per_step must be >= 1");
  if (config.minibatches_per_step < 1 ||
      config.tasks_per_step % config.minibatches_per_step != 0)
    throw std::invalid_argument(
        "TrainConfig: minibatches_per_step must divide tasks_per_step");
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("TrainConfig: learning_rate must be positive");
  if (!(config.clip_epsilon > 0.0 && config.clip_epsilon < 1.0))
    throw std::invalid_argument("TrainConfig: clip_epsilon must be in (0,1)");
  if (config.kl_coefficient < 0.0)
    throw std::invalid_argument("TrainConfig: kl_coefficient must be >= 0");
  if (config.checkpoint_interval < 1)
    throw std::invalid_argument("TrainConfig: checkpoint_interval must be >= 1");
  validate(config.env);
}

namespace {

// Stream-id tags keeping task sampling, action sampling, and environment
// outcomes on disjoint substreams.
constexpr uint64_t kTaskStream = 1;
constexpr uint64_t kActionStream = 2;
constexpr uint64_t kEnvStream = 3;

StepMetrics summarize_step(int64_t step, const std::vector<RolloutGroup>& groups,
                           const TabularPolicy& sampling_policy,
                           int64_t cumulative_tokens) {
  StepMetrics m;
  m.step = step;
  std::array<std::array<int64_t, kFormatCount>, kDifficultyCount> fmt_counts{};
  std::array<int64_t, kDifficultyCount> reward_sum{};
  std::array<int64_t, kDifficultyCount> token_sum{};
  for (const auto& g : groups) {
    const int d = difficulty_index(g.difficulty);
    for (const auto& r : g.rollouts) {
      ++m.rollout_count[d];
      ++fmt_counts[d][format_index(r.format)];
      reward_sum[d] += r.reward;
      token_sum[d] += r.token_count;
    }
  }
  for (int d = 0; d < kDifficultyCount; ++d) {
    if (m.rollout_count[d] > 0) {
      const double n = static_cast<double>(m.rollout_count[d]);
      m.mean_reward[d] = reward_sum[d] / n;
      m.mean_tokens[d] = token_sum[d] / n;
      for (int f = 0; f < kFormatCount; ++f)
        m.format_distribution[d][f] = fmt_counts[d][f] / n;
    } else {
      // No tasks of this difficulty this step: report the sampling policy's
      // expected distribution so rows stay valid probability vectors.
      m.format_distribution[d] =
          action_probs(sampling_policy, static_cast<Difficulty>(d));
    }
  }
  m.cumulative_rollout_tokens = cumulative_tokens;
  return m;
}

}  // namespace

TrainResult train(const TrainConfig& config) {
  validate(config);

  TrainResult result;
  TabularPolicy policy;  // uniform init (all-zero logits)
  const TabularPolicy ref_policy = policy;
  const SurrogateConfig scfg{config.clip_epsilon, config.kl_coefficient};
  const RngStream task_root = RngStream(config.env.seed).derive({kTaskStream});
  const RngStream action_root = RngStream(config.seed).derive({kActionStream});
  const RngStream env_root = RngStream(config.env.seed).derive({kEnvStream});

  int64_t cumulative_tokens = 0;
  const int groups_per_minibatch = config.tasks_per_step / config.minibatches_per_step;

  for (int64_t step = 1; step <= config.total_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const TabularPolicy old_policy = policy;
    const ShapingSchedule sched(step, config.total_steps);

    // Roll out the batch under the snapshotted policy. Per-rollout rng
    // streams are keyed by (step, group, rollout), so groups could be
    // generated in parallel and still reduce deterministically in order.
    RngStream task_rng = task_root.derive({static_cast<uint64_t>(step)});
    std::vector<RolloutGroup> groups;
    groups.reserve(config.tasks_per_step);
    std::vector<double> advantages;
    advantages.reserve(config.tasks_per_step * config.group_size);

    for (int g = 0; g < config.tasks_per_step; ++g) {
      RolloutGroup group;
      TaskInstance task = sample_task(config.env, task_rng);
      group.task_id = task.task_id;
      group.difficulty = task.difficulty;
      group.rollouts.reserve(config.group_size);
      for (int i = 0; i < config.group_size; ++i) {
        RngStream action_rng = action_root.derive(
            {static_cast<uint64_t>(step), static_cast<uint64_t>(g),
             static_cast<uint64_t>(i)});
        RngStream env_rng = env_root.derive(
            {static_cast<uint64_t>(step), static_cast<uint64_t>(g),
             static_cast<uint64_t>(i)});
        const SampledAction action = sample_format(old_policy, task.difficulty, action_rng);
        Rollout r = rollout_once(task, action.format, config.env, env_rng);
        r.logprob_old = action.logprob;
        cumulative_tokens += r.token_count;
        group.rollouts.push_back(std::move(r));
      }
      const auto shaped =
          shape_rewards(group, sched, config.mode, config.decay_enabled);
      const auto adv = group_advantages(shaped);
      advantages.insert(advantages.end(), adv.begin(), adv.end());
      groups.push_back(std::move(group));
    }

    // Minibatch updates against the step's snapshot.
    for (int mb = 0; mb < config.minibatches_per_step; ++mb) {
      const size_t lo = static_cast<size_t>(mb) * groups_per_minibatch;
      std::vector<RolloutGroup> mb_groups(groups.begin() + lo,
                                          groups.begin() + lo + groups_per_minibatch);
      std::vector<double> mb_adv(
          advantages.begin() + lo * config.group_size,
          advantages.begin() + (lo + groups_per_minibatch) * config.group_size);
      const SurrogateResult sur =
          surrogate_loss_and_grad(policy, old_policy, ref_policy, mb_groups, mb_adv, scfg);
      if (!std::isfinite(sur.loss))
        throw std::runtime_error("train: non-finite loss");
      policy = apply_update(policy, sur.grad, config.learning_rate);
    }

    StepMetrics m = summarize_step(step, groups, old_policy, cumulative_tokens);
    m.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.metrics.push_back(m);

    if (step % config.checkpoint_interval == 0)
      result.checkpoints.push_back(Checkpoint{step, config.total_steps, policy});
  }

  if (result.checkpoints.empty() ||
      result.checkpoints.back().step != config.total_steps)
    result.checkpoints.push_back(
        Checkpoint{config.total_steps, config.total_steps, policy});
  result.final_policy = policy;
  return result;
}

namespace {
std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<StepMetrics>& metrics) {
  out << "step,difficulty,mean_reward,frac_direct,frac_short,frac_code,"
         "frac_long,mean_tokens,cum_tokens\n";
  for (const auto& m : metrics) {
    for (auto d : kAllDifficulties) {
      const int di = difficulty_index(d);
      out << m.step << ',' << difficulty_name(d) << ',' << csv_number(m.mean_reward[di]);
      for (int f = 0; f < kFormatCount; ++f)
        out << ',' << csv_number(m.format_distribution[di][f]);
      out << ',' << csv_number(m.mean_tokens[di]) << ','
          << m.cumulative_rollout_tokens << '\n';
    }
  }
}

namespace {

// Mean reward across all rollouts of one step (difficulty-weighted by counts).
double step_overall_reward(const StepMetrics& m) {
  double rewards = 0.0;
  int64_t n = 0;
  for (int d = 0; d < kDifficultyCount; ++d) {
    rewards += m.mean_reward[d] * m.rollout_count[d];
    n += m.rollout_count[d];
  }
  return n > 0 ? rewards / n : 0.0;
}

double step_overall_tokens(const StepMetrics& m) {
  double tokens = 0.0;
  int64_t n = 0;
  for (int d = 0; d < kDifficultyCount; ++d) {
    tokens += m.mean_tokens[d] * m.rollout_count[d];
    n += m.rollout_count[d];
  }
  return n > 0 ? tokens / n : 0.0;
}

double tail_mean(const std::vector<StepMetrics>& ms, int64_t window,
                 double (*f)(const StepMetrics&)) {
  if (ms.empty()) return 0.0;
  const size_t w = static_cast<size_t>(std::max<int64_t>(1, window));
  const size_t start = ms.size() > w ? ms.size() - w : 0;
  double sum = 0.0;
  for (size_t i = start; i < ms.size(); ++i) sum += f(ms[i]);
  return sum / static_cast<double>(ms.size() - start);
}

}  // namespace

ComparisonReport compare_runs(const TrainConfig& config_a, const TrainConfig& config_b) {
  if (config_a.seed != config_b.seed)
    throw std::invalid_argument("compare_runs: configs must share the seed");
  if (config_a.env.seed != config_b.env.seed ||
      config_a.env.accuracy != config_b.env.accuracy ||
      config_a.env.token_mean != config_b.env.token_mean ||
      config_a.env.difficulty_mix != config_b.env.difficulty_mix ||
      config_a.env.token_jitter != config_b.env.token_jitter ||
      config_a.env.answer_space != config_b.env.answer_space)
    throw std::invalid_argument("compare_runs: configs must share the env");

  ComparisonReport rep;
  rep.run_a = train(config_a);
  rep.run_b = train(config_b);

  const int64_t t = config_a.total_steps;
  rep.final_mean_reward_a = tail_mean(rep.run_a.metrics, t / 30, step_overall_reward);
  rep.final_mean_reward_b = tail_mean(rep.run_b.metrics, t / 30, step_overall_reward);
  rep.final_mean_reward_diff = rep.final_mean_reward_a - rep.final_mean_reward_b;

  const double tok_a = tail_mean(rep.run_a.metrics, t / 10, step_overall_tokens);
  const double tok_b = tail_mean(rep.run_b.metrics, t / 10, step_overall_tokens);
  rep.response_length_ratio = tok_b > 0.0 ? tok_a / tok_b : (tok_a > 0.0 ? HUGE_VAL : 1.0);

  const int64_t cum_a =
      rep.run_a.metrics.empty() ? 0 : rep.run_a.metrics.back().cumulative_rollout_tokens;
  const int64_t cum_b =
      rep.run_b.metrics.empty() ? 0 : rep.run_b.metrics.back().cumulative_rollout_tokens;
  rep.cumulative_token_ratio =
      cum_b > 0 ? static_cast<double>(cum_a) / cum_b : (cum_a > 0 ? HUGE_VAL : 1.0);
  return rep;
}

namespace {

// Sampled adaptive-mode evaluation of a policy on a fixed held-out stream.
double eval_policy_reward(const TabularPolicy& policy, const EnvConfig& env,
                          int eval_tasks, uint64_t eval_seed, uint64_t eval_index) {
  RngStream task_rng = RngStream(eval_seed).derive({kTaskStream});
  double total = 0.0;
  for (int i = 0; i < eval_tasks; ++i) {
    TaskInstance task = sample_task(env, task_rng);
    RngStream action_rng = RngStream(eval_seed).derive(
        {kActionStream, eval_index, static_cast<uint64_t>(i)});
    RngStream env_rng = RngStream(eval_seed).derive(
        {kEnvStream, eval_index, static_cast<uint64_t>(i)});
    const SampledAction action = sample_format(policy, task.difficulty, action_rng);
    total += rollout_once(task, action.format, env, env_rng).reward;
  }
  return total / eval_tasks;
}

double variance(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / static_cast<double>(xs.size());
}

}  // namespace

AblationReport ablate_decay(const TrainConfig& base_config, int eval_tasks,
                            uint64_t eval_seed, int64_t eval_interval) {
  if (base_config.mode != ShapingMode::AdaGrpo)
    throw std::invalid_argument("ablate_decay: base config must be ada_grpo");
  if (eval_tasks < 1 || eval_interval < 1)
    throw std::invalid_argument("ablate_decay: eval_tasks and eval_interval must be >= 1");

  TrainConfig with_decay = base_config;
  with_decay.decay_enabled = true;
  TrainConfig without_decay = base_config;
  without_decay.decay_enabled = false;

  TrainConfig arms[2] = {with_decay, without_decay};
  std::vector<double> curves[2];
  AblationReport rep;

  for (int arm = 0; arm < 2; ++arm) {
    const TrainResult run = train(arms[arm]);
    std::vector<int64_t> steps;
    std::vector<double> rewards;
    // Evaluate checkpoint policies at eval_interval boundaries; the final
    // policy is always included (single point when eval_interval > T).
    for (const auto& ckpt : run.checkpoints) {
      const bool at_interval = ckpt.step % eval_interval == 0;
      const bool is_final = ckpt.step == base_config.total_steps;
      if (!at_interval && !is_final) continue;
      steps.push_back(ckpt.step);
      rewards.push_back(eval_policy_reward(ckpt.policy, base_config.env, eval_tasks,
                                           eval_seed,
                                           static_cast<uint64_t>(ckpt.step)));
    }
    if (arm == 0) rep.eval_steps = steps;
    curves[arm] = rewards;
  }

  rep.eval_reward_decay = curves[0];
  rep.eval_reward_no_decay = curves[1];

  const size_t n = rep.eval_reward_decay.size();
  const size_t half_start = n / 2;
  std::vector<double> second_decay(rep.eval_reward_decay.begin() + half_start,
                                   rep.eval_reward_decay.end());
  std::vector<double> second_no_decay(rep.eval_reward_no_decay.begin() + half_start,
                                      rep.eval_reward_no_decay.end());
  rep.degenerate_sample = second_decay.size() < 2;
  rep.variance_decay = variance(second_decay);
  rep.variance_no_decay = variance(second_no_decay);
  return rep;
}

}  // namespace armlab
