#include "armlab/inference.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace armlab {

AnswerProvider env_answer_provider(const EnvConfig& config) {
  return [config](const TaskInstance& task, ReasoningFormat format, RngStream& rng) {
    return rollout_once(task, format, config, rng);
  };
}

namespace {

ModeResult from_single_rollout(const Rollout& r) {
  ModeResult res;
  res.answer = r.answer;
  res.reward = r.reward;
  res.total_tokens = r.token_count;
  res.formats_used = {r.format};
  res.long_cot_invoked = r.format == ReasoningFormat::LongCoT;
  return res;
}

}  // namespace

ModeResult run_adaptive(const TaskInstance& task, const TabularPolicy& policy,
                        const AnswerProvider& provider, RngStream& rng,
                        bool greedy) {
  ReasoningFormat format;
  if (greedy) {
    const ProbVector p = action_probs(policy, task.difficulty);
    format = static_cast<ReasoningFormat>(
        std::max_element(p.begin(), p.end()) - p.begin());
  } else {
    RngStream action_rng = rng.derive({0});
    format = sample_format(policy, task.difficulty, action_rng).format;
  }
  RngStream env_rng = rng.derive({1});
  return from_single_rollout(provider(task, format, env_rng));
}

ModeResult run_instruction_guided(const TaskInstance& task, ReasoningFormat format,
                                  const AnswerProvider& provider, RngStream& rng) {
  RngStream env_rng = rng.derive({1});
  return from_single_rollout(provider(task, format, env_rng));
}

ModeResult run_consensus(const TaskInstance& task, const AnswerProvider& provider,
                         RngStream& rng) {
  constexpr ReasoningFormat kEfficient[3] = {ReasoningFormat::DirectAnswer,
                                             ReasoningFormat::ShortCoT,
                                             ReasoningFormat::Code};
  ModeResult res;
  std::array<Rollout, 3> rollouts;
  // Independent substreams per format: outcomes are conditionally independent
  // given the task, and the three rollouts could run concurrently.
  for (int i = 0; i < 3; ++i) {
    RngStream env_rng = rng.derive({static_cast<uint64_t>(i + 2)});
    rollouts[i] = provider(task, kEfficient[i], env_rng);
    res.total_tokens += rollouts[i].token_count;
    res.formats_used.push_back(kEfficient[i]);
  }

  const AnswerKind kind = grade_spec_for(task).answer_kind;
  const std::string key = normalize_answer(rollouts[0].answer, kind);
  const bool agree = normalize_answer(rollouts[1].answer, kind) == key &&
                     normalize_answer(rollouts[2].answer, kind) == key;
  if (agree) {
    res.answer = rollouts[0].answer;
    res.reward = rollouts[0].reward;
    res.long_cot_invoked = false;
    return res;
  }

  RngStream env_rng = rng.derive({5});
  const Rollout fallback = provider(task, ReasoningFormat::LongCoT, env_rng);
  res.answer = fallback.answer;
  res.reward = fallback.reward;
  res.total_tokens += fallback.token_count;
  res.formats_used.push_back(ReasoningFormat::LongCoT);
  res.long_cot_invoked = true;
  return res;
}

std::string_view mode_name(InferenceMode mode) {
  switch (mode) {
    case InferenceMode::Adaptive: return "adaptive";
    case InferenceMode::InstructionDirect: return "inst_direct";
    case InferenceMode::InstructionShortCoT: return "inst_short_cot";
    case InferenceMode::InstructionCode: return "inst_code";
    case InferenceMode::InstructionLongCoT: return "inst_long_cot";
    case InferenceMode::Consensus: return "consensus";
  }
  return "?";
}

namespace {

ModeResult run_mode(InferenceMode mode, const TaskInstance& task,
                    const TabularPolicy& policy, const AnswerProvider& provider,
                    RngStream& rng) {
  switch (mode) {
    case InferenceMode::Adaptive:
      return run_adaptive(task, policy, provider, rng);
    case InferenceMode::InstructionDirect:
      return run_instruction_guided(task, ReasoningFormat::DirectAnswer, provider, rng);
    case InferenceMode::InstructionShortCoT:
      return run_instruction_guided(task, ReasoningFormat::ShortCoT, provider, rng);
    case InferenceMode::InstructionCode:
      return run_instruction_guided(task, ReasoningFormat::Code, provider, rng);
    case InferenceMode::InstructionLongCoT:
      return run_instruction_guided(task, ReasoningFormat::LongCoT, provider, rng);
    case InferenceMode::Consensus:
      return run_consensus(task, provider, rng);
  }
  throw std::invalid_argument("run_mode: unknown mode");
}

}  // namespace

ModeReport mode_report(InferenceMode mode, int n_tasks, const EnvConfig& env,
                       const TabularPolicy& policy, uint64_t seed) {
  if (n_tasks < 1) throw std::invalid_argument("mode_report: n_tasks must be >= 1");
  const AnswerProvider provider = env_answer_provider(env);
  const RngStream root = RngStream(seed).derive({static_cast<uint64_t>(mode) + 11});

  ModeReport report{};
  for (auto d : kAllDifficulties) {
    const int di = difficulty_index(d);
    RngStream task_rng = root.derive({static_cast<uint64_t>(di), 0});
    double rewards = 0.0;
    double tokens = 0.0;
    double long_cot = 0.0;
    for (int i = 0; i < n_tasks; ++i) {
      TaskInstance task = sample_task(env, task_rng);
      task.difficulty = d;  // per-difficulty report: pin the difficulty
      RngStream req_rng =
          root.derive({static_cast<uint64_t>(di), 1, static_cast<uint64_t>(i)});
      const ModeResult r = run_mode(mode, task, policy, provider, req_rng);
      rewards += r.reward;
      tokens += static_cast<double>(r.total_tokens);
      long_cot += r.long_cot_invoked ? 1.0 : 0.0;
    }
    report[di].accuracy = rewards / n_tasks;
    report[di].mean_tokens = tokens / n_tasks;
    report[di].long_cot_usage = long_cot / n_tasks;
  }
  return report;
}

namespace {
std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace

void write_modes_csv(std::ostream& out, int n_tasks, const EnvConfig& env,
                     const TabularPolicy& policy, uint64_t seed) {
  constexpr InferenceMode kModes[] = {
      InferenceMode::Adaptive,          InferenceMode::InstructionDirect,
      InferenceMode::InstructionShortCoT, InferenceMode::InstructionCode,
      InferenceMode::InstructionLongCoT, InferenceMode::Consensus};

  out << "mode,difficulty,accuracy,mean_tokens,long_cot_usage\n";
  ModeReport consensus_report{};
  for (InferenceMode mode : kModes) {
    const ModeReport rep = mode_report(mode, n_tasks, env, policy, seed);
    if (mode == InferenceMode::Consensus) consensus_report = rep;
    for (auto d : kAllDifficulties) {
      const auto& s = rep[difficulty_index(d)];
      out << mode_name(mode) << ',' << difficulty_name(d) << ','
          << csv_number(s.accuracy) << ',' << csv_number(s.mean_tokens) << ','
          << csv_number(s.long_cot_usage) << '\n';
    }
  }
  for (auto d : kAllDifficulties) {
    out << "long_cot_usage," << difficulty_name(d) << ",,,"
        << csv_number(consensus_report[difficulty_index(d)].long_cot_usage) << '\n';
  }
}

}  // namespace armlab
