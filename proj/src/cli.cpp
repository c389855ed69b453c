#include "armlab/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "armlab/charts.hpp"
#include "armlab/config.hpp"
#include "armlab/inference.hpp"
#include "armlab/trainer.hpp"
#include "armlab/transcript.hpp"

namespace armlab {

namespace fs = std::filesystem;

namespace {

ExperimentConfig load_with_overrides(const CliOptions& opts) {
  ExperimentConfig cfg = load_experiment_config(opts.config_path);
  if (opts.seed_override) cfg.train.seed = *opts.seed_override;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (const char* env_out = std::getenv("ARM_LAB_OUT"); env_out && *env_out)
    cfg.output_dir = env_out;
  if (opts.no_charts) cfg.emit_charts = false;
  return cfg;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_metrics_file(const fs::path& path, const std::vector<StepMetrics>& metrics) {
  std::ostringstream buf;
  write_metrics_csv(buf, metrics);
  write_text_file(path, buf.str());
}

std::string checkpoint_file_name(int64_t step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "checkpoint_%06lld.txt",
                static_cast<long long>(step));
  return buf;
}

void write_checkpoints(const fs::path& dir, const TrainResult& result,
                       const std::string& final_name) {
  for (const auto& ckpt : result.checkpoints)
    save_checkpoint((dir / checkpoint_file_name(ckpt.step)).string(), ckpt);
  const Checkpoint final_ckpt{
      result.checkpoints.empty() ? 0 : result.checkpoints.back().step,
      result.checkpoints.empty() ? 0 : result.checkpoints.back().total_steps,
      result.final_policy};
  save_checkpoint((dir / final_name).string(), final_ckpt);
}

// One chart per metrics.csv value column, three difficulty series each
// (cum_tokens is run-level, one series).
void write_metric_charts(const fs::path& dir, const std::vector<StepMetrics>& metrics) {
  struct Column {
    const char* name;
    double (*get)(const StepMetrics&, int d);
  };
  const Column columns[] = {
      {"mean_reward", [](const StepMetrics& m, int d) { return m.mean_reward[d]; }},
      {"frac_direct", [](const StepMetrics& m, int d) { return m.format_distribution[d][0]; }},
      {"frac_short", [](const StepMetrics& m, int d) { return m.format_distribution[d][1]; }},
      {"frac_code", [](const StepMetrics& m, int d) { return m.format_distribution[d][2]; }},
      {"frac_long", [](const StepMetrics& m, int d) { return m.format_distribution[d][3]; }},
      {"mean_tokens", [](const StepMetrics& m, int d) { return m.mean_tokens[d]; }},
  };
  for (const auto& col : columns) {
    std::vector<ChartSeries> series;
    for (auto d : kAllDifficulties) {
      ChartSeries s;
      s.label = difficulty_name(d);
      for (const auto& m : metrics) {
        s.x.push_back(static_cast<double>(m.step));
        s.y.push_back(col.get(m, difficulty_index(d)));
      }
      series.push_back(std::move(s));
    }
    write_text_file(dir / (std::string(col.name) + ".svg"),
                    render_line_chart_svg(col.name, "step", col.name, series));
  }
  ChartSeries cum;
  cum.label = "all";
  for (const auto& m : metrics) {
    cum.x.push_back(static_cast<double>(m.step));
    cum.y.push_back(static_cast<double>(m.cumulative_rollout_tokens));
  }
  write_text_file(dir / "cum_tokens.svg",
                  render_line_chart_svg("cum_tokens", "step", "cum_tokens", {cum}));
}

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kExitUsage;
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

int cmd_train(const CliOptions& opts) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    return usage_error("config: line " + std::to_string(e.line) +
                       (e.key.empty() ? "" : " (" + e.key + ")") + ": " + e.what());
  }
  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    const TrainResult result = train(cfg.train);
    write_metrics_file(dir / "metrics.csv", result.metrics);
    write_checkpoints(dir, result, "checkpoint_final.txt");
    if (cfg.emit_charts) write_metric_charts(dir, result.metrics);
    std::cout << "trained " << cfg.train.total_steps << " steps -> "
              << (dir / "metrics.csv").string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_compare(const CliOptions& opts) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    return usage_error("config: line " + std::to_string(e.line) +
                       (e.key.empty() ? "" : " (" + e.key + ")") + ": " + e.what());
  }
  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    // Arm A is the config as given; arm B is the same run with the other
    // shaping mode.
    TrainConfig config_a = cfg.train;
    TrainConfig config_b = cfg.train;
    config_b.mode = config_a.mode == ShapingMode::AdaGrpo ? ShapingMode::Grpo
                                                          : ShapingMode::AdaGrpo;
    const ComparisonReport rep = compare_runs(config_a, config_b);
    write_metrics_file(dir / "metrics_a.csv", rep.run_a.metrics);
    write_metrics_file(dir / "metrics_b.csv", rep.run_b.metrics);

    std::ostringstream out;
    out << "final_mean_reward_a,final_mean_reward_b,final_mean_reward_diff,"
           "response_length_ratio,cumulative_token_ratio\n";
    out << csv_number(rep.final_mean_reward_a) << ','
        << csv_number(rep.final_mean_reward_b) << ','
        << csv_number(rep.final_mean_reward_diff) << ','
        << csv_number(rep.response_length_ratio) << ','
        << csv_number(rep.cumulative_token_ratio) << '\n';
    write_text_file(dir / "comparison.csv", out.str());
    std::cout << "response_length_ratio=" << csv_number(rep.response_length_ratio)
              << " cumulative_token_ratio=" << csv_number(rep.cumulative_token_ratio)
              << " final_mean_reward_diff=" << csv_number(rep.final_mean_reward_diff)
              << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_ablate(const CliOptions& opts) {
  ExperimentConfig cfg;
  try {
    cfg = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    return usage_error("config: line " + std::to_string(e.line) +
                       (e.key.empty() ? "" : " (" + e.key + ")") + ": " + e.what());
  }
  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    TrainConfig base = cfg.train;
    base.mode = ShapingMode::AdaGrpo;
    const AblationReport rep =
        ablate_decay(base, cfg.eval.n_tasks, cfg.eval.eval_seed, cfg.eval.eval_interval);

    std::ostringstream curve;
    curve << "eval_step,mean_reward_decay,mean_reward_no_decay\n";
    for (size_t i = 0; i < rep.eval_steps.size(); ++i)
      curve << rep.eval_steps[i] << ',' << csv_number(rep.eval_reward_decay[i]) << ','
            << csv_number(rep.eval_reward_no_decay[i]) << '\n';
    write_text_file(dir / "ablation.csv", curve.str());

    std::ostringstream summary;
    summary << "variance_decay,variance_no_decay,degenerate_sample\n";
    summary << csv_number(rep.variance_decay) << ','
            << csv_number(rep.variance_no_decay) << ','
            << (rep.degenerate_sample ? "true" : "false") << '\n';
    write_text_file(dir / "ablation_summary.csv", summary.str());
    std::cout << "variance_decay=" << csv_number(rep.variance_decay)
              << " variance_no_decay=" << csv_number(rep.variance_no_decay) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_modes(const CliOptions& opts) {
  ExperimentConfig cfg;
  Checkpoint ckpt;
  try {
    cfg = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    return usage_error("config: line " + std::to_string(e.line) +
                       (e.key.empty() ? "" : " (" + e.key + ")") + ": " + e.what());
  }
  try {
    ckpt = load_checkpoint(opts.checkpoint_path);
  } catch (const std::exception& e) {
    return usage_error(std::string("checkpoint: ") + e.what());
  }
  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::ostringstream out;
    write_modes_csv(out, cfg.eval.n_tasks, cfg.train.env, ckpt.policy,
                    cfg.eval.eval_seed);
    write_text_file(dir / "modes.csv", out.str());
    std::cout << "wrote " << (dir / "modes.csv").string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

namespace {

// Records are transcripts separated by a line containing only `---`.
std::vector<std::string> read_corpus_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus: " + path);
  std::vector<std::string> records;
  std::string record, line;
  bool any = false;
  while (std::getline(in, line)) {
    any = true;
    if (line == "---") {
      records.push_back(record);
      record.clear();
    } else {
      if (!record.empty()) record += '\n';
      record += line;
    }
  }
  if (any) records.push_back(record);
  return records;
}

std::vector<std::string> read_truth_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open truth file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_single_choice_letter(const std::string& s) {
  return s.size() == 1 && s[0] >= 'A' && s[0] <= 'E';
}

AnswerKind infer_kind(const std::string& ground_truth) {
  char* end = nullptr;
  const double v = std::strtod(ground_truth.c_str(), &end);
  (void)v;
  if (!ground_truth.empty() && end == ground_truth.c_str() + ground_truth.size())
    return AnswerKind::Numeric;
  if (is_single_choice_letter(ground_truth)) return AnswerKind::MultipleChoice;
  return AnswerKind::Literal;
}

}  // namespace

int cmd_replay(const CliOptions& opts) {
  std::vector<std::string> records, truths;
  try {
    records = read_corpus_records(opts.corpus_path);
    truths = read_truth_lines(opts.truth_path);
  } catch (const std::exception& e) {
    return usage_error(e.what());
  }
  if (records.size() != truths.size())
    return usage_error("record count mismatch: corpus has " +
                       std::to_string(records.size()) + " records, truth file has " +
                       std::to_string(truths.size()));

  std::vector<Transcript> transcripts;
  std::vector<int> rewards;
  std::map<ReasoningFormat, std::pair<int64_t, int64_t>> per_format;  // correct, total
  std::map<ReasoningFormat, int64_t> tokens;
  for (size_t i = 0; i < records.size(); ++i) {
    Transcript t;
    try {
      t = parse_transcript(records[i]);
    } catch (const TranscriptError& e) {
      return usage_error("record " + std::to_string(i) + ": " + e.what() +
                         " (offset " + std::to_string(e.offset) + ")");
    }
    const GradeSpec spec{truths[i], infer_kind(truths[i])};
    const int r = grade(t.answer, spec);
    transcripts.push_back(t);
    rewards.push_back(r);
    per_format[t.format].first += r;
    per_format[t.format].second += 1;
    tokens[t.format] += static_cast<int64_t>(count_tokens(t.raw));
  }

  int64_t correct = 0;
  for (int r : rewards) correct += r;
  std::printf("records: %zu  accuracy: %.4f\n", records.size(),
              records.empty() ? 0.0 : static_cast<double>(correct) / records.size());
  for (auto f : kAllFormats) {
    const auto it = per_format.find(f);
    if (it == per_format.end()) continue;
    const auto [ok, total] = it->second;
    std::printf("%-10s n=%lld  accuracy=%.4f  mean_tokens=%.1f\n",
                std::string(format_name(f)).c_str(), static_cast<long long>(total),
                static_cast<double>(ok) / total,
                static_cast<double>(tokens[f]) / total);
  }
  if (!transcripts.empty()) {
    const ReflectiveStats stats = reflective_word_stats(transcripts, rewards);
    std::printf("reflection_ratio: %.4f\n", stats.reflection_ratio);
    if (stats.correct_ratio_defined)
      std::printf("correct_ratio_in_reflection_texts: %.4f\n",
                  stats.correct_ratio_in_reflection_texts);
    else
      std::printf("correct_ratio_in_reflection_texts: 0 (no reflective records)\n");
  }
  return kExitOk;
}

}  // namespace armlab
