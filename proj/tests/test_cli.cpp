#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "armlab/cli.hpp"
#include "armlab/config.hpp"

using namespace armlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("armlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_config_text(const std::string& out_dir, int total_steps = 4) {
  std::ostringstream cfg;
  cfg << "train.mode = ada_grpo\n"
      << "train.total_steps = " << total_steps << "\n"
      << "train.tasks_per_step = 8\n"
      << "train.minibatches_per_step = 2\n"
      << "train.group_size = 4\n"
      << "train.seed = 3\n"
      << "eval.n_tasks = 20\n"
      << "output_dir = " << out_dir << "\n"
      << "emit_charts = true\n";
  return cfg.str();
}

fs::path write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

size_t count_lines(const std::string& text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("config parser: defaults, overrides, diagnostics") {
  const ExperimentConfig def = parse_experiment_config(default_config_text());
  CHECK(def.train.total_steps == 300);
  CHECK(def.train.group_size == 8);
  CHECK(def.train.env.accuracy[1][0] == doctest::Approx(0.35));

  const ExperimentConfig c = parse_experiment_config(
      "train.mode = grpo\n"
      "# comment line\n"
      "train.total_steps = 12   # trailing comment\n"
      "env.accuracy.hard = 0.1 0.2 0.3 0.4\n");
  CHECK(c.train.mode == ShapingMode::Grpo);
  CHECK(c.train.total_steps == 12);
  CHECK(c.train.env.accuracy[2][0] == doctest::Approx(0.1));

  try {
    parse_experiment_config("train.total_steps = soon\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.line == 1);
    CHECK(e.key == "train.total_steps");
  }
  CHECK_THROWS_AS(parse_experiment_config("nonsense.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("env.difficulty_mix = 0.5 0.5\n"),
                  ConfigError);
  // out-of-range values surface through TrainConfig validation
  CHECK_THROWS_AS(parse_experiment_config("train.group_size = 1\n"), ConfigError);
}

TEST_CASE("cmd_train: metrics rows, checkpoints, charts") {
  const fs::path dir = temp_dir("train");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "out").string(), 4));

  CliOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_train(opts) == kExitOk);

  const std::string csv = read_file(dir / "out" / "metrics.csv");
  CHECK(count_lines(csv) == 1 + 4 * 3);  // header + one row per (step, difficulty)
  CHECK(fs::exists(dir / "out" / "checkpoint_final.txt"));
  CHECK(fs::exists(dir / "out" / "mean_reward.svg"));
  CHECK(fs::exists(dir / "out" / "cum_tokens.svg"));
}

TEST_CASE("cmd_train: T=0 leaves a header-only CSV") {
  const fs::path dir = temp_dir("train0");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "out").string(), 0));
  CliOptions opts;
  opts.config_path = cfg.string();
  opts.no_charts = true;
  REQUIRE(cmd_train(opts) == kExitOk);
  const std::string csv = read_file(dir / "out" / "metrics.csv");
  CHECK(count_lines(csv) == 1);
}

TEST_CASE("cmd_train: missing or malformed config exits 2") {
  CliOptions opts;
  opts.config_path = "/nonexistent/config.txt";
  CHECK(cmd_train(opts) == kExitUsage);

  const fs::path dir = temp_dir("badcfg");
  opts.config_path = write_file(dir / "bad.txt", "train.group_size = banana\n").string();
  CHECK(cmd_train(opts) == kExitUsage);
}

TEST_CASE("cmd_train: --seed and ARM_LAB_OUT override the config") {
  const fs::path dir = temp_dir("envvar");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "ignored").string(), 2));

  CliOptions opts;
  opts.config_path = cfg.string();
  opts.seed_override = 99;
  const fs::path env_out = dir / "env_out";
  setenv("ARM_LAB_OUT", env_out.c_str(), 1);
  const int rc = cmd_train(opts);
  unsetenv("ARM_LAB_OUT");
  REQUIRE(rc == kExitOk);
  CHECK(fs::exists(env_out / "metrics.csv"));
  CHECK_FALSE(fs::exists(dir / "ignored" / "metrics.csv"));
}

TEST_CASE("cmd_compare and cmd_ablate: output schemas") {
  const fs::path dir = temp_dir("compare");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "out").string(), 4));
  CliOptions opts;
  opts.config_path = cfg.string();
  opts.no_charts = true;

  REQUIRE(cmd_compare(opts) == kExitOk);
  const std::string comparison = read_file(dir / "out" / "comparison.csv");
  CHECK(comparison.rfind("final_mean_reward_a,final_mean_reward_b,"
                         "final_mean_reward_diff,response_length_ratio,"
                         "cumulative_token_ratio\n", 0) == 0);
  CHECK(count_lines(comparison) == 2);
  CHECK(fs::exists(dir / "out" / "metrics_a.csv"));
  CHECK(fs::exists(dir / "out" / "metrics_b.csv"));

  REQUIRE(cmd_ablate(opts) == kExitOk);
  const std::string summary = read_file(dir / "out" / "ablation_summary.csv");
  CHECK(summary.rfind("variance_decay,variance_no_decay,degenerate_sample\n", 0) == 0);
  CHECK(fs::exists(dir / "out" / "ablation.csv"));
}

TEST_CASE("cmd_modes: trained or untrained checkpoints work, corrupt exits 2") {
  const fs::path dir = temp_dir("modes");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "out").string(), 2));
  CliOptions opts;
  opts.config_path = cfg.string();
  REQUIRE(cmd_train(opts) == kExitOk);

  opts.checkpoint_path = (dir / "out" / "checkpoint_final.txt").string();
  REQUIRE(cmd_modes(opts) == kExitOk);
  const std::string modes = read_file(dir / "out" / "modes.csv");
  CHECK(count_lines(modes) == 1 + 7 * 3);

  opts.checkpoint_path = write_file(dir / "corrupt.txt", "garbage\n").string();
  CHECK(cmd_modes(opts) == kExitUsage);
  opts.checkpoint_path = (dir / "missing.txt").string();
  CHECK(cmd_modes(opts) == kExitUsage);
}

TEST_CASE("cmd_replay: grading, reflective stats, error paths") {
  const fs::path dir = temp_dir("replay");
  const fs::path corpus = dir / "corpus.txt";
  const fs::path truth = dir / "truth.txt";

  write_file(corpus,
             "<SHORT_COT>A maid works in a motel.</SHORT_COT>\n"
             "<ANSWER>D</ANSWER>\n"
             "---\n"
             "<LONG_COT>Wait, let me verify the sum.</LONG_COT>\n"
             "<ANSWER>E</ANSWER>\n"
             "---\n"
             "<ANSWER>18.0</ANSWER>");
  write_file(truth, "D\nD\n18\n");

  CliOptions opts;
  opts.corpus_path = corpus.string();
  opts.truth_path = truth.string();
  CHECK(cmd_replay(opts) == kExitOk);

  SUBCASE("count mismatch exits 2") {
    write_file(truth, "D\nD\n");
    CHECK(cmd_replay(opts) == kExitUsage);
  }
  SUBCASE("parse error exits 2") {
    write_file(corpus, "<ANSWER>1</ANSWER>\n---\nnot a transcript\n");
    write_file(truth, "1\nX\n");
    CHECK(cmd_replay(opts) == kExitUsage);
  }
  SUBCASE("missing file exits 2") {
    opts.corpus_path = (dir / "nope.txt").string();
    CHECK(cmd_replay(opts) == kExitUsage);
  }
}

TEST_CASE("arm_lab binary end-to-end: train then modes") {
  const fs::path dir = temp_dir("spawn");
  const fs::path cfg =
      write_file(dir / "cfg.txt", tiny_config_text((dir / "out").string(), 3));

  const std::string bin = ARMLAB_BIN_PATH;
  std::string cmd = bin + " train --config " + cfg.string() + " --no-charts";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "out" / "metrics.csv"));

  cmd = bin + " modes --config " + cfg.string() + " --checkpoint " +
        (dir / "out" / "checkpoint_final.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "out" / "modes.csv"));

  cmd = bin + " init > " + (dir / "default.txt").string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const ExperimentConfig parsed = load_experiment_config((dir / "default.txt").string());
  CHECK(parsed.train.total_steps == 300);
}
