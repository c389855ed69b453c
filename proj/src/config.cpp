#include "armlab/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace armlab {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) parts.push_back(tok);
  return parts;
}

double parse_double(const std::string& v, int line, const std::string& key) {
  const char* b = v.c_str();
  char* e = nullptr;
  const double x = std::strtod(b, &e);
  if (e != b + v.size() || v.empty())
    throw ConfigError("expected a number, got '" + v + "'", line, key);
  return x;
}

int64_t parse_int(const std::string& v, int line, const std::string& key) {
  int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'", line, key);
  return x;
}

uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("expected an unsigned integer, got '" + v + "'", line, key);
  return x;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("expected true/false, got '" + v + "'", line, key);
}

void parse_row4(const std::string& v, int line, const std::string& key,
                std::array<double, kFormatCount>& row) {
  const auto parts = split_ws(v);
  if (parts.size() != kFormatCount)
    throw ConfigError("expected 4 values (direct short_cot code long_cot)", line, key);
  for (int i = 0; i < kFormatCount; ++i) row[i] = parse_double(parts[i], line, key);
}

int difficulty_from_suffix(const std::string& suffix, int line, const std::string& key) {
  for (auto d : kAllDifficulties)
    if (suffix == difficulty_name(d)) return difficulty_index(d);
  throw ConfigError("unknown difficulty '" + suffix + "'", line, key);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", line_no, line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no, key);

    if (key == "train.mode") {
      if (value == "ada_grpo") cfg.train.mode = ShapingMode::AdaGrpo;
      else if (value == "grpo") cfg.train.mode = ShapingMode::Grpo;
      else throw ConfigError("mode must be ada_grpo or grpo", line_no, key);
    } else if (key == "train.group_size") {
      cfg.train.group_size = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "train.total_steps") {
      cfg.train.total_steps = parse_int(value, line_no, key);
    } else if (key == "train.tasks_per_step") {
      cfg.train.tasks_per_step = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "train.minibatches_per_step") {
      cfg.train.minibatches_per_step = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "train.learning_rate") {
      cfg.train.learning_rate = parse_double(value, line_no, key);
    } else if (key == "train.clip_epsilon") {
      cfg.train.clip_epsilon = parse_double(value, line_no, key);
    } else if (key == "train.kl_coefficient") {
      cfg.train.kl_coefficient = parse_double(value, line_no, key);
    } else if (key == "train.decay_enabled") {
      cfg.train.decay_enabled = parse_bool(value, line_no, key);
    } else if (key == "train.checkpoint_interval") {
      cfg.train.checkpoint_interval = parse_int(value, line_no, key);
    } else if (key == "train.seed") {
      cfg.train.seed = parse_u64(value, line_no, key);
    } else if (key.rfind("env.accuracy.", 0) == 0) {
      const int d = difficulty_from_suffix(key.substr(13), line_no, key);
      parse_row4(value, line_no, key, cfg.train.env.accuracy[d]);
    } else if (key.rfind("env.token_mean.", 0) == 0) {
      const int d = difficulty_from_suffix(key.substr(15), line_no, key);
      parse_row4(value, line_no, key, cfg.train.env.token_mean[d]);
    } else if (key == "env.token_jitter") {
      cfg.train.env.token_jitter = parse_double(value, line_no, key);
    } else if (key == "env.difficulty_mix") {
      const auto parts = split_ws(value);
      if (parts.size() != kDifficultyCount)
        throw ConfigError("expected 3 values (easy medium hard)", line_no, key);
      for (int i = 0; i < kDifficultyCount; ++i)
        cfg.train.env.difficulty_mix[i] = parse_double(parts[i], line_no, key);
    } else if (key == "env.answer_space") {
      cfg.train.env.answer_space = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "env.seed") {
      cfg.train.env.seed = parse_u64(value, line_no, key);
    } else if (key == "eval.n_tasks") {
      cfg.eval.n_tasks = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "eval.eval_seed") {
      cfg.eval.eval_seed = parse_u64(value, line_no, key);
    } else if (key == "eval.eval_interval") {
      cfg.eval.eval_interval = parse_int(value, line_no, key);
    } else if (key == "output_dir") {
      if (value.empty()) throw ConfigError("output_dir must be nonempty", line_no, key);
      cfg.output_dir = value;
    } else if (key == "emit_charts") {
      cfg.emit_charts = parse_bool(value, line_no, key);
    } else {
      throw ConfigError("unknown key", line_no, key);
    }
  }

  try {
    validate(cfg.train);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0, "");
  }
  if (cfg.eval.n_tasks < 1)
    throw ConfigError("eval.n_tasks must be >= 1", 0, "eval.n_tasks");
  if (cfg.eval.eval_interval < 1)
    throw ConfigError("eval.eval_interval must be >= 1", 0, "eval.eval_interval");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path, 0, "");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

std::string default_config_text() {
  const ExperimentConfig d;
  std::ostringstream out;
  out << "# arm_lab experiment configuration\n"
      << "\n"
      << "train.mode = ada_grpo            # ada_grpo | grpo\n"
      << "train.group_size = " << d.train.group_size << "               # rollouts per task (G)\n"
      << "train.total_steps = " << d.train.total_steps << "            # optimizer steps (T)\n"
      << "train.tasks_per_step = " << d.train.tasks_per_step << "          # tasks per optimizer step\n"
      << "train.minibatches_per_step = " << d.train.minibatches_per_step << "     # must divide tasks_per_step\n"
      << "train.learning_rate = " << d.train.learning_rate << "         # logit-space step size\n"
      << "train.clip_epsilon = " << d.train.clip_epsilon << "          # surrogate clip range\n"
      << "train.kl_coefficient = " << d.train.kl_coefficient << "      # KL penalty weight (beta)\n"
      << "train.decay_enabled = true       # anneal the diversity scale\n"
      << "train.checkpoint_interval = " << d.train.checkpoint_interval << "     # steps between checkpoints\n"
      << "train.seed = " << d.train.seed << "\n"
      << "\n"
      << "# probability of a correct answer, per difficulty row\n"
      << "# columns: direct short_cot code long_cot\n"
      << "env.accuracy.easy = 0.83 0.79 0.83 0.86\n"
      << "env.accuracy.medium = 0.35 0.73 0.74 0.83\n"
      << "env.accuracy.hard = 0.00 0.10 0.10 0.20\n"
      << "# mean response length, in tokens\n"
      << "env.token_mean.easy = 10 34 144 277\n"
      << "env.token_mean.medium = 14 231 343 662\n"
      << "env.token_mean.hard = 12 2010 1821 4130\n"
      << "env.token_jitter = 0.1           # fraction of token_mean\n"
      << "env.difficulty_mix = 0.4 0.5 0.1 # easy medium hard\n"
      << "env.answer_space = 26            # answer alphabet size per task\n"
      << "env.seed = 0\n"
      << "\n"
      << "eval.n_tasks = " << d.eval.n_tasks << "             # held-out tasks per evaluation\n"
      << "eval.eval_seed = " << d.eval.eval_seed << "\n"
      << "eval.eval_interval = " << d.eval.eval_interval << "          # steps between ablation evals\n"
      << "\n"
      << "output_dir = out\n"
      << "emit_charts = true\n";
  return out.str();
}

}  // namespace armlab
