// arm_lab: batch experiments for adaptive reasoning-format selection.
//
// Subcommands: train, compare, ablate, modes, replay, init.

#include <CLI11.hpp>

#include <iostream>

#include "armlab/cli.hpp"
#include "armlab/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adaptive reasoning-format RL lab"};
  app.require_subcommand(1);

  armlab::CliOptions opts;
  std::string out_dir_flag;
  uint64_t seed_flag = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config file");
    if (needs_config) c->required();
    cmd->add_option("--out", out_dir_flag, "output directory (ARM_LAB_OUT wins)");
    cmd->add_option("--seed", seed_flag, "override train.seed");
    cmd->add_flag("--no-charts", opts.no_charts, "skip chart emission");
  };

  auto* train_cmd = app.add_subcommand("train", "train one policy, write metrics/checkpoints");
  add_common(train_cmd, true);
  auto* compare_cmd =
      app.add_subcommand("compare", "train the config's mode vs the other mode, write ratios");
  add_common(compare_cmd, true);
  auto* ablate_cmd =
      app.add_subcommand("ablate", "decay on/off ablation with held-out evals");
  add_common(ablate_cmd, true);
  auto* modes_cmd =
      app.add_subcommand("modes", "per-mode accuracy/token report for a checkpoint");
  add_common(modes_cmd, true);
  modes_cmd->add_option("--checkpoint", opts.checkpoint_path, "policy checkpoint")
      ->required();
  auto* replay_cmd =
      app.add_subcommand("replay", "grade a transcript corpus against a truth file");
  replay_cmd->add_option("corpus", opts.corpus_path, "transcript corpus, records separated by ---")
      ->required();
  replay_cmd->add_option("truth", opts.truth_path, "one ground-truth answer per record")
      ->required();
  auto* init_cmd = app.add_subcommand("init", "print a default config file to stdout");

  CLI11_PARSE(app, argc, argv);

  for (auto* cmd : {train_cmd, compare_cmd, ablate_cmd, modes_cmd}) {
    if (cmd->parsed()) {
      if (cmd->count("--out")) opts.out_dir = out_dir_flag;
      if (cmd->count("--seed")) opts.seed_override = seed_flag;
    }
  }

  if (train_cmd->parsed()) return armlab::cmd_train(opts);
  if (compare_cmd->parsed()) return armlab::cmd_compare(opts);
  if (ablate_cmd->parsed()) return armlab::cmd_ablate(opts);
  if (modes_cmd->parsed()) return armlab::cmd_modes(opts);
  if (replay_cmd->parsed()) return armlab::cmd_replay(opts);
  if (init_cmd->parsed()) {
    std::cout << armlab::default_config_text();
    return armlab::kExitOk;
  }
  return armlab::kExitUsage;
}
