// Command-line front end: synth, prepare, train, score, compare.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mtad/pipeline/commands.hpp"

namespace {

struct Args {
  mtad::pipeline::CommandLine cli;
  std::string out;
};

void add_common(CLI::App* cmd, Args& a, bool with_input) {
  cmd->add_option("--config", a.cli.config, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", a.cli.assignments, "override one config key (key=value); repeatable");
  cmd->add_option("--seed", a.cli.seed, "root seed");
  cmd->add_option("--out", a.out, "output directory")->required();
  if (with_input) cmd->add_option("--input", a.cli.inputs, "input directory; repeatable for compare");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-task anomaly detection for driving telemetry"};
  app.require_subcommand(1);
  Args a;

  auto* synth = app.add_subcommand("synth", "generate synthetic labeled traces");
  add_common(synth, a, false);

  auto* prepare = app.add_subcommand("prepare", "downsample, segment, filter, split and scale traces");
  add_common(prepare, a, true);
  prepare->add_option("--exclude-label", a.cli.exclude_label, "drop windows with this majority maneuver from train");

  auto* train = app.add_subcommand("train", "train one model variant on a prepared store");
  add_common(train, a, true);
  train->add_option("--variant", a.cli.variant, "multitask, baseline_ae, ensemble or symbol_only");
  train->add_flag("--paper-scale", a.cli.paper_scale, "hidden 256, 300 epochs, minibatch 512, lr 0.01, eps 0.01");

  auto* score = app.add_subcommand("score", "fit error models and score the test windows");
  add_common(score, a, true);

  auto* compare = app.add_subcommand("compare", "loss and detection tables across trained runs");
  add_common(compare, a, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto kv = mtad::pipeline::build_config(a.cli);
    const auto rc = mtad::pipeline::RunConfig::from_kv(kv);
    mtad::pipeline::run_command(command, rc, a.out);
  } catch (const std::exception& e) {
    std::cerr << "mtad " << command << ": " << e.what() << "\n";
    return mtad::pipeline::exit_code(e);
  }
  return 0;
}
