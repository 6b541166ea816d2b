// dlms_sim: diffusion (leaky) LMS network simulator.
//
//   dlms_sim run      --config exp.cfg --out results/
//   dlms_sim sweep    --config exp.cfg --param mu --grid 0.01,0.02,0.04 --out sweep/
//   dlms_sim denoise  --config speech.cfg --node 14 --out speech/
//   dlms_sim validate --config exp.cfg

#include "dlms/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Diffusion LMS / diffusion leaky LMS network simulator"};
  app.set_version_flag("--version", dlms::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string param;
  std::string grid;
  int node = 0;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", config, "experiment config file")->required();
    if (with_out) sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--seed", seed, "override run.base_seed");
  };

  auto* run = app.add_subcommand("run", "ensemble learning curves for every configured algorithm");
  add_common(run, true);

  auto* sweep = app.add_subcommand("sweep", "steady-state MSD versus mu or gamma");
  add_common(sweep, true);
  sweep->add_option("--param", param, "mu or gamma")->required()->check(CLI::IsMember({"mu", "gamma"}));
  sweep->add_option("--grid", grid, "comma-separated parameter values")->required();

  auto* denoise = app.add_subcommand("denoise", "filtered waveform at one node (delay_line source)");
  add_common(denoise, true);
  denoise->add_option("--node", node, "node number, 1-based")->required();

  auto* validate = app.add_subcommand("validate", "parse the config and print its resolved form");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dlms::kExitConfig;
  }

  if (*run) return dlms::cmd_run(config, out, seed, std::cerr);
  if (*sweep) {
    std::vector<double> values;
    try {
      values = dlms::parse_grid(grid);
    } catch (const std::exception& e) {
      std::cerr << "usage error: --grid: " << e.what() << '\n';
      return dlms::kExitConfig;
    }
    return dlms::cmd_sweep(config, param == "mu" ? dlms::SweepParam::mu : dlms::SweepParam::gamma, values, out,
                           seed, std::cerr);
  }
  if (*denoise) return dlms::cmd_denoise(config, node, out, seed, std::cerr);
  return dlms::cmd_validate(config, seed, std::cout, std::cerr);
}
