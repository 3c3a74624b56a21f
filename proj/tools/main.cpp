#include <string>

#include "CLI11.hpp"
#include "mcperturb/cli.hpp"
#include "mcperturb/version.hpp"

namespace {

void add_common_flags(CLI::App* cmd, mcperturb::cli::RunManifest& manifest) {
  cmd->add_option("spec", manifest.input_path, "Input spec file (JSON)")->required();
  cmd->add_option("--out", manifest.out_path, "Output file (stdout when omitted)");
  cmd->add_option("--seed", manifest.seed, "Base seed for any randomized work");
  cmd->add_option("--max-states", manifest.max_states, "Cap on the state-space size");
  cmd->add_option("--max-horizon", manifest.max_horizon, "Cap on time horizons");
  cmd->add_option("--format", manifest.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation-bound toolkit for finite reversible Markov chains"};
  app.set_version_flag("--version",
                       std::string(mcperturb::kToolName) + " " + mcperturb::kToolVersion);
  app.require_subcommand(1);

  mcperturb::cli::RunManifest manifest;
  std::string command;

  auto* analyze = app.add_subcommand(
      "analyze", "Spectral gap, stationary law, and perturbation bounds for a chain");
  auto* verify = app.add_subcommand(
      "verify", "Check every bound against exact oracle values, row by row");
  auto* noisy = app.add_subcommand(
      "noisy", "Error analysis of a Metropolis-Hastings sampler with a noisy acceptance ratio");
  auto* simulate = app.add_subcommand(
      "simulate", "Run the sampler and report per-replicate ergodic averages");
  auto* sweep = app.add_subcommand(
      "sweep", "Stationary-gap bounds across a grid of perturbation sizes or noise scales");

  for (auto* cmd : {analyze, verify, noisy, simulate, sweep}) {
    add_common_flags(cmd, manifest);
    cmd->callback([&command, cmd] { command = cmd->get_name(); });
  }

  CLI11_PARSE(app, argc, argv);
  return mcperturb::cli::run(command, manifest);
}
