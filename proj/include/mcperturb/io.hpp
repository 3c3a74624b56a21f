#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcperturb/chain.hpp"
#include "mcperturb/noisy_mh.hpp"

namespace mcperturb {
namespace io {

// Reals in spec files may be JSON numbers or decimal strings (so that
// documents can carry exact decimal text like "0.1").
double parse_real(const nlohmann::json& v);

// Chain document: a kernel, optionally a perturbed companion, a start law,
// observables, and the horizon grid used by the report commands.
struct ChainSpec {
  StateSpace space;
  TransitionKernel kernel;
  std::optional<TransitionKernel> perturbed;
  std::optional<Distribution> initial;
  std::vector<Observable> observables;
  std::vector<long> horizons;
};

ChainSpec parse_chain_spec(const nlohmann::json& doc);
ChainSpec load_chain_spec(const std::string& path);

// Sampler document: target weights, proposal kernel, optional noise model,
// plus simulation controls.
struct NoisySpec {
  noisy::TargetSpec target;
  noisy::ProposalSpec proposal;
  std::optional<noisy::NoiseModel> noise;
  std::optional<Distribution> initial;
  std::optional<Observable> observable;
  std::vector<long> horizons;
  long steps = 1000;
  long replicates = 100;
  long thinning = 1;
  long burn_in = 0;
};

NoisySpec parse_noisy_spec(const nlohmann::json& doc);
NoisySpec load_noisy_spec(const std::string& path);

// Sweep document, one of two shapes:
//   mode "epsilon": fixed alpha (given directly or via a kernel) against a
//   grid of epsilon values; an optional perturbed kernel adds the observed
//   stationary gap column.
//   mode "noise": a sampler spec whose noise amplitudes are scaled through a
//   grid, each scale contributing its operator-level epsilon.
struct SweepSpec {
  enum class Mode { epsilon, noise };
  Mode mode = Mode::epsilon;
  std::optional<ChainSpec> chain;
  std::optional<double> alpha;
  std::vector<double> epsilons;
  std::optional<NoisySpec> noisy;
  std::vector<double> scales;
};

SweepSpec parse_sweep_spec(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::string& path);

nlohmann::json load_json(const std::string& path);

// Shortest round-trip decimal text for a double; locale-independent, so CSV
// output is byte-stable across runs and machines.
std::string format_double(double v);

// One CSV line from preformatted cells (joins with commas, appends newline).
std::string csv_row(const std::vector<std::string>& cells);

// The trailing comment line carried by every CSV report.
std::string csv_metadata(std::uint64_t seed, int max_states, long max_horizon);

// Batch bound evaluation: {"jobs": [{"formula": name, "inputs": {...}}]}
// becomes one CSV row per job: formula, echoed inputs, value, applicable.
std::string bounds_batch_csv(const nlohmann::json& doc);

// Writes to the path, or to stdout when the path is empty.
void write_output(const std::string& path, const std::string& content);

}  // namespace io
}  // namespace mcperturb
