#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcperturb/chain.hpp"
#include "mcperturb/linalg.hpp"
#include "mcperturb/noisy_mh.hpp"

namespace mcperturb {
namespace sim {

struct SimConfig {
  long steps = 1;
  long replicates = 1;
  std::uint64_t seed = 0;
  // Law of the start state; uniform when unset.
  std::optional<Distribution> initial;
  long thinning = 1;
  // Leading samples to drop per replicate. Zero by default: the error bounds
  // being verified include burn-in bias, so discarding is opt-in.
  long burn_in = 0;
};

struct SimResult {
  // Ergodic average of the observable over retained samples, per replicate.
  std::vector<double> averages;
  // Stream id fed to the generator for each replicate.
  std::vector<std::uint64_t> rng_streams;
  // Fraction of retained samples spent in each state, per replicate.
  Matrix replicate_occupancy;
  // Same, pooled across replicates; sums to one.
  std::vector<double> occupancy;
  double acceptance_rate = 0.0;
  long retained_per_replicate = 0;
};

// Runs the accept/reject sampler literally: per step draw a proposal from
// q(x, .), draw a uniform, compare against the acceptance ratio. Replicate r
// draws from streams derived from (seed, r), so any execution order gives
// identical output.
SimResult run_mh(const noisy::TargetSpec& target, const noisy::ProposalSpec& proposal,
                 const Observable& f, const SimConfig& config);

// Same loop, but each proposal additionally draws a noise atom for the
// proposed state and the comparison uses the distorted ratio. The noise draw
// uses a separate substream, so a degenerate noise model replays run_mh
// exactly.
SimResult run_noisy_mh(const noisy::TargetSpec& target, const noisy::ProposalSpec& proposal,
                       const noisy::NoiseModel& noise, const Observable& f,
                       const SimConfig& config);

struct MseEstimate {
  double mse = 0.0;
  double std_error = 0.0;  // jackknife standard error over replicates
};

// Mean over replicates of (reference_mean - average)^2 with its jackknife
// standard error. Needs at least two replicates.
MseEstimate empirical_mse(const SimResult& result, double reference_mean);

}  // namespace sim
}  // namespace mcperturb
