#include "mcperturb/sim.hpp"

#include <cmath>
#include <span>
#include <string>

#include "mcperturb/errors.hpp"
#include "mcperturb/rng.hpp"

namespace mcperturb {
namespace sim {

namespace {

void check_config(const SimConfig& config, int n) {
  if (config.steps < 1) throw InvalidInputError("simulation needs steps >= 1");
  if (config.replicates < 1) throw InvalidInputError("simulation needs replicates >= 1");
  if (config.thinning < 1) throw InvalidInputError("simulation needs thinning >= 1");
  if (config.burn_in < 0) throw InvalidInputError("simulation burn-in must be >= 0");
  if (config.burn_in >= config.steps) {
    throw InvalidInputError("simulation burn-in must leave at least one sample");
  }
  if (config.initial && config.initial->size() != n) {
    throw DimensionMismatchError("simulation initial distribution size differs from chain");
  }
}

SimResult run_sampler(const noisy::TargetSpec& target, const noisy::ProposalSpec& proposal,
                      const noisy::NoiseModel* noise, const Observable& f,
                      const SimConfig& config) {
  const int n = target.size();
  if (proposal.size() != n || f.size() != n) {
    throw DimensionMismatchError("simulation inputs have mismatched sizes");
  }
  if (noise && noise->size() != n) {
    throw DimensionMismatchError("noise model size differs from chain");
  }
  check_config(config, n);

  const Distribution initial = config.initial ? *config.initial : Distribution::uniform(n);
  const Matrix& q = proposal.kernel().matrix();
  const long retained_per_replicate =
      (config.steps - config.burn_in + config.thinning - 1) / config.thinning;

  SimResult result;
  result.averages.resize(config.replicates);
  result.rng_streams.resize(config.replicates);
  result.replicate_occupancy = Matrix(static_cast<int>(config.replicates), n, 0.0);
  result.occupancy.assign(n, 0.0);
  result.retained_per_replicate = retained_per_replicate;

  // Per-state atom probability vectors, flattened once for the index draws.
  std::vector<std::vector<double>> atom_probs;
  if (noise) {
    atom_probs.resize(n);
    for (int y = 0; y < n; ++y) {
      for (const noisy::NoiseAtom& a : noise->atoms_for(y)) atom_probs[y].push_back(a.prob);
    }
  }

  long accepted = 0;
  const long proposals_total = config.replicates * config.steps;

  for (long r = 0; r < config.replicates; ++r) {
    result.rng_streams[r] = static_cast<std::uint64_t>(r);
    RngStream draw(config.seed, static_cast<std::uint64_t>(r), 0);
    RngStream noise_draw(config.seed, static_cast<std::uint64_t>(r), 1);

    int x = draw.next_index(std::span<const double>(initial.weights()));
    double sum_f = 0.0;
    long kept = 0;
    for (long step = 1; step <= config.steps; ++step) {
      const std::span<const double> row(&q.data()[static_cast<std::size_t>(x) * n],
                                        static_cast<std::size_t>(n));
      const int y = draw.next_index(row);
      double ratio = noisy::acceptance_ratio(target, proposal, x, y);
      if (noise) {
        const int atom = noise_draw.next_index(std::span<const double>(atom_probs[y]));
        ratio = noisy::distorted_ratio(noise->rule(), ratio, noise->atoms_for(y)[atom].z);
      }
      const double u = draw.next_double();
      if (u < ratio) {
        x = y;
        ++accepted;
      }
      if (step > config.burn_in && (step - config.burn_in - 1) % config.thinning == 0) {
        sum_f += f[x];
        result.replicate_occupancy(static_cast<int>(r), x) += 1.0;
        ++kept;
      }
    }
    result.averages[r] = sum_f / static_cast<double>(kept);
    for (int i = 0; i < n; ++i) {
      result.replicate_occupancy(static_cast<int>(r), i) /= static_cast<double>(kept);
      result.occupancy[i] += result.replicate_occupancy(static_cast<int>(r), i);
    }
  }
  for (double& o : result.occupancy) o /= static_cast<double>(config.replicates);
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals_total);
  return result;
}

}  // namespace

SimResult run_mh(const noisy::TargetSpec& target, const noisy::ProposalSpec& proposal,
                 const Observable& f, const SimConfig& config) {
  return run_sampler(target, proposal, nullptr, f, config);
}

SimResult run_noisy_mh(const noisy::TargetSpec& target, const noisy::ProposalSpec& proposal,
                       const noisy::NoiseModel& noise, const Observable& f,
                       const SimConfig& config) {
  return run_sampler(target, proposal, &noise, f, config);
}

MseEstimate empirical_mse(const SimResult& result, double reference_mean) {
  const std::size_t r = result.averages.size();
  if (r < 2) {
    throw InsufficientReplicatesError("empirical mse needs at least two replicates, got " +
                                      std::to_string(r));
  }
  if (!std::isfinite(reference_mean)) {
    throw InvalidInputError("empirical mse: reference mean must be finite");
  }
  double mean_sq = 0.0;
  for (double avg : result.averages) {
    const double d = reference_mean - avg;
    mean_sq += d * d;
  }
  mean_sq /= static_cast<double>(r);

  // Jackknife over replicates; for a plain mean this reduces to the sample
  // standard deviation of the squared deviations divided by sqrt(r).
  double ss = 0.0;
  for (double avg : result.averages) {
    const double d = reference_mean - avg;
    const double dev = d * d - mean_sq;
    ss += dev * dev;
  }
  const double var_of_mean = ss / (static_cast<double>(r - 1) * static_cast<double>(r));
  return MseEstimate{mean_sq, std::sqrt(var_of_mean)};
}

}  // namespace sim
}  // namespace mcperturb
