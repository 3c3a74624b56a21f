#include "mcperturb/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcperturb/bounds.hpp"
#include "mcperturb/chain.hpp"
#include "mcperturb/errors.hpp"
#include "mcperturb/io.hpp"
#include "mcperturb/noisy_mh.hpp"
#include "mcperturb/norms.hpp"
#include "mcperturb/oracle.hpp"
#include "mcperturb/sim.hpp"
#include "mcperturb/spectral.hpp"
#include "mcperturb/version.hpp"

namespace mcperturb {
namespace cli {

namespace {

using nlohmann::json;

// Slack below this is a genuine domination failure, not rounding.
constexpr double kDominationSlack = -1e-9;

void validate_manifest(const RunManifest& m) {
  if (m.input_path.empty()) throw SpecParseError("no input file given");
  if (m.max_states < 2 || m.max_states > oracle::kMaxStates) {
    throw ResourceLimitError("--max-states must lie in [2, " +
                             std::to_string(oracle::kMaxStates) + "]");
  }
  if (m.max_horizon < 1 || m.max_horizon > oracle::kMaxHorizon) {
    throw ResourceLimitError("--max-horizon must lie in [1, " +
                             std::to_string(oracle::kMaxHorizon) + "]");
  }
  if (!m.format.empty() && m.format != "csv" && m.format != "json") {
    throw SpecParseError("--format must be 'csv' or 'json'");
  }
}

std::string resolve_format(const RunManifest& m, const char* native) {
  return m.format.empty() ? native : m.format;
}

void enforce_size(int n, const RunManifest& m) {
  if (n > m.max_states) {
    throw ResourceLimitError("chain has " + std::to_string(n) + " states, cap is " +
                             std::to_string(m.max_states));
  }
}

void enforce_horizons(const std::vector<long>& horizons, const RunManifest& m) {
  for (long h : horizons) {
    if (h < 1 || h > m.max_horizon) {
      throw ResourceLimitError("horizon " + std::to_string(h) + " outside [1, " +
                               std::to_string(m.max_horizon) + "]");
    }
  }
}

Distribution initial_or_uniform(const std::optional<Distribution>& initial, int n) {
  if (!initial) return Distribution::uniform(n);
  if (initial->size() != n) {
    throw DimensionMismatchError("initial distribution size differs from chain");
  }
  return *initial;
}

std::string cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

json json_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json bound_json(const bounds::BoundResult& r) {
  json j;
  j["applicable"] = r.applicable;
  j["value"] = json_number(r.value);
  return j;
}

// key,value flattening of a JSON report, for the CSV rendering of the two
// report-style commands. Object keys are already sorted, so the output is
// stable.
void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    int i = 0;
    for (const json& value : j) flatten(value, prefix + "[" + std::to_string(i++) + "]", out);
  } else if (j.is_number_float()) {
    out.emplace_back(prefix, io::format_double(j.get<double>()));
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? "true" : "false");
  } else if (j.is_null()) {
    out.emplace_back(prefix, "");
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

void emit_report(const json& doc, const RunManifest& m) {
  if (resolve_format(m, "json") == "json") {
    io::write_output(m.out_path, doc.dump(2) + "\n");
    return;
  }
  std::vector<std::pair<std::string, std::string>> kv;
  flatten(doc, "", kv);
  std::string out = io::csv_row({"key", "value"});
  for (const auto& [key, value] : kv) out += io::csv_row({key, value});
  out += io::csv_metadata(m.seed, m.max_states, m.max_horizon);
  io::write_output(m.out_path, out);
}

double measure_l2(const SignedMeasure& nu, const Distribution& pi) {
  return weighted_norms(nu, pi).l2;
}

}  // namespace

int cmd_analyze(const RunManifest& m) {
  validate_manifest(m);
  io::ChainSpec spec = io::load_chain_spec(m.input_path);
  enforce_size(spec.space.size(), m);
  const TransitionKernel& p = spec.kernel;
  const Distribution pi = stationary_distribution(p);
  const ReversibilityReport rev = check_reversibility(p, pi);
  const spectral::SpectralReport sr = spectral::spectral_gap(p, pi);

  json doc;
  doc["states"] = p.size();
  doc["pi"] = pi.weights();
  doc["alpha"] = sr.alpha;
  doc["rho"] = sr.rho;
  doc["eigenvalues"] = sr.eigenvalues;
  doc["reversible"] = rev.reversible;
  doc["reversibility_violation"] = rev.max_violation;

  bool applicable = true;
  if (spec.perturbed) {
    const spectral::OperatorNormReport eps_report =
        spectral::operator_norm(spec.perturbed->matrix() - p.matrix(), pi);
    const double epsilon = eps_report.full_norm;
    applicable = epsilon < sr.alpha;

    const bounds::StationaryNormBounds nb = bounds::stationary_norm_bounds(sr.alpha, epsilon);
    const bounds::StationaryGapBounds gb = bounds::stationary_gap_bounds(sr.alpha, epsilon);
    const oracle::StationaryGapReport orc = oracle::exact_stationary_gap(p, *spec.perturbed);

    json sec;
    sec["epsilon"] = epsilon;
    sec["epsilon_restricted"] = eps_report.restricted_norm;
    sec["applicable"] = applicable;
    sec["stationary_norm_coarse"] = bound_json(nb.coarse);
    sec["stationary_norm_sharp"] = bound_json(nb.sharp);
    sec["stationary_gap_b0"] = bound_json(gb.b0);
    sec["stationary_gap_b1"] = bound_json(gb.b1);
    sec["stationary_gap_b2"] = bound_json(gb.b2);
    sec["pi_perturbed"] = orc.pi_eps.weights();
    sec["oracle_gap_l2"] = orc.l2;
    sec["oracle_gap_l1"] = orc.l1;
    sec["oracle_gap_tv"] = orc.tv;
    sec["oracle_perturbed_norm"] =
        measure_l2(SignedMeasure(orc.pi_eps.weights()), pi);
    doc["perturbation"] = sec;
  }

  emit_report(doc, m);
  return applicable ? kExitOk : kExitNothingApplicable;
}

namespace {

struct VerifyRow {
  std::string quantity;
  std::optional<double> bound;
  std::optional<double> oracle;
  bool gated = true;  // false marks the row not-applicable regardless of values
};

std::string verify_pass(const VerifyRow& r, std::optional<double>& slack) {
  if (!r.gated || !r.bound || !r.oracle) return "na";
  slack = *r.bound - *r.oracle;
  return *slack >= kDominationSlack ? "pass" : "fail";
}

// Expectation of f at every step 0..maxt of the chain started at mu.
std::vector<Distribution> pushforward_laws(const Distribution& mu, const TransitionKernel& p,
                                           long maxt) {
  std::vector<Distribution> laws;
  laws.reserve(static_cast<std::size_t>(maxt) + 1);
  laws.push_back(mu);
  for (long k = 0; k < maxt; ++k) laws.push_back(step(laws.back(), p));
  return laws;
}

}  // namespace

int cmd_verify(const RunManifest& m) {
  validate_manifest(m);
  io::ChainSpec spec = io::load_chain_spec(m.input_path);
  enforce_size(spec.space.size(), m);
  enforce_horizons(spec.horizons, m);
  const TransitionKernel& p = spec.kernel;
  const int n = p.size();
  for (const Observable& f : spec.observables) {
    if (f.size() != n) throw DimensionMismatchError("observable size differs from chain");
  }

  const Distribution pi = stationary_distribution(p);
  const spectral::SpectralReport sr = spectral::spectral_gap(p, pi);
  const double alpha = sr.alpha;
  const Distribution mu = initial_or_uniform(spec.initial, n);
  const double dist_mu_pi = measure_l2(SignedMeasure(mu, pi), pi);

  const bool has_perturbed = spec.perturbed.has_value();
  double eps_pi = 0.0;      // pi-weighted operator norm of the kernel difference
  double eps_mixed = 0.0;   // max of the pi- and pi_eps-weighted norms
  bool app_pi = false;      // perturbation small enough in the pi geometry
  bool app_eps = false;     // ... and in the perturbed geometry
  bool pe_reversible = false;
  std::optional<oracle::StationaryGapReport> orc_gap;
  double dist_mu_pieps_pi = 0.0;   // ||mu - pi_eps|| under pi
  double dist_mu_pieps_eps = 0.0;  // ||mu - pi_eps|| under pi_eps
  if (has_perturbed) {
    const TransitionKernel& pe = *spec.perturbed;
    if (pe.size() != n) throw DimensionMismatchError("perturbed kernel size differs from chain");
    const Matrix diff = pe.matrix() - p.matrix();
    orc_gap = oracle::exact_stationary_gap(p, pe);
    eps_pi = spectral::operator_norm(diff, pi).full_norm;
    eps_mixed = std::max(eps_pi, spectral::operator_norm(diff, orc_gap->pi_eps).full_norm);
    app_pi = eps_pi < alpha;
    app_eps = eps_mixed < alpha;
    pe_reversible = check_reversibility(pe, orc_gap->pi_eps).reversible;
    dist_mu_pieps_pi = measure_l2(SignedMeasure(mu, orc_gap->pi_eps), pi);
    dist_mu_pieps_eps = measure_l2(SignedMeasure(mu, orc_gap->pi_eps), orc_gap->pi_eps);
  }

  std::vector<VerifyRow> rows;
  const bool have_horizons = !spec.horizons.empty();

  if (have_horizons && has_perturbed) {
    const bounds::StationaryNormBounds nb = bounds::stationary_norm_bounds(alpha, eps_pi);
    const double pieps_norm = measure_l2(SignedMeasure(orc_gap->pi_eps.weights()), pi);
    rows.push_back({"stationary_norm_coarse", nb.coarse.value, pieps_norm, nb.coarse.applicable});
    rows.push_back({"stationary_norm_sharp", nb.sharp.value, pieps_norm, nb.sharp.applicable});
    const bounds::StationaryGapBounds gb = bounds::stationary_gap_bounds(alpha, eps_pi);
    rows.push_back({"stationary_gap_b1", gb.b1.value, orc_gap->l2, gb.b1.applicable});
    rows.push_back({"stationary_gap_b2", gb.b2.value, orc_gap->l2, gb.b2.applicable});
  }

  for (long h : spec.horizons) {
    const Distribution mu_h = oracle::exact_pushforward(mu, p, h);
    const double bound = std::pow(1.0 - alpha, static_cast<double>(h)) * dist_mu_pi;
    rows.push_back({"contraction_exact n=" + std::to_string(h), bound,
                    measure_l2(SignedMeasure(mu_h, pi), pi), true});
  }
  if (has_perturbed) {
    for (long h : spec.horizons) {
      const Distribution mue_h = oracle::exact_pushforward(mu, *spec.perturbed, h);
      std::optional<double> bound;
      if (app_pi) {
        bound = std::pow(1.0 - (alpha - eps_pi), static_cast<double>(h)) * dist_mu_pieps_pi;
      }
      rows.push_back({"contraction_perturbed n=" + std::to_string(h), bound,
                      measure_l2(SignedMeasure(mue_h, orc_gap->pi_eps), pi), app_pi});
      const bounds::BoundResult ft =
          bounds::finite_time_l2_bound(alpha, eps_pi, h, dist_mu_pieps_pi);
      rows.push_back({"finite_time n=" + std::to_string(h), ft.value,
                      measure_l2(SignedMeasure(mue_h, pi), pi), ft.applicable});
    }
  }

  for (long t : spec.horizons) {
    const bounds::BoundResult b = bounds::cesaro_bound(alpha, 0.0, t, dist_mu_pi);
    rows.push_back({"cesaro_exact t=" + std::to_string(t), b.value,
                    oracle::exact_cesaro_error(mu, p, pi, t), b.applicable});
  }
  if (has_perturbed) {
    for (long t : spec.horizons) {
      const bounds::BoundResult b = bounds::cesaro_bound(alpha, eps_pi, t, dist_mu_pieps_pi);
      rows.push_back({"cesaro_perturbed t=" + std::to_string(t), b.value,
                      oracle::exact_cesaro_error(mu, *spec.perturbed, pi, t), b.applicable});
    }
  }

  // Observable norms under each geometry, centered at the matching mean.
  const int nobs = static_cast<int>(spec.observables.size());
  std::vector<NormReport> norms_pi, norms_eps;
  for (const Observable& f : spec.observables) {
    norms_pi.push_back(weighted_norms(f, pi, true));
    if (has_perturbed) norms_eps.push_back(weighted_norms(f, orc_gap->pi_eps, true));
  }

  for (int i = 0; i < nobs; ++i) {
    for (int j = i; j < nobs; ++j) {
      const std::string pair_tag = " f=" + std::to_string(i) + " g=" + std::to_string(j);
      for (long s : spec.horizons) {
        const bounds::BoundResult b = bounds::covariance_bound_stationary(
            1.0 - alpha, s, *norms_pi[i].star, *norms_pi[j].star);
        const double cov = oracle::exact_covariance(spec.observables[i], spec.observables[j],
                                                    pi, p, 0, s);
        rows.push_back({"cov_stationary" + pair_tag + " s=" + std::to_string(s), b.value,
                        std::abs(cov), b.applicable});
      }
      if (has_perturbed) {
        const bool gate = app_eps && pe_reversible;
        for (long s : spec.horizons) {
          std::optional<double> bound;
          if (gate) {
            bound = bounds::covariance_bound_stationary(1.0 - (alpha - eps_mixed), s,
                                                        *norms_eps[i].star, *norms_eps[j].star)
                        .value;
          }
          const double cov = oracle::exact_covariance(
              spec.observables[i], spec.observables[j], orc_gap->pi_eps, *spec.perturbed, 0, s);
          rows.push_back({"cov_stationary_perturbed" + pair_tag + " s=" + std::to_string(s),
                          bound, std::abs(cov), gate});
        }
      }
    }
  }

  // Nonstationary covariance rows need the time-t means of every observable.
  long max_lag = 0;
  for (long t : spec.horizons) {
    for (long s : spec.horizons) {
      if (t + s <= m.max_horizon) max_lag = std::max(max_lag, t + s);
    }
  }
  if (nobs > 0 && max_lag > 0) {
    const std::vector<Distribution> laws = pushforward_laws(mu, p, max_lag);
    for (int i = 0; i < nobs; ++i) {
      const double mean_i = expectation(pi, spec.observables[i]);
      for (int j = i; j < nobs; ++j) {
        const double mean_j = expectation(pi, spec.observables[j]);
        const std::string pair_tag = " f=" + std::to_string(i) + " g=" + std::to_string(j);
        for (long t : spec.horizons) {
          for (long s : spec.horizons) {
            if (t + s > m.max_horizon) continue;
            const double bias_f = expectation(laws[t], spec.observables[i]) - mean_i;
            const double bias_g = expectation(laws[t + s], spec.observables[j]) - mean_j;
            const bounds::BoundResult b = bounds::covariance_bound_nonstationary(
                1.0 - alpha, t, s, *norms_pi[i].star, *norms_pi[j].star,
                *norms_pi[i].starstar, *norms_pi[j].starstar, dist_mu_pi, bias_f, bias_g);
            const double cov = oracle::exact_covariance(spec.observables[i],
                                                        spec.observables[j], mu, p, t, s);
            rows.push_back({"cov_nonstationary" + pair_tag + " t=" + std::to_string(t) +
                                " s=" + std::to_string(s),
                            b.value, cov, b.applicable});
          }
        }
      }
    }
  }

  // Averaged-covariance and MSE rows, exact chain then perturbed chain.
  if (nobs > 0 && have_horizons) {
    const long max_t = *std::max_element(spec.horizons.begin(), spec.horizons.end());
    const std::vector<Distribution> laws = pushforward_laws(mu, p, max_t);
    std::vector<Distribution> laws_eps;
    if (has_perturbed) laws_eps = pushforward_laws(mu, *spec.perturbed, max_t);
    for (int i = 0; i < nobs; ++i) {
      const Observable& f = spec.observables[i];
      const double mean_pi = expectation(pi, f);
      const std::string tag_f = " f=" + std::to_string(i);
      for (long t : spec.horizons) {
        double running = 0.0;
        for (long k = 0; k < t; ++k) running += expectation(laws[k], f);
        const double cesaro_bias = running / static_cast<double>(t) - mean_pi;
        const bounds::BoundResult cs = bounds::covariance_sum_bound(
            alpha, t, *norms_pi[i].star, *norms_pi[i].starstar, dist_mu_pi, cesaro_bias);
        rows.push_back({"cov_sum_exact" + tag_f + " t=" + std::to_string(t), cs.value,
                        oracle::exact_covariance_double_sum(f, mu, p, t), cs.applicable});
        const bounds::BoundResult me =
            bounds::mse_bound_exact(alpha, t, *norms_pi[i].star, *norms_pi[i].starstar,
                                    dist_mu_pi);
        rows.push_back({"mse_exact" + tag_f + " t=" + std::to_string(t), me.value,
                        oracle::exact_mse(f, mu, p, t, mean_pi), me.applicable});
      }
      if (has_perturbed) {
        const double mean_eps = expectation(orc_gap->pi_eps, f);
        const bool gate = app_eps && pe_reversible;
        for (long t : spec.horizons) {
          double running = 0.0;
          for (long k = 0; k < t; ++k) running += expectation(laws_eps[k], f);
          const double cesaro_bias_eps = running / static_cast<double>(t) - mean_eps;
          std::optional<double> cs_bound;
          if (gate) {
            cs_bound = bounds::covariance_sum_bound(alpha - eps_mixed, t, *norms_eps[i].star,
                                                    *norms_eps[i].starstar, dist_mu_pieps_eps,
                                                    cesaro_bias_eps)
                           .value;
          }
          rows.push_back({"cov_sum_perturbed" + tag_f + " t=" + std::to_string(t), cs_bound,
                          oracle::exact_covariance_double_sum(f, mu, *spec.perturbed, t),
                          gate});
          std::optional<double> mse_bound;
          if (gate) {
            mse_bound = bounds::mse_bound_perturbed(alpha, eps_mixed, t, *norms_eps[i].star,
                                                    *norms_eps[i].starstar, dist_mu_pieps_eps)
                            .best;
          }
          rows.push_back({"mse_perturbed" + tag_f + " t=" + std::to_string(t), mse_bound,
                          oracle::exact_mse(f, mu, *spec.perturbed, t, mean_pi), gate});
        }
      }
    }
  }

  bool any_fail = false;
  const std::string format = resolve_format(m, "csv");
  if (format == "csv") {
    std::string out = io::csv_row({"quantity", "bound", "oracle", "slack", "pass"});
    for (const VerifyRow& r : rows) {
      std::optional<double> slack;
      const std::string verdict = verify_pass(r, slack);
      any_fail = any_fail || verdict == "fail";
      out += io::csv_row({r.quantity, cell(r.bound), cell(r.oracle), cell(slack), verdict});
    }
    out += io::csv_metadata(m.seed, m.max_states, m.max_horizon);
    io::write_output(m.out_path, out);
  } else {
    json doc;
    doc["rows"] = json::array();
    for (const VerifyRow& r : rows) {
      std::optional<double> slack;
      const std::string verdict = verify_pass(r, slack);
      any_fail = any_fail || verdict == "fail";
      json row;
      row["quantity"] = r.quantity;
      row["bound"] = json_number(r.bound);
      row["oracle"] = json_number(r.oracle);
      row["slack"] = json_number(slack);
      row["pass"] = verdict;
      doc["rows"].push_back(row);
    }
    io::write_output(m.out_path, doc.dump(2) + "\n");
  }
  return any_fail ? kExitDominationFailure : kExitOk;
}

int cmd_noisy(const RunManifest& m) {
  validate_manifest(m);
  io::NoisySpec spec = io::load_noisy_spec(m.input_path);
  const int n = spec.target.size();
  enforce_size(n, m);
  enforce_horizons(spec.horizons, m);

  const noisy::NoiseModel noise =
      spec.noise ? *spec.noise : noisy::NoiseModel::noiseless(n);
  const noisy::NoisyAnalysis an = noisy::analyze_noise(spec.target, spec.proposal, noise);
  const Distribution pi = spec.target.normalized();
  const spectral::SpectralReport sr = spectral::spectral_gap(an.p, pi);
  const noisy::NoisyOperatorBound ob = noisy::noisy_operator_bound(an, pi);
  const Distribution pi_hat = oracle::stationary_dense(an.p_hat);
  const Distribution mu = initial_or_uniform(spec.initial, n);
  const double dist_mu = measure_l2(SignedMeasure(pi_hat, mu), pi);
  const bool applicable = ob.epsilon_bound < sr.alpha;

  json doc;
  doc["states"] = n;
  doc["noise_rule"] = noisy::rule_name(noise.rule());
  doc["alpha"] = sr.alpha;
  doc["delta_sup"] = an.delta_sup;
  doc["q_norm"] = ob.q_norm;
  doc["epsilon_bound"] = ob.epsilon_bound;
  doc["epsilon_actual"] = ob.epsilon_actual;
  doc["margin"] = sr.alpha - ob.epsilon_bound;
  doc["applicable"] = applicable;
  doc["decomposition_residual"] = an.decomposition_residual;
  doc["p_hat_reversible"] =
      an.p_hat_reversible ? json(*an.p_hat_reversible) : json(nullptr);
  doc["p_hat_reversibility_violation"] = an.p_hat_reversibility_violation;
  doc["pi"] = pi.weights();
  doc["pi_hat"] = pi_hat.weights();
  doc["dist_mu"] = dist_mu;
  json curve = json::array();
  for (long t : spec.horizons) {
    const noisy::NoisyErrorBound eb = noisy::noisy_error_bound(sr.alpha, an, pi, t, dist_mu);
    json row;
    row["t"] = t;
    row["bound"] = json_number(eb.bound.value);
    row["oracle"] = oracle::exact_cesaro_error(mu, an.p_hat, pi, t);
    curve.push_back(row);
  }
  doc["curve"] = curve;

  emit_report(doc, m);
  return applicable ? kExitOk : kExitNothingApplicable;
}

int cmd_simulate(const RunManifest& m) {
  validate_manifest(m);
  io::NoisySpec spec = io::load_noisy_spec(m.input_path);
  const int n = spec.target.size();
  enforce_size(n, m);

  Observable f = [&] {
    if (spec.observable) {
      if (spec.observable->size() != n) {
        throw DimensionMismatchError("observable size differs from chain");
      }
      return *spec.observable;
    }
    std::vector<double> coords(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) coords[static_cast<std::size_t>(i)] = static_cast<double>(i);
    return Observable(std::move(coords));
  }();

  sim::SimConfig config{.steps = spec.steps,
                        .replicates = spec.replicates,
                        .seed = m.seed,
                        .initial = spec.initial,
                        .thinning = spec.thinning,
                        .burn_in = spec.burn_in};
  const sim::SimResult result =
      spec.noise ? sim::run_noisy_mh(spec.target, spec.proposal, *spec.noise, f, config)
                 : sim::run_mh(spec.target, spec.proposal, f, config);

  if (resolve_format(m, "csv") == "csv") {
    std::vector<std::string> header = {"replicate", "stream", "average"};
    for (int i = 0; i < n; ++i) header.push_back("occupancy_" + std::to_string(i));
    std::string out = io::csv_row(header);
    for (std::size_t r = 0; r < result.averages.size(); ++r) {
      std::vector<std::string> cells = {std::to_string(r),
                                        std::to_string(result.rng_streams[r]),
                                        io::format_double(result.averages[r])};
      for (int i = 0; i < n; ++i) {
        cells.push_back(io::format_double(result.replicate_occupancy(static_cast<int>(r), i)));
      }
      out += io::csv_row(cells);
    }
    out += io::csv_metadata(m.seed, m.max_states, m.max_horizon);
    io::write_output(m.out_path, out);
  } else {
    json doc;
    doc["averages"] = result.averages;
    doc["streams"] = result.rng_streams;
    doc["occupancy"] = result.occupancy;
    json per_rep = json::array();
    for (int r = 0; r < result.replicate_occupancy.rows(); ++r) {
      json row = json::array();
      for (int i = 0; i < n; ++i) row.push_back(result.replicate_occupancy(r, i));
      per_rep.push_back(row);
    }
    doc["replicate_occupancy"] = per_rep;
    doc["acceptance_rate"] = result.acceptance_rate;
    doc["retained_per_replicate"] = result.retained_per_replicate;
    io::write_output(m.out_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

namespace {

struct SweepRow {
  std::optional<double> scale;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::optional<double> oracle_gap;
};

}  // namespace

int cmd_sweep(const RunManifest& m) {
  validate_manifest(m);
  io::SweepSpec spec = io::load_sweep_spec(m.input_path);

  std::vector<SweepRow> grid;
  if (spec.mode == io::SweepSpec::Mode::epsilon) {
    double alpha = 0.0;
    std::optional<double> oracle_gap;
    if (spec.chain) {
      enforce_size(spec.chain->space.size(), m);
      const Distribution pi = stationary_distribution(spec.chain->kernel);
      alpha = spectral::spectral_gap(spec.chain->kernel, pi).alpha;
      if (spec.chain->perturbed) {
        oracle_gap =
            oracle::exact_stationary_gap(spec.chain->kernel, *spec.chain->perturbed).l2;
      }
    } else {
      alpha = *spec.alpha;
      if (!(alpha > 0.0) || alpha > 1.0) {
        throw SpecParseError("sweep alpha must lie in (0, 1]");
      }
    }
    for (double eps : spec.epsilons) {
      if (eps < 0.0) throw SpecParseError("sweep epsilon values must be >= 0");
      grid.push_back({std::nullopt, eps, alpha, oracle_gap});
    }
  } else {
    io::NoisySpec& ns = *spec.noisy;
    const int n = ns.target.size();
    enforce_size(n, m);
    const Distribution pi = ns.target.normalized();
    double alpha = 0.0;
    bool have_alpha = false;
    for (double scale : spec.scales) {
      if (scale < 0.0) throw SpecParseError("sweep scales must be >= 0");
      const noisy::NoisyAnalysis an =
          noisy::analyze_noise(ns.target, ns.proposal, ns.noise->scaled(scale));
      if (!have_alpha) {
        alpha = spectral::spectral_gap(an.p, pi).alpha;
        have_alpha = true;
      }
      const noisy::NoisyOperatorBound ob = noisy::noisy_operator_bound(an, pi);
      const double gap = oracle::exact_stationary_gap(an.p, an.p_hat).l2;
      grid.push_back({scale, ob.epsilon_bound, alpha, gap});
    }
  }

  std::string out = io::csv_row({"scale", "epsilon", "alpha", "applicable", "b0", "b1", "b2",
                                 "oracle_gap", "b2_over_b0", "b1_over_b0_sqrt_eps"});
  json doc = json::array();
  for (const SweepRow& row : grid) {
    const bounds::StationaryGapBounds gb = bounds::stationary_gap_bounds(row.alpha, row.epsilon);
    std::optional<double> ratio21, ratio10;
    if (gb.b0.value && gb.b2.value && *gb.b0.value > 0.0) {
      ratio21 = *gb.b2.value / *gb.b0.value;
    }
    if (gb.b0.value && gb.b1.value && *gb.b0.value > 0.0) {
      ratio10 = *gb.b1.value / *gb.b0.value * std::sqrt(row.epsilon);
    }
    const bool applicable = row.epsilon < row.alpha;
    out += io::csv_row({cell(row.scale), io::format_double(row.epsilon),
                        io::format_double(row.alpha), applicable ? "true" : "false",
                        cell(gb.b0.value), cell(gb.b1.value), cell(gb.b2.value),
                        cell(row.oracle_gap), cell(ratio21), cell(ratio10)});
    json jrow;
    jrow["scale"] = json_number(row.scale);
    jrow["epsilon"] = row.epsilon;
    jrow["alpha"] = row.alpha;
    jrow["applicable"] = applicable;
    jrow["b0"] = json_number(gb.b0.value);
    jrow["b1"] = json_number(gb.b1.value);
    jrow["b2"] = json_number(gb.b2.value);
    jrow["oracle_gap"] = json_number(row.oracle_gap);
    jrow["b2_over_b0"] = json_number(ratio21);
    jrow["b1_over_b0_sqrt_eps"] = json_number(ratio10);
    doc.push_back(jrow);
  }
  if (resolve_format(m, "csv") == "csv") {
    out += io::csv_metadata(m.seed, m.max_states, m.max_horizon);
    io::write_output(m.out_path, out);
  } else {
    io::write_output(m.out_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

int run(const std::string& command, const RunManifest& manifest) {
  try {
    if (command == "analyze") return cmd_analyze(manifest);
    if (command == "verify") return cmd_verify(manifest);
    if (command == "noisy") return cmd_noisy(manifest);
    if (command == "simulate") return cmd_simulate(manifest);
    if (command == "sweep") return cmd_sweep(manifest);
    throw SpecParseError("unknown command '" + command + "'");
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace cli
}  // namespace mcperturb
