#include "mcperturb/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "mcperturb/bounds.hpp"
#include "mcperturb/errors.hpp"
#include "mcperturb/version.hpp"

namespace mcperturb {
namespace io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw SpecParseError(msg); }

const json& field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) fail(std::string("spec: missing field '") + key + "'");
  return *it;
}

std::vector<double> parse_real_vector(const json& v, const char* what) {
  if (!v.is_array()) fail(std::string("spec: ") + what + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) out.push_back(parse_real(x));
  return out;
}

Matrix parse_matrix(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) fail(std::string("spec: ") + what + " must be a nonempty array of rows");
  const int n = static_cast<int>(v.size());
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      fail(std::string("spec: ") + what + " must be square; row " + std::to_string(i) +
           " has wrong length");
    }
    for (int j = 0; j < n; ++j) m(i, j) = parse_real(row[j]);
  }
  return m;
}

std::vector<long> parse_horizons(const json& doc) {
  const auto it = doc.find("horizons");
  if (it == doc.end()) return {1, 2, 4, 8, 16, 32, 64};
  if (!it->is_array()) fail("spec: horizons must be an array");
  std::vector<long> out;
  for (const json& x : *it) {
    if (!x.is_number_integer() && !x.is_number_unsigned()) {
      fail("spec: horizons must be integers");
    }
    out.push_back(x.get<long>());
  }
  return out;
}

long parse_count(const json& doc, const char* key, long fallback) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number_integer() && !it->is_number_unsigned()) {
    fail(std::string("spec: ") + key + " must be an integer");
  }
  return it->get<long>();
}

std::vector<noisy::NoiseAtom> parse_atoms(const json& v) {
  if (!v.is_array() || v.empty()) fail("spec: noise atoms must be a nonempty array of [z, p] pairs");
  std::vector<noisy::NoiseAtom> atoms;
  for (const json& pair : v) {
    if (!pair.is_array() || pair.size() != 2) fail("spec: each noise atom must be a [z, p] pair");
    atoms.push_back({parse_real(pair[0]), parse_real(pair[1])});
  }
  return atoms;
}

noisy::NoiseModel parse_noise(const json& v, int n) {
  if (!v.is_object()) fail("spec: noise must be an object");
  const json& rule_field = field(v, "rule");
  if (!rule_field.is_string()) fail("spec: noise rule must be a string");
  const noisy::NoiseRule rule = noisy::rule_from_name(rule_field.get<std::string>());
  if (const auto per_state = v.find("per_state"); per_state != v.end()) {
    if (!per_state->is_array() || static_cast<int>(per_state->size()) != n) {
      fail("spec: noise per_state must list atoms for every state");
    }
    std::vector<std::vector<noisy::NoiseAtom>> all;
    for (const json& state_atoms : *per_state) all.push_back(parse_atoms(state_atoms));
    return noisy::NoiseModel(rule, std::move(all));
  }
  return noisy::NoiseModel::broadcast(rule, parse_atoms(field(v, "atoms")), n);
}

}  // namespace

double parse_real(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const double parsed = std::stod(s, &used);
      if (used != s.size()) fail("spec: trailing characters in numeric string '" + s + "'");
      return parsed;
    } catch (const std::invalid_argument&) {
      fail("spec: '" + s + "' is not a number");
    } catch (const std::out_of_range&) {
      fail("spec: '" + s + "' is out of double range");
    }
  }
  fail("spec: expected a number or decimal string");
}

ChainSpec parse_chain_spec(const json& doc) {
  if (!doc.is_object()) fail("spec: document must be a JSON object");
  Matrix kernel_matrix = parse_matrix(field(doc, "kernel"), "kernel");
  const int n = kernel_matrix.rows();
  if (const auto states = doc.find("states"); states != doc.end()) {
    if (!states->is_number_integer() || states->get<int>() != n) {
      fail("spec: 'states' disagrees with kernel dimensions");
    }
  }
  std::vector<std::string> labels;
  if (const auto lab = doc.find("labels"); lab != doc.end()) {
    if (!lab->is_array()) fail("spec: labels must be an array of strings");
    for (const json& l : *lab) {
      if (!l.is_string()) fail("spec: labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  StateSpace space = labels.empty() ? StateSpace(n) : StateSpace(n, std::move(labels));
  TransitionKernel kernel(std::move(kernel_matrix), space);

  std::optional<TransitionKernel> perturbed;
  if (const auto pk = doc.find("perturbed_kernel"); pk != doc.end()) {
    perturbed.emplace(parse_matrix(*pk, "perturbed_kernel"), space);
  }
  std::optional<Distribution> initial;
  if (const auto init = doc.find("initial"); init != doc.end()) {
    initial.emplace(parse_real_vector(*init, "initial"));
  }
  std::vector<Observable> observables;
  if (const auto obs = doc.find("observables"); obs != doc.end()) {
    if (!obs->is_array()) fail("spec: observables must be an array of arrays");
    for (const json& o : *obs) observables.emplace_back(parse_real_vector(o, "observable"));
  }
  return ChainSpec{std::move(space), std::move(kernel),      std::move(perturbed),
                   std::move(initial), std::move(observables), parse_horizons(doc)};
}

NoisySpec parse_noisy_spec(const json& doc) {
  if (!doc.is_object()) fail("spec: document must be a JSON object");
  noisy::TargetSpec target(parse_real_vector(field(doc, "target"), "target"));
  const int n = target.size();
  Matrix q = parse_matrix(field(doc, "proposal"), "proposal");
  if (q.rows() != n) fail("spec: proposal dimensions disagree with target");
  noisy::ProposalSpec proposal{TransitionKernel(std::move(q))};

  std::optional<noisy::NoiseModel> noise;
  if (const auto nz = doc.find("noise"); nz != doc.end()) noise = parse_noise(*nz, n);

  std::optional<Distribution> initial;
  if (const auto init = doc.find("initial"); init != doc.end()) {
    initial.emplace(parse_real_vector(*init, "initial"));
  }
  std::optional<Observable> observable;
  if (const auto obs = doc.find("observable"); obs != doc.end()) {
    observable.emplace(parse_real_vector(*obs, "observable"));
  }
  NoisySpec out{std::move(target), std::move(proposal), std::move(noise),
                std::move(initial), std::move(observable), parse_horizons(doc)};
  out.steps = parse_count(doc, "steps", out.steps);
  out.replicates = parse_count(doc, "replicates", out.replicates);
  out.thinning = parse_count(doc, "thinning", out.thinning);
  out.burn_in = parse_count(doc, "burn_in", out.burn_in);
  return out;
}

SweepSpec parse_sweep_spec(const json& doc) {
  if (!doc.is_object()) fail("spec: document must be a JSON object");
  const json& mode_field = field(doc, "mode");
  if (!mode_field.is_string()) fail("spec: sweep mode must be a string");
  const std::string mode = mode_field.get<std::string>();

  SweepSpec out;
  if (mode == "epsilon") {
    out.mode = SweepSpec::Mode::epsilon;
    out.epsilons = parse_real_vector(field(doc, "epsilons"), "epsilons");
    if (doc.contains("kernel")) {
      out.chain = parse_chain_spec(doc);
    } else if (doc.contains("alpha")) {
      out.alpha = parse_real(doc["alpha"]);
    } else {
      fail("spec: epsilon sweep needs either 'alpha' or 'kernel'");
    }
    return out;
  }
  if (mode == "noise") {
    out.mode = SweepSpec::Mode::noise;
    out.noisy = parse_noisy_spec(doc);
    if (!out.noisy->noise) fail("spec: noise sweep needs a 'noise' model to scale");
    out.scales = parse_real_vector(field(doc, "scales"), "scales");
    return out;
  }
  fail("spec: sweep mode must be 'epsilon' or 'noise'");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open spec file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail("malformed JSON in '" + path + "': " + e.what());
  }
  return doc;
}

ChainSpec load_chain_spec(const std::string& path) { return parse_chain_spec(load_json(path)); }
NoisySpec load_noisy_spec(const std::string& path) { return parse_noisy_spec(load_json(path)); }
SweepSpec load_sweep_spec(const std::string& path) { return parse_sweep_spec(load_json(path)); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::string csv_metadata(std::uint64_t seed, int max_states, long max_horizon) {
  std::ostringstream os;
  os << "# " << kToolName << ' ' << kToolVersion << " seed=" << seed
     << " max_states=" << max_states << " max_horizon=" << max_horizon << '\n';
  return os.str();
}

std::string bounds_batch_csv(const json& doc) {
  if (!doc.is_object()) fail("batch: document must be a JSON object");
  const json& jobs = field(doc, "jobs");
  if (!jobs.is_array()) fail("batch: 'jobs' must be an array");
  std::string out = csv_row({"formula", "inputs", "value", "applicable"});
  for (const json& job : jobs) {
    const json& formula_field = field(job, "formula");
    if (!formula_field.is_string()) fail("batch: job formula must be a string");
    const json& inputs_field = field(job, "inputs");
    if (!inputs_field.is_object()) fail("batch: job inputs must be an object");
    std::map<std::string, double> inputs;
    for (const auto& [key, value] : inputs_field.items()) inputs[key] = parse_real(value);
    const bounds::BoundResult r = bounds::evaluate(formula_field.get<std::string>(), inputs);
    std::string echo;
    for (const auto& [key, value] : r.inputs) {
      if (!echo.empty()) echo += ';';
      echo += key + '=' + format_double(value);
    }
    out += csv_row({formula_name(r.id), echo, r.value ? format_double(*r.value) : "",
                    r.applicable ? "true" : "false"});
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open output file '" + path + "'");
  out << content;
}

}  // namespace io
}  // namespace mcperturb
