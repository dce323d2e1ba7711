#include "isac/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "isac/algorithms/pareto.hpp"

namespace isac::harness {

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Omega: return "omega";
    case SweepAxis::PMax: return "p_max_dbm";
    case SweepAxis::NTx: return "n_tx";
  }
  return "omega";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "omega") return SweepAxis::Omega;
  if (s == "p_max_dbm") return SweepAxis::PMax;
  if (s == "n_tx") return SweepAxis::NTx;
  throw InvalidArgument("sweep.axis: expected omega, p_max_dbm or n_tx, got '" + s + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Tchebycheff: return "tchebycheff";
    case Scheme::WeightedSum: return "weighted_sum";
    case Scheme::Soop1: return "soop1";
    case Scheme::Soop2: return "soop2";
  }
  return "tchebycheff";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "tchebycheff") return Scheme::Tchebycheff;
  if (s == "weighted_sum") return Scheme::WeightedSum;
  if (s == "soop1") return Scheme::Soop1;
  if (s == "soop2") return Scheme::Soop2;
  throw InvalidArgument("scheme: expected tchebycheff, weighted_sum, soop1 or soop2, got '" + s + "'");
}

std::vector<double> RunConfig::weights() const {
  if (sweep.axis != SweepAxis::Omega) return omega1;
  return sweep.values.empty() ? algo::weight_grid(system.delta_omega) : sweep.values;
}

std::vector<double> RunConfig::sweep_values() const {
  switch (sweep.axis) {
    case SweepAxis::PMax: return sweep.values.empty() ? std::vector<double>{system.p_max_dbm} : sweep.values;
    case SweepAxis::NTx:
      return sweep.values.empty() ? std::vector<double>{static_cast<double>(system.n_tx)} : sweep.values;
    case SweepAxis::Omega: break;
  }
  return {system.p_max_dbm};
}

std::vector<std::string> RunConfig::validate() const {
  auto err = system.validate();
  if (n_trials < 1) err.push_back("n_trials: must be >= 1");
  if (jobs < 1) err.push_back("jobs: must be >= 1");
  if (output_dir.empty()) err.push_back("output_dir: must not be empty");
  for (double w : omega1)
    if (!(w >= 0.0 && w <= 1.0)) err.push_back("omega1: entries must lie in [0, 1]");
  if (omega1.empty()) err.push_back("omega1: must not be empty");
  for (double v : sweep.values) {
    if (!std::isfinite(v)) {
      err.push_back("sweep.values: entries must be finite");
      continue;
    }
    if (sweep.axis == SweepAxis::Omega && !(v >= 0.0 && v <= 1.0))
      err.push_back("sweep.values: weights must lie in [0, 1]");
    if (sweep.axis == SweepAxis::NTx && (v < 1.0 || v != std::floor(v)))
      err.push_back("sweep.values: antenna counts must be positive integers");
  }
  return err;
}

void RunConfig::require_valid() const {
  auto err = validate();
  if (err.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : err) os << "\n  " << e;
  throw InvalidArgument(os.str());
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = c.system;
  j["n_trials"] = c.n_trials;
  j["sweep"] = {{"axis", to_string(c.sweep.axis)}, {"values", c.sweep.values}};
  j["omega1"] = c.omega1;
  j["scheme"] = to_string(c.scheme);
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
}

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config field `") + key + "` has the wrong type");
  }
}

}  // namespace

void from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  static const std::set<std::string> run_keys{"n_trials", "sweep", "omega1", "scheme", "output_dir", "jobs"};
  nlohmann::json sys = nlohmann::json::object();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!run_keys.count(it.key())) sys[it.key()] = it.value();
  c.system = sys.get<model::SystemConfig>();

  read(j, "n_trials", c.n_trials);
  read(j, "output_dir", c.output_dir);
  read(j, "jobs", c.jobs);
  if (j.contains("omega1")) {
    const auto& o = j.at("omega1");
    if (o.is_number()) c.omega1 = {o.get<double>()};
    else read(j, "omega1", c.omega1);
  }
  if (j.contains("scheme")) {
    std::string s;
    read(j, "scheme", s);
    c.scheme = scheme_from_string(s);
  }
  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    if (!sw.is_object()) throw InvalidArgument("config field `sweep` must be an object");
    for (auto it = sw.begin(); it != sw.end(); ++it)
      if (it.key() != "axis" && it.key() != "values")
        throw InvalidArgument("config: unknown field `sweep." + it.key() + "`");
    if (sw.contains("axis")) {
      if (!sw.at("axis").is_string()) throw InvalidArgument("config field `sweep.axis` has the wrong type");
      c.sweep.axis = sweep_axis_from_string(sw.at("axis").get<std::string>());
    }
    if (sw.contains("values")) {
      try {
        c.sweep.values = sw.at("values").get<std::vector<double>>();
      } catch (const nlohmann::json::exception&) {
        throw InvalidArgument("config field `sweep.values` has the wrong type");
      }
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config: '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig c = j.get<RunConfig>();
  c.require_valid();
  return c;
}

}  // namespace isac::harness
