#include "isac/harness/montecarlo.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>

#include "../parallel.hpp"
#include "isac/algorithms/baselines.hpp"
#include "isac/algorithms/pareto.hpp"

namespace isac::harness {

namespace {

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

TrialRecord base_record(int trial, std::uint64_t seed, double omega1, const model::SystemConfig& c) {
  TrialRecord r;
  r.trial = trial;
  r.seed = seed;
  r.omega1 = omega1;
  r.p_max_dbm = c.p_max_dbm;
  r.n_tx = c.n_tx;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.sum_rate = r.mse_relaxed = r.mse_extracted = r.min_ci_margin = r.tx_power = nan;
  r.f1_star = r.f2_star = nan;
  return r;
}

convex::Status utopia_failure(const algo::UtopiaRun& u) {
  auto good = [](convex::Status st) { return st == convex::Status::Optimal || st == convex::Status::MaxIters; };
  if (!good(u.soop1.status)) return u.soop1.status;
  if (!good(u.soop2.status)) return u.soop2.status;
  return convex::Status::NumericalFailure;
}

void fill(TrialRecord& r, const algo::WaveformDesign& d) {
  r.sum_rate = d.report.sum_rate_bps;
  r.mse_extracted = d.report.mse;
  r.min_ci_margin = d.report.min_margin();
  r.tx_power = d.report.tx_power;
}

std::vector<TrialRecord> run_point(const RunConfig& cfg, int trial, std::uint64_t seed, const model::SystemConfig& sys,
                                   std::size_t sweep_index) {
  const auto weights = cfg.weights();
  std::vector<TrialRecord> out;
  const auto s = model::draw_scenario(sys, seed);
  const std::uint64_t point_seed = model::mix_seed(seed, sweep_index);

  if (cfg.scheme == Scheme::Soop1 || cfg.scheme == Scheme::Soop2) {
    const auto t0 = Clock::now();
    auto r = base_record(trial, seed, cfg.scheme == Scheme::Soop1 ? 1.0 : 0.0, sys);
    algo::WaveformDesign d;
    if (cfg.scheme == Scheme::Soop1) {
      const auto res = algo::solve_soop1(s, sys);
      r.status = convex::to_string(res.status);
      r.iters = res.iterations;
      r.f1_star = res.f1_star;
      d.x = res.x;
      d.report = metrics::evaluate_waveform(res.x, std::nullopt, s, sys);
      r.mse_relaxed = d.report.mse;
    } else {
      const auto res = algo::solve_soop2(s, sys, point_seed);
      r.status = convex::to_string(res.status);
      r.iters = res.iterations;
      r.f2_star = res.f2_star;
      r.mse_relaxed = res.f2_star;
      d.report = metrics::evaluate_waveform(res.x, std::nullopt, s, sys);
    }
    fill(r, d);
    r.wall_ms = ms_since(t0);
    out.push_back(r);
    return out;
  }

  const auto t0 = Clock::now();
  const auto u = algo::compute_utopia(s, sys, point_seed);
  const double utopia_ms = ms_since(t0);
  for (std::size_t wi = 0; wi < weights.size(); ++wi) {
    auto r = base_record(trial, seed, weights[wi], sys);
    r.f1_star = u.utopia.f1_star;
    r.f2_star = u.utopia.f2_star;
    if (!u.ok()) {
      r.status = convex::to_string(utopia_failure(u));
      out.push_back(r);
      continue;
    }
    const auto t1 = Clock::now();
    const auto w = algo::ScalarizationWeights::from_omega1(weights[wi], sys.xi);
    const auto seed_w = model::mix_seed(point_seed, wi + 1);
    const auto p = cfg.scheme == Scheme::WeightedSum ? algo::weighted_sum_baseline(s, u.utopia, w, sys, seed_w)
                                                     : algo::solve_moop(s, u.utopia, w, sys, seed_w);
    r.status = convex::to_string(p.status);
    r.iters = p.iterations;
    if (p.iterations > 0) {
      fill(r, p.design);
      r.mse_relaxed = p.f2_relaxed;
    }
    r.wall_ms = ms_since(t1) + utopia_ms / static_cast<double>(weights.size());
    out.push_back(r);
  }
  return out;
}

}  // namespace

bool TrialRecord::same_result(const TrialRecord& o) const {
  return trial == o.trial && seed == o.seed && same_double(omega1, o.omega1) && same_double(p_max_dbm, o.p_max_dbm) &&
         n_tx == o.n_tx && same_double(sum_rate, o.sum_rate) && same_double(mse_relaxed, o.mse_relaxed) &&
         same_double(mse_extracted, o.mse_extracted) && same_double(min_ci_margin, o.min_ci_margin) &&
         same_double(tx_power, o.tx_power) && iters == o.iters && status == o.status &&
         same_double(f1_star, o.f1_star) && same_double(f2_star, o.f2_star);
}

namespace {

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double num_from(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const TrialRecord& r) {
  j = nlohmann::json{{"schema", kTrialSchema},
                     {"trial", r.trial},
                     {"seed", r.seed},
                     {"omega1", num(r.omega1)},
                     {"p_max_dbm", num(r.p_max_dbm)},
                     {"n_tx", r.n_tx},
                     {"sum_rate", num(r.sum_rate)},
                     {"mse_relaxed", num(r.mse_relaxed)},
                     {"mse_extracted", num(r.mse_extracted)},
                     {"min_ci_margin", num(r.min_ci_margin)},
                     {"tx_power", num(r.tx_power)},
                     {"iters", r.iters},
                     {"status", r.status},
                     {"f1_star", num(r.f1_star)},
                     {"f2_star", num(r.f2_star)}};
}

void from_json(const nlohmann::json& j, TrialRecord& r) {
  try {
    if (j.at("schema").get<std::string>() != kTrialSchema)
      throw InvalidArgument("trial record: unsupported schema " + j.at("schema").dump());
    r.trial = j.at("trial").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.omega1 = num_from(j, "omega1");
    r.p_max_dbm = num_from(j, "p_max_dbm");
    r.n_tx = j.at("n_tx").get<int>();
    r.sum_rate = num_from(j, "sum_rate");
    r.mse_relaxed = num_from(j, "mse_relaxed");
    r.mse_extracted = num_from(j, "mse_extracted");
    r.min_ci_margin = num_from(j, "min_ci_margin");
    r.tx_power = num_from(j, "tx_power");
    r.iters = j.at("iters").get<int>();
    r.status = j.at("status").get<std::string>();
    r.f1_star = num_from(j, "f1_star");
    r.f2_star = num_from(j, "f2_star");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("trial record: ") + e.what());
  }
}

double MonteCarloResult::failure_fraction() const {
  return records.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(records.size());
}

MonteCarloResult run_montecarlo(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.require_valid();
  const auto values = cfg.sweep_values();
  std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.n_trials));
  std::mutex m;
  int done = 0;

  detail::parallel_for(per_trial.size(), cfg.jobs, [&](std::size_t t) {
    const std::uint64_t seed = model::mix_seed(cfg.system.rng_seed, t);
    auto& out = per_trial[t];
    for (std::size_t si = 0; si < values.size(); ++si) {
      model::SystemConfig sys = cfg.system;
      if (cfg.sweep.axis == SweepAxis::PMax) sys.p_max_dbm = values[si];
      if (cfg.sweep.axis == SweepAxis::NTx) sys.n_tx = static_cast<int>(values[si]);
      try {
        auto recs = run_point(cfg, static_cast<int>(t), seed, sys, si);
        out.insert(out.end(), recs.begin(), recs.end());
      } catch (const std::exception&) {
        for (double w : cfg.weights()) {
          auto r = base_record(static_cast<int>(t), seed, w, sys);
          r.status = convex::to_string(convex::Status::NumericalFailure);
          out.push_back(r);
          if (cfg.scheme == Scheme::Soop1 || cfg.scheme == Scheme::Soop2) break;
        }
      }
    }
    if (progress) {
      std::lock_guard lk(m);
      progress(++done, cfg.n_trials);
    }
  });

  MonteCarloResult res;
  for (auto& v : per_trial)
    for (auto& r : v) {
      if (!r.ok()) ++res.failures;
      res.records.push_back(std::move(r));
    }
  return res;
}

}  // namespace isac::harness
