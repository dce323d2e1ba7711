// Command-line front end: one subcommand per experiment, CSV/JSON out.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "isac/algorithms/baselines.hpp"
#include "isac/algorithms/pareto.hpp"
#include "isac/harness/aggregate.hpp"
#include "isac/harness/config.hpp"
#include "isac/harness/export.hpp"
#include "isac/harness/montecarlo.hpp"
#include "isac/harness/validate.hpp"
#include "isac/metrics.hpp"

namespace {

using namespace isac;
using harness::format_double;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBatch = 2;
constexpr int kExitUsage = 64;
constexpr double kBatchFailureLimit = 0.10;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run configuration (defaults when omitted)")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Base seed (overrides rng_seed)");
  app->add_option("--trials", c.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

// Without a config file the trial count falls back to `default_trials`.
harness::RunConfig resolve(const Common& c, int default_trials = 1) {
  harness::RunConfig rc;
  if (!c.config.empty()) rc = harness::load_config(c.config);
  else rc.n_trials = default_trials;
  if (c.seed) rc.system.rng_seed = *c.seed;
  if (c.trials) rc.n_trials = *c.trials;
  if (c.jobs) rc.jobs = *c.jobs;
  if (!c.out.empty()) rc.output_dir = c.out;
  rc.require_valid();
  for (const auto& w : rc.system.warnings()) std::cerr << "warning: " << w << '\n';
  return rc;
}

std::string path_in(const harness::RunConfig& rc, const std::string& name) {
  return (std::filesystem::path(rc.output_dir) / name).string();
}

void emit_records(const harness::RunConfig& rc, const Common& c, const std::string& stem,
                  const std::vector<harness::TrialRecord>& recs, const std::vector<harness::GroupKey>& keys) {
  const auto fmt = harness::format_from_string(c.format);
  if (fmt == harness::Format::Csv) {
    harness::write_file(path_in(rc, stem + ".csv"), [&](std::ostream& os) { harness::write_records_csv(os, recs); });
  } else {
    harness::write_file(path_in(rc, stem + ".json"),
                        [&](std::ostream& os) { os << harness::records_to_json(recs).dump(2) << '\n'; });
  }
  bool any_ok = false;
  for (const auto& r : recs) any_ok = any_ok || r.ok();
  if (!any_ok) return;
  const auto sum = harness::aggregate(recs, keys);
  for (const auto& w : sum.warnings) std::cerr << "warning: " << w << '\n';
  if (fmt == harness::Format::Csv)
    harness::write_file(path_in(rc, stem + "_summary.csv"), [&](std::ostream& os) { harness::write_summary_csv(os, sum); });
  else
    harness::write_file(path_in(rc, stem + "_summary.json"),
                        [&](std::ostream& os) { os << harness::summary_to_json(sum).dump(2) << '\n'; });
}

int batch_exit(const harness::MonteCarloResult& res) {
  std::cerr << res.records.size() << " records, " << res.failures << " failed ("
            << format_double(100.0 * res.failure_fraction()) << "%)\n";
  return res.failure_fraction() > kBatchFailureLimit ? kExitBatch : kExitOk;
}

harness::ProgressFn progress_printer() {
  return [](int done, int total) { std::cerr << "\rtrial " << done << '/' << total << (done == total ? "\n" : "") << std::flush; };
}

// ---- subcommands ----

int cmd_single(const Common& c, bool sensing) {
  auto rc = resolve(c);
  rc.scheme = sensing ? harness::Scheme::Soop2 : harness::Scheme::Soop1;
  rc.sweep = {};
  rc.omega1 = {sensing ? 0.0 : 1.0};
  const auto res = harness::run_montecarlo(rc, rc.n_trials > 1 ? progress_printer() : harness::ProgressFn{});
  emit_records(rc, c, sensing ? "soop2" : "soop1", res.records, {harness::GroupKey::Omega1});
  for (const auto& r : res.records)
    std::cout << "seed " << r.seed << ": " << r.status << " sum_rate=" << format_double(r.sum_rate)
              << " mse=" << format_double(r.mse_extracted) << " iters=" << r.iters << '\n';
  return batch_exit(res);
}

int cmd_pareto(const Common& c) {
  auto rc = resolve(c, 1);
  rc.sweep.axis = harness::SweepAxis::Omega;
  const auto res = harness::run_montecarlo(rc, progress_printer());
  emit_records(rc, c, "pareto", res.records, {harness::GroupKey::Omega1});
  return batch_exit(res);
}

int cmd_montecarlo(const Common& c) {
  auto rc = resolve(c, 50);
  const auto res = harness::run_montecarlo(rc, progress_printer());
  std::vector<harness::GroupKey> keys;
  if (rc.sweep.axis == harness::SweepAxis::PMax) keys.push_back(harness::GroupKey::PMaxDbm);
  if (rc.sweep.axis == harness::SweepAxis::NTx) keys.push_back(harness::GroupKey::NTx);
  keys.push_back(harness::GroupKey::Omega1);
  emit_records(rc, c, "montecarlo", res.records, keys);
  return batch_exit(res);
}

int cmd_beampattern(const Common& c, const std::vector<int>& n_tx, std::optional<double> omega1) {
  const auto rc = resolve(c);
  const auto fmt = harness::format_from_string(c.format);
  nlohmann::json all = nlohmann::json::array();
  int failures = 0;
  for (int n : n_tx) {
    auto sys = rc.system;
    sys.n_tx = n;
    sys.require_valid();
    const auto s = model::draw_scenario(sys, rc.system.rng_seed);
    CMat R;
    std::string status;
    if (omega1) {
      const auto u = algo::compute_utopia(s, sys, rc.system.rng_seed);
      if (!u.ok()) {
        ++failures;
        std::cerr << "n_tx=" << n << ": utopia failed\n";
        continue;
      }
      const auto p = algo::solve_moop(s, u.utopia, algo::ScalarizationWeights::from_omega1(*omega1, sys.xi), sys,
                                      rc.system.rng_seed);
      R = p.design.R;
      status = convex::to_string(p.status);
    } else {
      const auto r = algo::solve_soop2(s, sys, rc.system.rng_seed);
      R = r.R;
      status = convex::to_string(r.status);
    }
    if (R.size() == 0) {
      ++failures;
      std::cerr << "n_tx=" << n << ": " << status << '\n';
      continue;
    }
    const RVec g = metrics::beampattern_gain(R, s.grid);
    const std::vector<double> gain(g.data(), g.data() + g.size());
    std::cout << "n_tx=" << n << ": " << status << " peak gain " << format_double(g.maxCoeff()) << '\n';
    if (fmt == harness::Format::Csv) {
      harness::write_file(path_in(rc, "beampattern_ntx" + std::to_string(n) + ".csv"),
                          [&](std::ostream& os) { harness::write_beampattern_csv(os, s.grid.angles_rad, gain); });
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t l = 0; l < gain.size(); ++l)
        rows.push_back({{"angle_deg", rad_to_deg(s.grid.angles_rad[l])}, {"gain", gain[l]}});
      all.push_back({{"n_tx", n}, {"status", status}, {"rows", rows}});
    }
  }
  if (fmt == harness::Format::Json)
    harness::write_file(path_in(rc, "beampattern.json"), [&](std::ostream& os) { os << all.dump(2) << '\n'; });
  return failures == 0 ? kExitOk : kExitBatch;
}

int cmd_convergence(const Common& c) {
  const auto rc = resolve(c);
  const auto fmt = harness::format_from_string(c.format);
  std::ostringstream body;
  if (fmt == harness::Format::Csv) body << "seed,omega1,iteration,alpha,change,f1_relaxed,f2_relaxed,newton_steps,status\n";
  int runs = 0, failures = 0;
  for (int t = 0; t < rc.n_trials; ++t) {
    const auto seed = model::mix_seed(rc.system.rng_seed, static_cast<std::uint64_t>(t));
    const auto s = model::draw_scenario(rc.system, seed);
    const auto u = algo::compute_utopia(s, rc.system, seed);
    for (double w1 : rc.omega1) {
      ++runs;
      if (!u.ok()) {
        ++failures;
        continue;
      }
      const auto p = algo::solve_moop(s, u.utopia, algo::ScalarizationWeights::from_omega1(w1, rc.system.xi), rc.system,
                                      model::mix_seed(seed, 1));
      if (!p.ok()) ++failures;
      if (fmt == harness::Format::Json) {
        algo::write_jsonl(body, p.trajectory, {{"seed", seed}, {"omega1", w1}});
      } else {
        for (const auto& e : p.trajectory)
          body << seed << ',' << format_double(w1) << ',' << e.iteration << ',' << format_double(e.objective) << ','
               << format_double(e.change) << ',' << format_double(e.f1) << ',' << format_double(e.f2) << ','
               << e.newton_steps << ',' << convex::to_string(e.status) << '\n';
      }
      std::cout << "seed " << seed << " omega1=" << format_double(w1) << ": " << convex::to_string(p.status) << " after "
                << p.iterations << " iterations\n";
    }
  }
  harness::write_file(path_in(rc, fmt == harness::Format::Csv ? "convergence.csv" : "convergence.jsonl"),
                      [&](std::ostream& os) { os << body.str(); });
  return runs > 0 && static_cast<double>(failures) / runs > kBatchFailureLimit ? kExitBatch : kExitOk;
}

int cmd_baselines(const Common& c, const std::string& mode, std::vector<double> thresholds) {
  const auto rc = resolve(c);
  const auto fmt = harness::format_from_string(c.format);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  const bool ws = mode == "weighted_sum";
  const auto soo_mode = ws ? algo::SooMode::MseMinRateConstrained : algo::soo_mode_from_string(mode);
  if (!ws && thresholds.empty())
    thresholds = soo_mode == algo::SooMode::MseMinRateConstrained ? std::vector<double>{4, 5, 6, 7, 8}
                                                                  : std::vector<double>{1.1, 1.25, 1.5, 2.0, 3.0};
  if (ws)
    csv << "seed,omega1,scheme,sum_rate,mse_extracted,gain_gap,status\n";
  else
    csv << "seed,mode,threshold,sum_rate,mse_relaxed,mse_extracted,min_ci_margin,tx_power,iters,status\n";
  int runs = 0, failures = 0;
  for (int t = 0; t < rc.n_trials; ++t) {
    const auto seed = model::mix_seed(rc.system.rng_seed, static_cast<std::uint64_t>(t));
    const auto s = model::draw_scenario(rc.system, seed);
    const auto u = algo::compute_utopia(s, rc.system, seed);
    if (!u.ok()) {
      ++runs;
      ++failures;
      std::cerr << "seed " << seed << ": utopia failed\n";
      continue;
    }
    if (ws) {
      for (double w1 : rc.weights()) {
        const auto w = algo::ScalarizationWeights::from_omega1(w1, rc.system.xi);
        const auto seed_w = model::mix_seed(seed, 1);
        const algo::ParetoPoint pts[2] = {algo::solve_moop(s, u.utopia, w, rc.system, seed_w),
                                          algo::weighted_sum_baseline(s, u.utopia, w, rc.system, seed_w)};
        const char* names[2] = {"tchebycheff", "weighted_sum"};
        for (int i = 0; i < 2; ++i) {
          ++runs;
          if (!pts[i].ok()) ++failures;
          const double gap = pts[i].ok() ? algo::gain_gap(pts[i].f1, pts[i].f2, u.utopia) : std::nan("");
          csv << seed << ',' << format_double(w1) << ',' << names[i] << ',' << format_double(-pts[i].f1) << ','
              << format_double(pts[i].f2) << ',' << format_double(gap) << ',' << convex::to_string(pts[i].status) << '\n';
          rows.push_back({{"seed", seed}, {"omega1", w1}, {"scheme", names[i]}, {"point", algo::to_json(pts[i])},
                          {"gain_gap", pts[i].ok() ? nlohmann::json(gap) : nlohmann::json(nullptr)}});
        }
      }
      continue;
    }
    for (double th : thresholds) {
      // MSE ceilings are given as multiples of the sensing optimum.
      const double abs_th = soo_mode == algo::SooMode::RateMaxMseConstrained ? th * u.utopia.f2_star : th;
      const auto r = algo::soo_baselines(s, abs_th, soo_mode, rc.system, model::mix_seed(seed, 2));
      ++runs;
      // An unattainable threshold is a data point, not a failure.
      if (!r.ok() && r.status != convex::Status::Infeasible) ++failures;
      csv << seed << ',' << mode << ',' << format_double(th) << ',' << format_double(-r.f1) << ','
          << format_double(r.f2_relaxed) << ',' << format_double(r.f2) << ','
          << format_double(r.ok() ? r.design.report.min_margin() : std::nan("")) << ','
          << format_double(r.design.report.tx_power) << ',' << r.iterations << ',' << convex::to_string(r.status) << '\n';
      rows.push_back({{"seed", seed}, {"mode", mode}, {"threshold", th}, {"sum_rate", -r.f1}, {"mse_relaxed", r.f2_relaxed},
                      {"mse_extracted", r.f2}, {"iters", r.iterations}, {"status", convex::to_string(r.status)}});
    }
  }
  if (fmt == harness::Format::Csv)
    harness::write_file(path_in(rc, "baselines.csv"), [&](std::ostream& os) { os << csv.str(); });
  else
    harness::write_file(path_in(rc, "baselines.json"), [&](std::ostream& os) { os << rows.dump(2) << '\n'; });
  std::cerr << runs << " runs, " << failures << " failed\n";
  return runs > 0 && static_cast<double>(failures) / runs > kBatchFailureLimit ? kExitBatch : kExitOk;
}

int cmd_validate(const Common& c) {
  const auto rep = harness::run_validation(c.seed.value_or(1), &std::cout);
  std::cout << rep.checks.size() - static_cast<std::size_t>(rep.failures()) << '/' << rep.checks.size() << " checks passed\n";
  return rep.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC waveform design: sum rate vs. beampattern MSE under constructive interference"};
  app.require_subcommand(1);

  Common c;
  auto* soop1 = app.add_subcommand("soop1", "Sum-rate optimum per trial");
  auto* soop2 = app.add_subcommand("soop2", "Beampattern-MSE optimum per trial");
  auto* pareto = app.add_subcommand("pareto", "Weight sweep of the Tchebycheff front");
  auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo sweep over the configured axis");
  auto* beam = app.add_subcommand("beampattern", "Gain versus angle for several array sizes");
  auto* conv = app.add_subcommand("convergence", "Per-iteration traces of the multi-objective SCA");
  auto* base = app.add_subcommand("baselines", "Weighted-sum and single-objective comparison schemes");
  auto* val = app.add_subcommand("validate", "Run the invariant suite");
  for (auto* s : {soop1, soop2, pareto, mc, beam, conv, base, val}) add_common(s, c);

  std::vector<int> n_tx{4, 8, 16};
  std::optional<double> beam_omega;
  beam->add_option("--n-tx", n_tx, "Comma-separated antenna counts")->delimiter(',')->check(CLI::PositiveNumber);
  beam->add_option("--omega1", beam_omega, "Use the multi-objective design at this weight")->check(CLI::Range(0.0, 1.0));
  std::string mode = "weighted_sum";
  std::vector<double> thresholds;
  base->add_option("--mode", mode, "weighted_sum | mse_min_rate_constrained | rate_max_mse_constrained")
      ->check(CLI::IsMember({"weighted_sum", "mse_min_rate_constrained", "rate_max_mse_constrained"}));
  base->add_option("--thresholds", thresholds,
                   "Per-user rate floors in bit/s, or MSE ceilings as multiples of the sensing optimum")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*soop1) return cmd_single(c, false);
    if (*soop2) return cmd_single(c, true);
    if (*pareto) return cmd_pareto(c);
    if (*mc) return cmd_montecarlo(c);
    if (*beam) return cmd_beampattern(c, n_tx, beam_omega);
    if (*conv) return cmd_convergence(c);
    if (*base) return cmd_baselines(c, mode, thresholds);
    if (*val) return cmd_validate(c);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const harness::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
