#include "isac/harness/validate.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "isac/algorithms/pareto.hpp"
#include "isac/convex/projection.hpp"
#include "isac/convex/solver.hpp"
#include "isac/harness/aggregate.hpp"
#include "isac/harness/export.hpp"
#include "isac/harness/montecarlo.hpp"
#include "isac/metrics.hpp"

namespace isac::harness {

bool ValidationReport::passed() const { return failures() == 0; }

int ValidationReport::failures() const {
  int n = 0;
  for (const auto& c : checks) n += c.passed ? 0 : 1;
  return n;
}

namespace {

using Rng = std::mt19937_64;

struct Outcome {
  bool passed = true;
  std::string detail;
};

Outcome expect(bool ok, const std::string& why) { return {ok, ok ? "" : why}; }

CVec random_cvec(Rng& g, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = cdouble(N(g), N(g));
  return v;
}

CMat random_hermitian(Rng& g, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cdouble(N(g), N(g));
  return 0.5 * (A + A.adjoint());
}

CMat random_psd(Rng& g, int n) {
  const CVec a = random_cvec(g, n), b = random_cvec(g, n);
  return a * a.adjoint() + 0.5 * b * b.adjoint();
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

model::SystemConfig small_config() {
  model::SystemConfig c;
  c.n_tx = 4;
  c.grid_size = 90;
  c.beam_width_deg = 6.0;
  c.delta_omega = 0.25;
  return c;
}

// ---- model ----

Outcome steering_norm(Rng& g) {
  std::uniform_real_distribution<double> U(-kPi / 2, kPi / 2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(model::steering_vector(1 + i % 16, U(g)).norm() - 1.0));
  return expect(worst <= 1e-12, "max | ||a|| - 1 | = " + num(worst));
}

Outcome realify_roundtrip(Rng& g) {
  std::uniform_real_distribution<double> U(0.0, 2 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + i % 6;
    const CVec h = random_cvec(g, n), x = random_cvec(g, n);
    const cdouble s = std::polar(1.0, U(g));
    const CVec hs = h * s;
    const auto r = model::realify(std::vector<CVec>{h}, std::vector<cdouble>{s}, x);
    const cdouble c = hs.dot(x);
    const auto& u = r.users[0];
    worst = std::max({worst, std::abs(u.z.dot(r.x_tilde) - c.imag()), std::abs(u.z_tilde.dot(r.x_tilde) - c.real()),
                      std::abs((u.H.transpose() * r.x_tilde).norm() - std::abs(c))});
  }
  return expect(worst <= 1e-10, "worst identity residual " + num(worst));
}

Outcome desired_refinement(Rng&) {
  const std::vector<double> t{deg_to_rad(-60.0), 0.0, deg_to_rad(60.0)};
  const auto g1 = model::build_grid(180), g2 = model::build_grid(360);
  const RVec d1 = model::desired_beampattern(g1, t, deg_to_rad(3.0));
  const RVec d2 = model::desired_beampattern(g2, t, deg_to_rad(3.0));
  for (std::size_t l = 0; l < g1.size(); ++l)
    if (d1[static_cast<Eigen::Index>(l)] != d2[static_cast<Eigen::Index>(2 * l)])
      return {false, "mask differs at " + num(rad_to_deg(g1.angles_rad[l])) + " deg"};
  return {};
}

Outcome draw_reproducible(Rng&) {
  model::SystemConfig c;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto a = model::scenario_to_json(model::draw_scenario(c, i));
    const auto b = model::scenario_to_json(model::draw_scenario(c, i));
    const auto d = model::scenario_to_json(model::draw_scenario(c, i + 1000));
    if (a != b) return {false, "seed " + std::to_string(i) + " not reproducible"};
    if (a == d) return {false, "seeds " + std::to_string(i) + " and " + std::to_string(i + 1000) + " coincide"};
  }
  return {};
}

// ---- metrics ----

Outcome eta_optimal(Rng& g) {
  std::bernoulli_distribution B(0.3);
  for (int i = 0; i < 100; ++i) {
    const auto grid = model::build_grid(24);
    RVec d(24);
    for (int l = 0; l < 24; ++l) d[l] = B(g) ? 1.0 : 0.0;
    d[i % 24] = 1.0;
    const CMat R = random_psd(g, 4);
    const RVec G = metrics::beampattern_gain(R, grid);
    const double e = metrics::eta_star(G, d);
    const double m = metrics::beampattern_mse(e, G, d);
    for (int k = -25; k <= 25; ++k) {
      if (k == 0) continue;
      const double eta = e + 0.02 * k * (1.0 + std::abs(e));
      if (metrics::beampattern_mse(eta, G, d) < m) return {false, "eta " + num(eta) + " beats eta*"};
    }
    // Binary masks: G^2 = G, so the squared-mask formula agrees.
    const double alt = d.cwiseProduct(d).dot(G) / d.squaredNorm();
    if (std::abs(alt - e) > 1e-12 * std::max(1.0, std::abs(e))) return {false, "squared-mask formula differs"};
  }
  return {};
}

Outcome rate_monotone(Rng& g) {
  std::uniform_real_distribution<double> U(1.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const CVec h = random_cvec(g, 4), x = random_cvec(g, 4);
    const double a = U(g);
    if (metrics::user_rate(h, a * x, 0.3, 1.0) < metrics::user_rate(h, x, 0.3, 1.0)) return {false, "rate dropped"};
  }
  return {};
}

Outcome ci_rotation(Rng& g) {
  model::SystemConfig c;
  std::uniform_real_distribution<double> U(0.0, 2 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto s = model::draw_scenario(c, static_cast<std::uint64_t>(i));
    const CVec x = random_cvec(g, c.n_tx) * 10.0;
    const auto m0 = metrics::ci_margin(s, x, c);
    const cdouble ph = std::polar(1.0, U(g));
    for (auto& sym : s.symbols) sym *= ph;
    const auto m1 = metrics::ci_margin(s, CVec(x * ph), c);
    for (std::size_t k = 0; k < m0.size(); ++k) worst = std::max(worst, std::abs(m0[k].value - m1[k].value));
  }
  return expect(worst <= 1e-10, "margin change " + num(worst));
}

// ---- convex-core ----

Outcome projections(Rng& g) {
  for (int i = 0; i < 100; ++i) {
    const CMat A = random_hermitian(g, 3), B = random_hermitian(g, 3);
    const double cap = 0.5 + i % 4;
    const CMat pa = convex::psd_project(A), pb = convex::psd_project(B);
    const CMat ta = convex::psd_trace_project(A, cap), tb = convex::psd_trace_project(B, cap);
    if ((convex::psd_project(pa) - pa).norm() > 1e-12) return {false, "psd_project not idempotent"};
    if ((convex::psd_trace_project(ta, cap) - ta).norm() > 1e-10) return {false, "psd_trace_project not idempotent"};
    const double d = (A - B).norm();
    if ((pa - pb).norm() > d + 1e-12) return {false, "psd_project expands distances"};
    if ((ta - tb).norm() > d + 1e-12) return {false, "psd_trace_project expands distances"};
  }
  return {};
}

Outcome solver_ball(Rng&) {
  convex::ConvexProblem p(2, 0);
  p.objective.Q = RMat::Identity(2, 2);
  p.objective.c = RVec::Zero(2);
  p.objective.c << -6.0, -8.0;
  p.constraints.emplace_back(convex::Ball{{0, 1}, 1.0});
  const auto a = convex::solve(p), b = convex::solve(p);
  if (!a.ok()) return {false, "status " + convex::to_string(a.status)};
  if (a.v != b.v) return {false, "solve not deterministic"};
  const double err = std::hypot(a.u[0] - 0.6, a.u[1] - 0.8);
  return expect(err <= 1e-6, "u* error " + num(err));
}

// ---- algorithms ----

Outcome tchebycheff_example(Rng&) {
  const algo::Utopia u{-8.0, 0.1};
  const auto w = algo::ScalarizationWeights::from_omega1(0.5, 0.001);
  const auto s = algo::scalarize_tchebycheff(-4.0, 0.2, u, w, algo::Normalization::Signed);
  const bool ok = std::abs(s.f1p + 0.24975) < 1e-12 && std::abs(s.f2p - 0.50025) < 1e-12 &&
                  std::abs(s.alpha - 0.50025) < 1e-12;
  return expect(ok, "got (" + num(s.f1p) + ", " + num(s.f2p) + ")");
}

Outcome dominance_example(Rng&) {
  const std::vector<algo::Objectives> pts{{1, 1}, {2, 2}, {1.5, 0.5}};
  const auto keep = algo::dominance_filter(std::span<const algo::Objectives>(pts));
  return expect(keep == std::vector<std::size_t>{0, 2}, "wrong subset");
}

Outcome sca_front(Rng&) {
  const auto cfg = small_config();
  const auto s = model::draw_scenario(cfg, 11);
  auto front = algo::pareto_sweep(s, cfg, 11);
  if (!front.utopia.ok()) return {false, "utopia failed"};
  const auto& u = front.utopia.utopia;
  for (std::size_t i = 1; i < front.utopia.soop1.trajectory.size(); ++i)
    if (front.utopia.soop1.trajectory[i].objective < front.utopia.soop1.trajectory[i - 1].objective - 1e-9)
      return {false, "sum-rate SCA objective decreased"};
  for (std::size_t i = 1; i < front.utopia.soop2.trajectory.size(); ++i)
    if (front.utopia.soop2.trajectory[i].objective > front.utopia.soop2.trajectory[i - 1].objective * (1 + 1e-9))
      return {false, "beampattern alternation increased M_s"};
  const double P = cfg.p_max_mw();
  for (const auto& p : front.points) {
    if (!p.ok()) return {false, "weight " + num(p.weights.omega1) + ": " + convex::to_string(p.status)};
    for (std::size_t i = 1; i < p.trajectory.size(); ++i)
      if (p.trajectory[i].objective > p.trajectory[i - 1].objective + 1e-9)
        return {false, "alpha increased at weight " + num(p.weights.omega1)};
    if (p.f1 < u.f1_star - 1e-6 * std::abs(u.f1_star)) return {false, "f1 beats f1* at " + num(p.weights.omega1)};
    if (p.f2 < u.f2_star * (1 - 1e-6)) return {false, "f2 beats f2* at " + num(p.weights.omega1)};
    if (p.converged && (p.design.report.min_margin() < -1e-6 || p.design.report.tx_power > P * (1 + 1e-8)))
      return {false, "design infeasible at " + num(p.weights.omega1)};
    if (p.design.rank_ratio <= 1e-6 && std::abs(p.f2 - p.f2_relaxed) > 1e-6 * p.f2_relaxed)
      return {false, "rank-one extraction changed M_s at " + num(p.weights.omega1)};
  }
  return {};
}

// ---- harness ----

Outcome csv_contract(Rng&) {
  std::ostringstream os;
  write_records_csv(os, {});
  return expect(os.str() == std::string(kRecordCsvHeader) + "\n", "header mismatch: " + os.str());
}

Outcome end_to_end(Rng&) {
  RunConfig rc;
  rc.system = small_config();
  rc.system.delta_omega = 0.5;
  rc.n_trials = 2;
  rc.jobs = 1;
  const auto a = run_montecarlo(rc);
  rc.jobs = 2;
  const auto b = run_montecarlo(rc);
  std::ostringstream ca, cb;
  write_records_csv(ca, a.records);
  write_records_csv(cb, b.records);
  if (ca.str() != cb.str()) return {false, "output depends on parallelism"};
  const auto back = records_from_json(nlohmann::json::parse(records_to_json(a.records).dump()));
  if (back.size() != a.records.size()) return {false, "JSON round-trip lost records"};
  for (std::size_t i = 0; i < back.size(); ++i)
    if (!back[i].same_result(a.records[i])) return {false, "JSON round-trip changed record " + std::to_string(i)};
  const auto sum = aggregate({a.records.front()}, {GroupKey::Omega1});
  if (sum.rows.size() == 1 && (sum.rows[0].sum_rate.mean != a.records.front().sum_rate || sum.rows[0].sum_rate.std != 0.0))
    return {false, "single-record summary wrong"};
  return {};
}

}  // namespace

ValidationReport run_validation(std::uint64_t seed, std::ostream* log) {
  struct Check {
    const char* module;
    const char* name;
    std::function<Outcome(Rng&)> fn;
  };
  const std::vector<Check> checks{
      {"model", "steering vectors have unit norm", steering_norm},
      {"model", "realification identities", realify_roundtrip},
      {"model", "desired pattern stable under grid refinement", desired_refinement},
      {"model", "scenario draws reproducible and seed-distinct", draw_reproducible},
      {"metrics", "eta* minimises M_s", eta_optimal},
      {"metrics", "rate monotone in power", rate_monotone},
      {"metrics", "CI margin invariant to joint rotation", ci_rotation},
      {"convex", "projections idempotent and nonexpansive", projections},
      {"convex", "ball projection solve", solver_ball},
      {"algorithms", "scalarization example", tchebycheff_example},
      {"algorithms", "dominance filter example", dominance_example},
      {"algorithms", "SCA monotonicity, utopia dominance, design feasibility", sca_front},
      {"harness", "CSV header contract", csv_contract},
      {"harness", "determinism, JSON round-trip, aggregation", end_to_end},
  };
  ValidationReport rep;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Rng g(model::mix_seed(seed, i));
    CheckResult r{checks[i].module, checks[i].name, false, ""};
    try {
      const auto o = checks[i].fn(g);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    if (log) *log << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace isac::harness
