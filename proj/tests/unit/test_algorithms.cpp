#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "isac/algorithms/baselines.hpp"
#include "isac/algorithms/extraction.hpp"
#include "isac/algorithms/pareto.hpp"
#include "isac/algorithms/tchebycheff.hpp"
#include "oracles.hpp"

using namespace isac;
using namespace isac::algo;

namespace {

model::SystemConfig small_config() {
  model::SystemConfig c;
  c.n_tx = 4;
  c.n_users = 2;
  c.grid_size = 90;
  return c;
}

bool dominates(const Objectives& a, const Objectives& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

}  // namespace

TEST_CASE("Tchebycheff scalarisation") {
  const Utopia u{-8.0, 0.1};
  const auto w = ScalarizationWeights::from_omega1(0.5, 0.001);
  auto s = scalarize_tchebycheff(-4.0, 0.2, u, w, Normalization::Signed);
  CHECK(s.f1p == doctest::Approx(-0.24975).epsilon(1e-12));
  CHECK(s.f2p == doctest::Approx(0.50025).epsilon(1e-12));
  CHECK(s.alpha == doctest::Approx(0.50025).epsilon(1e-12));

  // Magnitude form: the rate shortfall counts as a positive degradation.
  s = scalarize_tchebycheff(-4.0, 0.2, u, w);
  CHECK(s.f1p == doctest::Approx(0.5 * (0.5 + 0.001 * 1.5)).epsilon(1e-12));

  s = scalarize_tchebycheff(u.f1_star, u.f2_star, u, w);
  CHECK(s.f1p == 0.0);
  CHECK(s.f2p == 0.0);

  const auto w0 = ScalarizationWeights{0.3, 0.7, 0.0};
  s = scalarize_tchebycheff(-6.0, 0.4, u, w0);
  CHECK(s.f1p == doctest::Approx(0.3 * 0.25));
  CHECK(s.f2p == doctest::Approx(0.7 * 3.0));

  CHECK_THROWS_AS(scalarize_tchebycheff(-1, 1, Utopia{0.0, 1.0}, w), InvalidArgument);
}

TEST_CASE("weights and utopia validation") {
  CHECK_NOTHROW(ScalarizationWeights::from_omega1(0.3).validate());
  CHECK_THROWS_AS((ScalarizationWeights{0.5, 0.6, 0.001}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ScalarizationWeights{1.5, -0.5, 0.001}).validate(), InvalidArgument);
  CHECK_THROWS_AS((Utopia{1.0, 1.0}).validate(), InvalidArgument);
  CHECK_THROWS_AS((Utopia{-1.0, 0.0}).validate(), InvalidArgument);
  const auto w = ScalarizationWeights::from_omega1(0.37);
  CHECK(std::abs(w.omega1 + w.omega2 - 1.0) <= 1e-12);
}

TEST_CASE("weight grid") {
  CHECK(weight_grid(0.5) == std::vector<double>{0.5});
  CHECK(weight_grid(0.01).size() == 99);
  const auto g = weight_grid(0.05);
  REQUIRE(g.size() == 19);
  CHECK(g.front() == doctest::Approx(0.05));
  CHECK(g.back() == doctest::Approx(0.95));
  CHECK_THROWS_AS(weight_grid(0.0), InvalidArgument);
  CHECK_THROWS_AS(weight_grid(0.6), InvalidArgument);
}

TEST_CASE("dominance filter examples") {
  const std::vector<Objectives> pts{{1, 1}, {2, 2}, {1.5, 0.5}};
  CHECK(dominance_filter(pts) == std::vector<std::size_t>{0, 2});
  const std::vector<Objectives> same(4, Objectives{3, 3});
  CHECK(dominance_filter(same).size() == 4);
}

TEST_CASE("dominance filter output is mutually non-dominated and transform invariant") {
  testing::Rng rng(31);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    std::vector<Objectives> pts(30), warped(30);
    for (auto& p : pts) p = {std::round(4 * u(rng)) / 4, std::round(4 * u(rng)) / 4};
    for (std::size_t j = 0; j < pts.size(); ++j) warped[j] = {std::exp(pts[j].f1), pts[j].f2 * pts[j].f2 * pts[j].f2};
    const auto keep = dominance_filter(pts);
    CHECK(dominance_filter(warped) == keep);
    for (auto a : keep)
      for (auto b : keep) CHECK(!dominates(pts[a], pts[b]));
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (std::find(keep.begin(), keep.end(), j) == keep.end())
        CHECK(std::any_of(pts.begin(), pts.end(), [&](const Objectives& q) { return dominates(q, pts[j]); }));
  }
}

TEST_CASE("single-antenna single-user rate maximisation") {
  model::SystemConfig c;
  c.n_tx = 1;
  c.n_users = 1;
  c.p_max_dbm = 0.0;
  c.noise_dbm = 0.0;
  c.gamma_db = {-10.0};
  c.grid_size = 6;
  model::ScenarioDraw s;
  s.channels = {CVec::Ones(1)};
  s.symbols = {model::PskSymbolSet::make(4).symbol(0)};
  s.user_angles_rad = {0.0};
  s.grid = model::build_grid(6);
  s.target_angles_rad = {0.0};
  s.desired_gain = model::desired_beampattern(s.grid, s.target_angles_rad, deg_to_rad(3.0));
  const auto r = solve_soop1(s, c);
  REQUIRE(r.status == convex::Status::Optimal);
  CHECK(r.sum_rate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x.squaredNorm() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.f1_star == doctest::Approx(-r.sum_rate));
}

TEST_CASE("rate maximisation reports infeasible thresholds") {
  auto c = small_config();
  c.gamma_db = {80.0};
  const auto s = model::draw_scenario(c, 3);
  CHECK(solve_soop1(s, c).status == convex::Status::Infeasible);
}

TEST_CASE("beampattern matching with one grid angle is exact") {
  model::SystemConfig c;
  c.n_tx = 2;
  c.n_users = 1;
  c.p_max_dbm = 0.0;
  model::ScenarioDraw s;
  s.channels = {CVec::Ones(2) / std::sqrt(2.0)};
  s.symbols = {model::PskSymbolSet::make(4).symbol(0)};
  s.user_angles_rad = {0.0};
  s.grid.angles_rad = {deg_to_rad(20.0)};
  s.target_angles_rad = {deg_to_rad(20.0)};
  s.desired_gain = RVec::Ones(1);
  const auto r = solve_soop2(s, c);
  REQUIRE(r.status == convex::Status::Optimal);
  CHECK(r.f2_star <= 1e-10);
  const RVec g = metrics::beampattern_gain(r.R, s.grid);
  CHECK(g[0] == doctest::Approx(r.eta).epsilon(1e-6));
}

TEST_CASE("SCA trajectories are monotone") {
  const auto c = small_config();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = model::draw_scenario(c, seed);
    const auto r1 = solve_soop1(s, c);
    REQUIRE(r1.status == convex::Status::Optimal);
    for (std::size_t t = 1; t < r1.trajectory.size(); ++t)
      CHECK(r1.trajectory[t].objective >= r1.trajectory[t - 1].objective - 1e-9);
    const auto r2 = solve_soop2(s, c, seed);
    REQUIRE(r2.status == convex::Status::Optimal);
    for (std::size_t t = 1; t < r2.trajectory.size(); ++t)
      CHECK(r2.trajectory[t].objective <= r2.trajectory[t - 1].objective * (1 + 1e-9));
  }
}

TEST_CASE("Gaussian randomization on degenerate covariances") {
  auto c = small_config();
  const auto s = model::draw_scenario(c, 5);
  testing::Rng rng(6);
  const CVec v = testing::random_cvec(rng, 4).normalized() * 3.0;
  const auto flat = [](const CVec&) { return 0.0; };
  const auto r = gaussian_randomization(v * v.adjoint(), s, c, 20, flat, 1);
  const cdouble phase = v.dot(r.x) / v.squaredNorm();
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-9);
  CHECK((r.x - phase * v).norm() < 1e-9 * v.norm());

  const auto z = gaussian_randomization(CMat::Zero(4, 4), s, c, 20, flat, 1);
  CHECK(z.x.norm() == 0.0);
  CHECK(!z.feasible_found);
  CHECK_THROWS_AS(gaussian_randomization(CMat::Zero(4, 4), s, c, 0, flat, 1), InvalidArgument);
}

TEST_CASE("Gaussian randomization returns the best feasible candidate") {
  auto c = small_config();
  c.gamma_db = {-20.0};
  const auto s = model::draw_scenario(c, 8);
  testing::Rng rng(9);
  const CMat R = testing::random_psd(rng, 4, 3) * (c.p_max_mw() / 4);
  const CMat A = metrics::steering_matrix(4, s.grid);
  std::vector<double> seen;
  const auto sel = [&](const CVec& x) {
    const double m = metrics::optimal_mse(metrics::beampattern_gain_vec(x, A), s.desired_gain);
    seen.push_back(m);
    return m;
  };
  const auto r = gaussian_randomization(R, s, c, 50, sel, 3);
  REQUIRE(r.feasible_found);
  REQUIRE(!seen.empty());
  CHECK(r.selector_value <= *std::min_element(seen.begin(), seen.end()) + 1e-12);
  CHECK(r.x.squaredNorm() == doctest::Approx(std::min(R.trace().real(), c.p_max_mw())).epsilon(1e-9));
}

TEST_CASE("joint design invariants") {
  const auto c = small_config();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto s = model::draw_scenario(c, seed);
    const auto u = compute_utopia(s, c, seed);
    REQUIRE(u.ok());
    for (double w1 : {0.1, 0.5, 0.9}) {
      const auto p = solve_moop(s, u.utopia, ScalarizationWeights::from_omega1(w1, c.xi), c, seed);
      REQUIRE(p.ok());
      for (std::size_t t = 1; t < p.trajectory.size(); ++t)
        CHECK(p.trajectory[t].objective <= p.trajectory[t - 1].objective + 1e-9);
      CHECK(p.f2 >= u.utopia.f2_star * (1 - 1e-6));
      CHECK(p.f2_relaxed >= u.utopia.f2_star * (1 - 1e-6));
      if (p.converged) {
        CHECK(p.design.report.min_margin() >= -1e-6);
        CHECK(p.design.report.tx_power <= c.p_max_mw() * (1 + 1e-8));
      }
      if (p.design.rank_ratio <= 1e-6) CHECK(std::abs(p.f2 - p.f2_relaxed) <= 1e-6 * p.f2_relaxed);
    }
  }
}

TEST_CASE("weighted sum at the extreme weights follows one objective") {
  const auto c = small_config();
  const auto s = model::draw_scenario(c, 2);
  const auto u = compute_utopia(s, c, 2);
  REQUIRE(u.ok());
  const auto comm = weighted_sum_baseline(s, u.utopia, ScalarizationWeights{1.0, 0.0, c.xi}, c, 2);
  const auto sens = weighted_sum_baseline(s, u.utopia, ScalarizationWeights{0.0, 1.0, c.xi}, c, 2);
  REQUIRE(comm.ok());
  REQUIRE(sens.ok());
  CHECK(-comm.f1 >= 0.9 * -u.utopia.f1_star);
  CHECK(sens.f2_relaxed <= 1.1 * u.utopia.f2_star);
  CHECK(-comm.f1 > -sens.f1);
  CHECK(sens.f2_relaxed < comm.f2_relaxed);
}

TEST_CASE("constrained baselines reduce to the single objectives") {
  const auto c = small_config();
  const auto s = model::draw_scenario(c, 4);
  const auto u = compute_utopia(s, c, 4);
  REQUIRE(u.ok());
  const auto mse = soo_baselines(s, 0.0, SooMode::MseMinRateConstrained, c, 4);
  REQUIRE(mse.ok());
  CHECK(mse.f2_relaxed <= 1.1 * u.utopia.f2_star);
  const auto rate = soo_baselines(s, std::numeric_limits<double>::infinity(), SooMode::RateMaxMseConstrained, c, 4);
  REQUIRE(rate.ok());
  CHECK(-rate.f1 >= 0.9 * -u.utopia.f1_star);
  CHECK(soo_baselines(s, 1e6, SooMode::MseMinRateConstrained, c, 4).status == convex::Status::Infeasible);
  CHECK(soo_mode_from_string(to_string(SooMode::RateMaxMseConstrained)) == SooMode::RateMaxMseConstrained);
  CHECK_THROWS_AS(soo_mode_from_string("nope"), InvalidArgument);
}

TEST_CASE("pareto sweep") {
  auto c = small_config();
  c.delta_omega = 0.5;
  const auto s = model::draw_scenario(c, 6);
  auto f = pareto_sweep(s, c, 6);
  REQUIRE(f.points.size() == 1);
  CHECK(f.points[0].weights.omega1 == 0.5);

  c.delta_omega = 0.2;
  f = pareto_sweep(s, c, 6);
  REQUIRE(f.points.size() == 4);
  CHECK(f.failures == 0);
  for (auto a : f.filtered)
    for (auto b : f.filtered)
      CHECK(!dominates({f.points[a].f1, f.points[a].f2}, {f.points[b].f1, f.points[b].f2}));
}

TEST_CASE("gain gap") {
  const Utopia u{-10.0, 2.0};
  CHECK(gain_gap(-8.0, 3.0, u) == doctest::Approx(0.3));
  CHECK(gain_gap(u.f1_star, u.f2_star, u) == 0.0);
}
