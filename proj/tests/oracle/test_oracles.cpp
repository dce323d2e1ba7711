#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "isac/algorithms/baselines.hpp"
#include "isac/algorithms/pareto.hpp"
#include "isac/convex/projection.hpp"
#include "isac/convex/solver.hpp"
#include "isac/metrics.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

// 2x2 Hermitian PSD matrix from eigenvalues, a rotation angle and a phase.
CMat psd2(double l1, double l2, double th, double ph) {
  CMat U(2, 2);
  const double c = std::cos(th), s = std::sin(th);
  U << cdouble(c, 0), -s * std::polar(1.0, -ph), s * std::polar(1.0, ph), cdouble(c, 0);
  CMat D = CMat::Zero(2, 2);
  D(0, 0) = l1;
  D(1, 1) = l2;
  return U * D * U.adjoint();
}

// Dense grid over (l1, l2, th, ph) followed by a shrinking pattern search from
// the best grid point. `feasible_l` maps raw eigenvalues onto the admissible set.
double grid_min_2x2(const std::function<double(const CMat&)>& f,
                    const std::function<bool(double, double)>& admissible, bool trace_fixed) {
  struct Pt {
    double l1, l2, th, ph;
  };
  auto eval = [&](const Pt& p) {
    if (p.l1 < 0 || p.l2 < 0 || !admissible(p.l1, p.l2)) return std::numeric_limits<double>::infinity();
    return f(psd2(p.l1, p.l2, p.th, p.ph));
  };
  Pt best{0, 0, 0, 0};
  double fbest = std::numeric_limits<double>::infinity();
  const int nl = 40, nth = 45, nph = 72;
  for (int i = 0; i <= nl; ++i)
    for (int j = 0; j <= (trace_fixed ? 0 : nl); ++j)
      for (int a = 0; a <= nth; ++a)
        for (int b = 0; b < nph; ++b) {
          const double l1 = static_cast<double>(i) / nl;
          const Pt p{l1, trace_fixed ? 1.0 - l1 : static_cast<double>(j) / nl, (kPi / 2) * a / nth,
                     2 * kPi * b / nph};
          const double v = eval(p);
          if (v < fbest) {
            fbest = v;
            best = p;
          }
        }
  double step = 0.05;
  while (step > 1e-10) {
    bool moved = false;
    for (int d = 0; d < 4; ++d)
      for (double sgn : {-1.0, 1.0}) {
        Pt q = best;
        double* coord[4] = {&q.l1, &q.l2, &q.th, &q.ph};
        *coord[d] += sgn * step;
        if (trace_fixed && d == 0) q.l2 = 1.0 - q.l1;
        if (trace_fixed && d == 1) continue;
        const double v = eval(q);
        if (v < fbest) {
          fbest = v;
          best = q;
          moved = true;
        }
      }
    if (!moved) step /= 2;
  }
  return fbest;
}

model::AngleGrid three_angles() {
  model::AngleGrid g;
  g.angles_rad = {deg_to_rad(-30.0), 0.0, deg_to_rad(30.0)};
  return g;
}

}  // namespace

TEST_CASE("interior-point solver matches the projected-gradient reference") {
  testing::Rng rng(424242);
  using Gen = testing::Instance (*)(testing::Rng&);
  for (Gen gen : {Gen(testing::random_sum_rate_instance), Gen(testing::random_qsdp_instance),
                  Gen(testing::random_qsdp_cap_instance)}) {
    for (int i = 0; i < 5; ++i) {
      const auto inst = gen(rng);
      CAPTURE(inst.combo);
      const auto sol = convex::solve(inst.problem);
      REQUIRE(sol.ok());
      const auto ref = testing::projected_gradient_oracle(inst.problem);
      CHECK(ref.violation <= 1e-8);
      CHECK(std::abs(sol.objective - ref.objective) <= 1e-4 * std::max(1.0, std::abs(ref.objective)));
    }
  }
}

TEST_CASE("projections match brute-force eigenvalue QPs") {
  testing::Rng rng(99);
  std::uniform_real_distribution<double> cap(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    const CMat H = testing::random_hermitian(rng, 1 + i % 4);
    CHECK((convex::psd_project(H) - testing::brute_force_psd_projection(H)).norm() <= 1e-8);
    const double P = cap(rng);
    CHECK((convex::psd_trace_project(H, P) - testing::brute_force_psd_trace_projection(H, P)).norm() <= 1e-8);
  }
}

TEST_CASE("quadratic pattern match on a 2-antenna, 3-angle toy") {
  const auto grid = three_angles();
  RVec desired(3);
  desired << 0, 1, 0;
  const CMat A = metrics::steering_matrix(2, grid);
  convex::ConvexProblem p(0, 2);
  RMat B(3, 4);
  for (int l = 0; l < 3; ++l) B.row(l) = convex::hermitian_gradient(A.col(l) * A.col(l).adjoint()).transpose();
  p.objective.Q = B.transpose() * B;
  p.objective.c = -2 * B.transpose() * desired;
  p.constraints.push_back(convex::PsdCone{});
  p.constraints.push_back(convex::TraceCap{1.0});
  const auto sol = convex::solve(p);
  REQUIRE(sol.ok());
  const double solved = sol.objective + desired.squaredNorm();

  const auto f = [&](const CMat& R) { return (desired - metrics::beampattern_gain(R, A)).squaredNorm(); };
  const double oracle = grid_min_2x2(f, [](double a, double b) { return a + b <= 1.0; }, false);
  CHECK(std::abs(solved - oracle) <= 1e-4);
  CHECK(std::abs(solved - f(sol.R)) <= 1e-9);
}

TEST_CASE("beampattern design on the 3-angle toy matches a grid search") {
  model::SystemConfig c;
  c.n_tx = 2;
  c.n_users = 1;
  c.p_max_dbm = 0.0;
  model::ScenarioDraw s;
  s.channels = {model::steering_vector(2, 0.3)};
  s.symbols = {model::PskSymbolSet::make(4).symbol(0)};
  s.user_angles_rad = {0.3};
  s.grid = three_angles();
  s.target_angles_rad = {0.0};
  s.desired_gain = RVec::Zero(3);
  s.desired_gain[1] = 1.0;
  const auto r = algo::solve_soop2(s, c);
  REQUIRE(r.status == convex::Status::Optimal);

  const CMat A = metrics::steering_matrix(2, s.grid);
  const auto f = [&](const CMat& R) { return metrics::optimal_mse(metrics::beampattern_gain(R, A), s.desired_gain); };
  const double oracle = grid_min_2x2(f, [](double, double) { return true; }, true);
  CHECK(std::abs(r.f2_star - oracle) <= 1e-3);
}

TEST_CASE("rate maximisation for one user on a broadside channel") {
  model::SystemConfig c;
  c.n_tx = 2;
  c.n_users = 1;
  c.p_max_dbm = 10.0;
  c.noise_dbm = 0.0;
  c.gamma_db = {0.0};
  c.grid_size = 6;
  model::ScenarioDraw s;
  s.channels = {model::steering_vector(2, 0.0)};
  s.symbols = {model::PskSymbolSet::make(4).symbol(1)};
  s.user_angles_rad = {0.0};
  s.grid = model::build_grid(6);
  s.target_angles_rad = {0.0};
  s.desired_gain = model::desired_beampattern(s.grid, s.target_angles_rad, deg_to_rad(3.0));
  const auto r = algo::solve_soop1(s, c);
  REQUIRE(r.status == convex::Status::Optimal);

  // Grid over power fraction, split angle, relative phase and global phase.
  const double P = c.p_max_mw();
  const CVec ht = s.rotated_channel(0);
  double best = -1.0;
  for (int i = 1; i <= 10; ++i)
    for (int j = 0; j <= 60; ++j)
      for (int k = 0; k < 120; ++k)
        for (int g = 0; g < 72; ++g) {
          const double beta = (kPi / 2) * j / 60;
          CVec x(2);
          x << std::cos(beta), std::sin(beta) * std::polar(1.0, 2 * kPi * k / 120);
          x *= std::sqrt(P * i / 10.0) * std::polar(1.0, 2 * kPi * g / 72);
          if (metrics::ci_margin_value(ht.dot(x), 1.0, kPi / 4) < 0) continue;
          best = std::max(best, metrics::user_rate(s.channels[0], x, 1.0, 1.0));
        }
  REQUIRE(best > 0);
  CHECK(r.sum_rate >= best - 1e-6);
  CHECK(r.sum_rate - best <= 1e-3);
  CHECK(r.sum_rate == doctest::Approx(std::log2(1.0 + P)).epsilon(1e-6));
  CHECK(std::abs(s.channels[0].dot(r.x)) == doctest::Approx(r.x.norm()).epsilon(1e-6));
}

TEST_CASE("channel energy sample mean") {
  model::SystemConfig c;
  c.n_tx = 8;
  c.n_users = 1;
  c.path_loss_db = 0.0;
  c.grid_size = 2;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += model::draw_scenario(c, model::mix_seed(2024, i)).channels[0].squaredNorm();
  const double expected = 0.5 * (1.0 + c.n_tx);
  CHECK(std::abs(sum / n - expected) <= 0.02 * expected);
}

TEST_CASE("weighted sum leaves a larger gain gap than Tchebycheff at equal weights") {
  const model::SystemConfig c;
  const auto w = algo::ScalarizationWeights::from_omega1(0.5, c.xi);
  double gap_ws = 0.0, gap_tch = 0.0;
  int n = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto seed = model::mix_seed(c.rng_seed, t);
    const auto s = model::draw_scenario(c, seed);
    const auto u = algo::compute_utopia(s, c, seed);
    if (!u.ok()) continue;
    const auto tch = algo::solve_moop(s, u.utopia, w, c, seed);
    const auto ws = algo::weighted_sum_baseline(s, u.utopia, w, c, seed);
    if (!tch.ok() || !ws.ok()) continue;
    gap_tch += algo::gain_gap(tch.f1, tch.f2, u.utopia);
    gap_ws += algo::gain_gap(ws.f1, ws.f2, u.utopia);
    ++n;
  }
  REQUIRE(n >= 45);
  MESSAGE("mean gain gap: weighted sum " << gap_ws / n << ", Tchebycheff " << gap_tch / n);
  CHECK(gap_ws / n > gap_tch / n);
}
