#include <doctest.h>

#include "isac/convex/projection.hpp"
#include "isac/convex/solver.hpp"
#include "oracles.hpp"

using namespace isac;
using namespace isac::convex;

namespace {

CMat diag2(double a, double b) {
  CMat D = CMat::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

ConvexProblem ball_problem() {
  ConvexProblem p(2, 0);
  p.objective.Q = RMat::Identity(2, 2);
  p.objective.c = RVec::Zero(2);
  p.objective.c << -6, -8;
  p.constraints.push_back(Ball{{0, 1}, 1.0});
  return p;
}

}  // namespace

TEST_CASE("Hermitian parameterisation round trip") {
  testing::Rng rng(1);
  for (int m = 1; m <= 4; ++m) {
    const CMat H = testing::random_hermitian(rng, m);
    CHECK((hermitian_from_params(params_from_hermitian(H), m) - H).norm() < 1e-14);
    const CMat G = testing::random_hermitian(rng, m);
    const double direct = (G.adjoint() * H).trace().real();
    CHECK(hermitian_gradient(G).dot(params_from_hermitian(H)) == doctest::Approx(direct));
  }
}

TEST_CASE("PSD projection examples") {
  CHECK((psd_project(diag2(2, -1)) - diag2(2, 0)).norm() < 1e-15);
  testing::Rng rng(2);
  const CMat S = testing::random_psd(rng, 4, 4);
  CHECK((psd_project(S) - S).norm() < 1e-12 * std::max(1.0, S.norm()));
  CMat bad = CMat::Identity(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(psd_project(bad), InvalidArgument);
}

TEST_CASE("PSD projection beats every sampled PSD matrix") {
  testing::Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const CMat H = testing::random_hermitian(rng, 4);
    const double d = (H - psd_project(H)).norm();
    for (int j = 0; j < 100; ++j) CHECK(d <= (H - testing::random_psd(rng, 4, 1 + j % 4)).norm() + 1e-12);
  }
}

TEST_CASE("trace-capped projection examples") {
  CHECK((psd_trace_project(diag2(3, 2), 4) - diag2(2.5, 1.5)).norm() < 1e-14);
  CHECK((psd_trace_project(diag2(3, 2), 4) - testing::brute_force_psd_trace_projection(diag2(3, 2), 4)).norm() <
        1e-12);
  CHECK((psd_trace_project(diag2(1, 0.5), 4) - diag2(1, 0.5)).norm() < 1e-15);
  CHECK(psd_trace_project(diag2(-1, -2), 3).norm() == 0.0);
  CHECK_THROWS_AS(psd_trace_project(diag2(1, 1), 0.0), InvalidArgument);
}

TEST_CASE("projections are idempotent and nonexpansive") {
  testing::Rng rng(4);
  std::uniform_real_distribution<double> cap(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    const int m = 1 + i % 4;
    const CMat A = testing::random_hermitian(rng, m);
    const CMat B = testing::random_hermitian(rng, m);
    const double P = cap(rng);
    const CMat pa = psd_project(A), pb = psd_project(B);
    CHECK((psd_project(pa) - pa).norm() < 1e-12);
    CHECK((pa - pb).norm() <= (A - B).norm() + 1e-12);
    const CMat ta = psd_trace_project(A, P), tb = psd_trace_project(B, P);
    CHECK((psd_trace_project(ta, P) - ta).norm() < 1e-12);
    CHECK((ta - tb).norm() <= (A - B).norm() + 1e-12);
    CHECK(ta.trace().real() <= P * (1 + 1e-12));
  }
}

TEST_CASE("capped simplex projection") {
  RVec x(3);
  x << 3, 2, -1;
  const RVec p = capped_simplex_project(x, 4);
  CHECK(p[0] == doctest::Approx(2.5));
  CHECK(p[1] == doctest::Approx(1.5));
  CHECK(p[2] == 0.0);
}

TEST_CASE("ball-constrained least squares") {
  const auto p = ball_problem();
  const auto sol = solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.u[0] == doctest::Approx(0.6).epsilon(1e-7));
  CHECK(sol.u[1] == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(sol.kkt.primal <= 1e-8);
  CHECK(sol.kkt.dual <= 1e-8);
  CHECK(sol.kkt.gap <= 1e-8);

  RVec exact(2);
  exact << 0.6, 0.8;
  const auto k = kkt_residuals(p, exact);
  CHECK(k.primal <= 1e-8);
  CHECK(k.dual <= 1e-8);
  CHECK(k.gap <= 1e-8);

  RVec inner(2);
  inner << 0.1, 0.1;
  CHECK(kkt_residuals(p, inner).dual > 0.0);

  RVec outside(2);
  outside << 2.0, 0.0;
  CHECK(kkt_residuals(p, outside).primal == doctest::Approx(3.0));
}

TEST_CASE("log-affine bound") {
  ConvexProblem p(1, 0);
  p.objective.c = RVec::Constant(1, -1.0);
  p.constraints.push_back(LogAffine{0, RVec::Zero(1), 5.0});
  const auto sol = solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.u[0] == doctest::Approx(std::log(5.0)).epsilon(1e-8));
}

TEST_CASE("trace cap applies to the Hermitian trace") {
  // max Re tr(G R) over R >= 0, tr R <= 2 puts all power on the top eigenvector of G.
  ConvexProblem p(0, 2);
  CMat G = CMat::Zero(2, 2);
  G(0, 0) = 1.0;
  G(0, 1) = cdouble(0.5, 0.5);
  G(1, 0) = cdouble(0.5, -0.5);
  G(1, 1) = 0.2;
  p.objective.c = -p.lift_matrix_coeffs(hermitian_gradient(G));
  p.constraints.push_back(PsdCone{});
  p.constraints.push_back(TraceCap{2.0});
  const auto sol = solve(p);
  REQUIRE(sol.ok());
  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  CHECK(sol.R.trace().real() == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(-sol.objective == doctest::Approx(2.0 * es.eigenvalues().maxCoeff()).epsilon(1e-7));
}

TEST_CASE("infeasible problems are reported") {
  ConvexProblem p(1, 0);
  p.objective.c = RVec::Constant(1, 1.0);
  p.constraints.push_back(AffineIneq{RVec::Constant(1, 1.0), -1.0});
  p.constraints.push_back(AffineIneq{RVec::Constant(1, -1.0), -1.0});
  CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("problem validation") {
  ConvexProblem p(2, 0);
  p.objective.Q = RMat::Identity(2, 2);
  p.objective.Q(1, 1) = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  ConvexProblem q(2, 0);
  q.constraints.push_back(AffineIneq{RVec::Zero(3), 0.0});
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
}

TEST_CASE("solve is deterministic") {
  testing::Rng rng(9);
  const auto inst = testing::random_lifted_instance(rng);
  const auto a = solve(inst.problem);
  const auto b = solve(inst.problem);
  CHECK(a.status == b.status);
  CHECK((a.v - b.v).norm() == 0.0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("optimal status implies residuals within tolerance") {
  testing::Rng rng(10);
  for (int i = 0; i < 20; ++i) {
    const auto inst = i % 2 ? testing::random_qsdp_cap_instance(rng) : testing::random_sum_rate_instance(rng);
    const auto sol = solve(inst.problem);
    if (!sol.ok()) continue;
    CHECK(sol.kkt.primal <= 1e-8);
    CHECK(sol.kkt.dual <= 1e-8);
    CHECK(sol.kkt.gap <= 1e-8);
  }
}
