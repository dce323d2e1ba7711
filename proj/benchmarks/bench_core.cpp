#include <benchmark/benchmark.h>

#include "isac/algorithms/pareto.hpp"
#include "isac/convex/projection.hpp"
#include "isac/convex/solver.hpp"

using namespace isac;

namespace {

model::SystemConfig config(int n_tx) {
  model::SystemConfig c;
  c.n_tx = n_tx;
  return c;
}

CMat hermitian(int m) {
  CMat A = CMat::Random(m, m);
  return 0.5 * (A + A.adjoint());
}

}  // namespace

static void BM_PsdTraceProject(benchmark::State& st) {
  const CMat H = hermitian(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(convex::psd_trace_project(H, 1.0));
}
BENCHMARK(BM_PsdTraceProject)->Arg(4)->Arg(8)->Arg(16);

// Trace-normalised beampattern QSDP, the inner solve of the sensing design.
static void BM_SolveQsdp(benchmark::State& st) {
  const int m = static_cast<int>(st.range(0));
  const auto s = model::draw_scenario(config(m), 1);
  const CMat A = metrics::steering_matrix(m, s.grid);
  convex::ConvexProblem p(0, m);
  RMat B(A.cols(), m * m);
  for (Eigen::Index l = 0; l < A.cols(); ++l)
    B.row(l) = convex::hermitian_gradient(A.col(l) * A.col(l).adjoint()).transpose();
  p.objective.Q = B.transpose() * B / static_cast<double>(A.cols());
  p.objective.c = -2.0 * B.transpose() * s.desired_gain * (1.0 / m) / static_cast<double>(A.cols());
  p.constraints.push_back(convex::PsdCone{});
  p.constraints.push_back(convex::AffineEq{p.lift_matrix_coeffs(convex::hermitian_gradient(CMat::Identity(m, m))), 1.0});
  for (auto _ : st) benchmark::DoNotOptimize(convex::solve(p));
}
BENCHMARK(BM_SolveQsdp)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Soop1(benchmark::State& st) {
  const auto c = config(static_cast<int>(st.range(0)));
  const auto s = model::draw_scenario(c, 2);
  for (auto _ : st) benchmark::DoNotOptimize(algo::solve_soop1(s, c));
}
BENCHMARK(BM_Soop1)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Soop2(benchmark::State& st) {
  const auto c = config(static_cast<int>(st.range(0)));
  const auto s = model::draw_scenario(c, 3);
  for (auto _ : st) benchmark::DoNotOptimize(algo::solve_soop2(s, c, 3));
}
BENCHMARK(BM_Soop2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_MoopPoint(benchmark::State& st) {
  const auto c = config(8);
  const auto s = model::draw_scenario(c, 4);
  const auto u = algo::compute_utopia(s, c, 4);
  const auto w = algo::ScalarizationWeights::from_omega1(static_cast<double>(st.range(0)) / 10.0, c.xi);
  for (auto _ : st) benchmark::DoNotOptimize(algo::solve_moop(s, u.utopia, w, c, 4));
}
BENCHMARK(BM_MoopPoint)->Arg(2)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
