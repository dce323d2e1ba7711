#include "isac/algorithms/moop.hpp"

#include <algorithm>
#include <cmath>

#include "isac/metrics.hpp"
#include "lifted.hpp"

namespace isac::algo {

nlohmann::json to_json(const ParetoPoint& p) {
  nlohmann::json j;
  j["omega1"] = p.weights.omega1;
  j["omega2"] = p.weights.omega2;
  j["xi"] = p.weights.xi;
  j["f1"] = p.f1;
  j["f2"] = p.f2;
  j["f1_relaxed"] = p.f1_relaxed;
  j["f2_relaxed"] = p.f2_relaxed;
  j["alpha"] = p.alpha;
  j["alpha_extracted"] = p.alpha_extracted;
  j["iterations"] = p.iterations;
  j["converged"] = p.converged;
  j["status"] = convex::to_string(p.status);
  j["dominated"] = p.dominated;
  j["rank_ratio"] = p.design.rank_ratio;
  j["extraction_fallback"] = p.design.extraction_fallback;
  j["report"] = metrics::to_json(p.design.report);
  return j;
}

namespace {

// Relative degradations as affine/quadratic forms on the lifted vector:
// Delta_1 = a1^T v + b1, Delta_2 = v^T Q2 v + b2.
struct Degradations {
  RVec a1;
  double b1 = 0.0;
  RMat Q2;
  double b2 = 0.0;
};

Degradations degradations(const detail::Normalized& nz, const detail::LiftedLayout& L, const Utopia& u) {
  Degradations d;
  const int n = L.vector_dim + L.matrix_dim * L.matrix_dim;
  d.a1 = RVec::Zero(n);
  const double d1 = std::abs(u.f1_star);
  for (int k = 0; k < nz.n_users; ++k) d.a1[L.mu(k)] = -nz.bandwidth * kLog2e / d1;
  d.b1 = -u.f1_star / d1;
  d.Q2 = L.lift_quadratic(nz.Q_ms) * (nz.mse_scale() / u.f2_star);
  d.b2 = -1.0;
  return d;
}

}  // namespace

ParetoPoint solve_moop(const model::ScenarioDraw& s, const Utopia& utopia, const ScalarizationWeights& w,
                       const model::SystemConfig& cfg, std::uint64_t seed) {
  cfg.require_valid();
  utopia.validate();
  w.validate();
  const auto nz = detail::Normalized::build(s, cfg);
  const detail::LiftedLayout L(nz.n_tx, nz.n_users);
  const auto D = degradations(nz, L, utopia);

  ParetoPoint pt;
  pt.weights = w;
  double margin = 0.0;
  const auto xf = detail::ci_feasible_start(nz, cfg.max_iters_moop, margin);
  if (!xf) {
    pt.status = convex::Status::Infeasible;
    return pt;
  }

  // Row i: omega_i [Delta_i + xi (Delta_1 + Delta_2)] = q1_i Delta_1 + q2_i Delta_2.
  const double q1[2] = {w.omega1 * (1.0 + w.xi), w.omega2 * w.xi};
  const double q2[2] = {w.omega1 * w.xi, w.omega2 * (1.0 + w.xi)};
  std::vector<cdouble> cur;

  detail::LiftedScaPlan plan;
  plan.max_iters = cfg.max_iters_moop;
  plan.eps_c = cfg.eps3 / nz.c_scale();
  plan.build = [&](convex::ConvexProblem& p, const std::vector<cdouble>& cbar) {
    cur = cbar;
    p.objective.c[L.aux()] = 1.0;
    for (int k = 0; k < nz.n_users; ++k)
      p.constraints.emplace_back(detail::rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]));
    for (int i = 0; i < 2; ++i) {
      convex::ConvexQuadIneq c;
      c.Q = q2[i] * D.Q2;
      c.c = q1[i] * D.a1;
      c.c[L.aux()] -= 1.0;
      c.d = q1[i] * D.b1 + q2[i] * D.b2;
      p.constraints.emplace_back(std::move(c));
    }
  };
  plan.complete_start = [&](const convex::ConvexProblem&, RVec& v) {
    for (int k = 0; k < nz.n_users; ++k) {
      const auto la = detail::rate_proxy(nz, L, k, cur[static_cast<std::size_t>(k)]);
      const double arg = la.a.dot(v) + la.b;
      if (!(arg > 0.0)) return false;
      v[L.mu(k)] = std::log(arg) - 0.1;
    }
    v[L.aux()] = 0.0;
    const double d1 = D.a1.dot(v) + D.b1, d2 = v.dot(D.Q2 * v) + D.b2;
    v[L.aux()] = std::max(q1[0] * d1 + q2[0] * d2, q1[1] * d1 + q2[1] * d2) + 0.1;
    return true;
  };
  plan.objective = [&](const RVec& v) { return v[L.aux()]; };

  auto sca = detail::run_lifted_sca(nz, L, plan, *xf);
  pt.trajectory = std::move(sca.trajectory);
  pt.iterations = sca.iterations;
  pt.converged = sca.converged;
  pt.status = sca.status;
  if (sca.iterations == 0) return pt;

  const auto lv = detail::lifted_values(nz, L, sca.v, sca.cbar);
  pt.f1_relaxed = lv.f1;
  pt.f2_relaxed = lv.f2;
  pt.alpha = sca.v[L.aux()];

  const CMat A = metrics::steering_matrix(nz.n_tx, s.grid);
  auto selector = [&](const CVec& x) {
    const double f1 = -metrics::sum_rate(s, x, cfg);
    const double f2 = metrics::optimal_mse(metrics::beampattern_gain_vec(x, A), s.desired_gain);
    return scalarize_tchebycheff(f1, f2, utopia, w).alpha;
  };
  pt.design = detail::extract_design(lv, s, cfg, selector, seed);
  pt.f1 = -pt.design.report.sum_rate_bps;
  pt.f2 = pt.design.report.mse;
  pt.alpha_extracted = scalarize_tchebycheff(pt.f1, pt.f2, utopia, w).alpha;
  return pt;
}

}  // namespace isac::algo
