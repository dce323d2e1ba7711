#include "isac/algorithms/soop2.hpp"

#include <cmath>

#include "isac/algorithms/extraction.hpp"
#include "lifted.hpp"

namespace isac::algo {

Soop2Result solve_soop2(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed) {
  cfg.require_valid();
  const auto nz = detail::Normalized::build(s, cfg);
  const int nt = nz.n_tx;
  const auto L = static_cast<double>(nz.B.rows());
  const double gg = nz.desired.squaredNorm();
  const RVec bg = nz.B.transpose() * nz.desired;
  const RMat BtB = nz.B.transpose() * nz.B / L;

  auto mse_norm = [&](double eta, const RVec& p) { return (eta * nz.desired - nz.B * p).squaredNorm() / L; };
  auto eta_of = [&](const RVec& p) { return nz.desired.dot(nz.B * p) / gg; };

  const CMat iso = CMat::Identity(nt, nt) / static_cast<double>(nt);
  RVec p = convex::params_from_hermitian(iso);
  double eta = eta_of(p);
  double prev = mse_norm(eta, p);
  // Objective scaled to O(1) so the solver's relative tolerances act on M_s itself.
  const double scale = std::max(prev, 1e-300);

  Soop2Result res;
  bool failed = false;
  for (int it = 1; it <= cfg.max_iters_soop2; ++it) {
    convex::ConvexProblem prob(0, nt);
    prob.objective.Q = BtB / scale;
    prob.objective.c = -2.0 * eta * bg / L / scale;
    prob.constraints.emplace_back(convex::PsdCone{});
    prob.constraints.emplace_back(convex::AffineEq{prob.lift_matrix_coeffs(convex::hermitian_gradient(CMat::Identity(nt, nt))), 1.0});
    const RVec start = 0.9 * p + 0.1 * convex::params_from_hermitian(iso);
    const auto sol = convex::solve(prob, {}, start);

    TrajectoryEntry e;
    e.iteration = it;
    e.kkt = sol.kkt;
    e.newton_steps = sol.newton_steps;
    e.status = sol.status;
    if (sol.status != convex::Status::Optimal && !(sol.status != convex::Status::Infeasible && sol.kkt.primal <= 1e-7)) {
      res.trajectory.push_back(e);
      res.status = sol.status;
      failed = true;
      break;
    }
    p = sol.v;
    eta = eta_of(p);
    const double cur = mse_norm(eta, p);
    e.objective = cur * nz.mse_scale();
    e.f2 = e.objective;
    e.change = std::abs(cur - prev) * nz.mse_scale();
    res.trajectory.push_back(e);
    res.iterations = it;
    prev = cur;
    if (e.change <= cfg.eps2) {
      res.converged = true;
      break;
    }
  }

  res.R = nz.p_mw * convex::hermitian_from_params(p, nt);
  res.eta = eta * nz.p_mw;
  res.f2_star = prev * nz.mse_scale();
  res.rank_ratio = metrics::rank_ratio(res.R);
  res.rank_one = res.rank_ratio <= cfg.rank_one_tol;

  const CMat A = metrics::steering_matrix(nt, s.grid);
  auto mse_of = [&](const CVec& x) { return metrics::optimal_mse(metrics::beampattern_gain_vec(x, A), s.desired_gain); };
  if (res.rank_one) {
    res.x = center_ci_phase(metrics::principal_component(res.R), s, cfg);
  } else {
    const auto ex = gaussian_randomization(res.R, s, cfg, cfg.randomization_draws, mse_of, seed);
    res.x = ex.x;
    res.extraction_fallback = !ex.feasible_found;
  }
  res.mse_extracted = mse_of(res.x);
  if (!failed) res.status = res.converged ? convex::Status::Optimal : convex::Status::MaxIters;
  return res;
}

}  // namespace isac::algo
