#include "isac/algorithms/baselines.hpp"

#include <cmath>
#include <limits>

#include "isac/metrics.hpp"
#include "lifted.hpp"

namespace isac::algo {

namespace {

constexpr double kMuFloor = -50.0;

void pin(convex::ConvexProblem& p, int index, double value) {
  RVec a = p.zeros();
  a[index] = 1.0;
  p.constraints.emplace_back(convex::AffineEq{a, value});
}

void floor_mu(convex::ConvexProblem& p, const detail::LiftedLayout& L, double floor) {
  for (int k = 0; k < L.n_users; ++k) {
    RVec a = p.zeros();
    a[L.mu(k)] = -1.0;
    p.constraints.emplace_back(convex::AffineIneq{a, -floor});
  }
}

// mu_k = log(proxy) - 0.1, or false when the proxy argument is not positive.
bool fill_mu(const detail::Normalized& nz, const detail::LiftedLayout& L, const std::vector<cdouble>& cbar, RVec& v,
             double lo = -std::numeric_limits<double>::infinity()) {
  for (int k = 0; k < nz.n_users; ++k) {
    const auto la = detail::rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]);
    const double arg = la.a.dot(v) + la.b;
    if (!(arg > 0.0)) return false;
    const double hi = std::log(arg);
    if (std::isfinite(lo)) {
      if (!(hi > lo)) return false;
      v[L.mu(k)] = 0.5 * (lo + hi);
    } else {
      v[L.mu(k)] = hi - 0.1;
    }
  }
  return true;
}

}  // namespace

ParetoPoint weighted_sum_baseline(const model::ScenarioDraw& s, const Utopia& utopia, const ScalarizationWeights& w,
                                  const model::SystemConfig& cfg, std::uint64_t seed) {
  cfg.require_valid();
  utopia.validate();
  w.validate();
  const auto nz = detail::Normalized::build(s, cfg);
  const detail::LiftedLayout L(nz.n_tx, nz.n_users);

  ParetoPoint pt;
  pt.weights = w;
  double margin = 0.0;
  const auto xf = detail::ci_feasible_start(nz, cfg.max_iters_moop, margin);
  if (!xf) {
    pt.status = convex::Status::Infeasible;
    return pt;
  }

  const double rate_w = w.omega1 * nz.bandwidth * kLog2e / std::abs(utopia.f1_star);
  const RMat Q = L.lift_quadratic(nz.Q_ms) * (w.omega2 * nz.mse_scale() / utopia.f2_star);
  std::vector<cdouble> cur;

  detail::LiftedScaPlan plan;
  plan.max_iters = cfg.max_iters_moop;
  plan.eps_c = cfg.eps3 / nz.c_scale();
  plan.build = [&](convex::ConvexProblem& p, const std::vector<cdouble>& cbar) {
    cur = cbar;
    p.objective.Q = Q;
    for (int k = 0; k < nz.n_users; ++k) {
      p.objective.c[L.mu(k)] = -rate_w;
      p.constraints.emplace_back(detail::rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]));
    }
    if (rate_w == 0.0) floor_mu(p, L, kMuFloor);
    pin(p, L.aux(), 0.0);
  };
  plan.complete_start = [&](const convex::ConvexProblem&, RVec& v) {
    v[L.aux()] = 0.0;
    return fill_mu(nz, L, cur, v, rate_w == 0.0 ? kMuFloor : -std::numeric_limits<double>::infinity());
  };
  plan.objective = [&](const RVec& v) {
    double acc = v.dot(Q * v);
    for (int k = 0; k < nz.n_users; ++k) acc -= rate_w * v[L.mu(k)];
    return acc;
  };

  auto sca = detail::run_lifted_sca(nz, L, plan, *xf);
  pt.trajectory = std::move(sca.trajectory);
  pt.iterations = sca.iterations;
  pt.converged = sca.converged;
  pt.status = sca.status;
  if (sca.iterations == 0) return pt;

  const auto lv = detail::lifted_values(nz, L, sca.v, sca.cbar);
  pt.f1_relaxed = lv.f1;
  pt.f2_relaxed = lv.f2;
  auto ws = [&](double f1, double f2) { return w.omega1 * f1 / std::abs(utopia.f1_star) + w.omega2 * f2 / utopia.f2_star; };
  pt.alpha = ws(lv.f1, lv.f2);

  const CMat A = metrics::steering_matrix(nz.n_tx, s.grid);
  auto selector = [&](const CVec& x) {
    return ws(-metrics::sum_rate(s, x, cfg), metrics::optimal_mse(metrics::beampattern_gain_vec(x, A), s.desired_gain));
  };
  pt.design = detail::extract_design(lv, s, cfg, selector, seed);
  pt.f1 = -pt.design.report.sum_rate_bps;
  pt.f2 = pt.design.report.mse;
  pt.alpha_extracted = ws(pt.f1, pt.f2);
  return pt;
}

std::string to_string(SooMode m) {
  return m == SooMode::MseMinRateConstrained ? "mse_min_rate_constrained" : "rate_max_mse_constrained";
}

SooMode soo_mode_from_string(const std::string& s) {
  if (s == "mse_min_rate_constrained") return SooMode::MseMinRateConstrained;
  if (s == "rate_max_mse_constrained") return SooMode::RateMaxMseConstrained;
  throw InvalidArgument("mode: expected mse_min_rate_constrained or rate_max_mse_constrained, got '" + s + "'");
}

SooResult soo_baselines(const model::ScenarioDraw& s, double threshold, SooMode mode, const model::SystemConfig& cfg,
                        std::uint64_t seed) {
  cfg.require_valid();
  if (std::isnan(threshold)) throw InvalidArgument("threshold: NaN");
  const auto nz = detail::Normalized::build(s, cfg);
  const detail::LiftedLayout L(nz.n_tx, nz.n_users);
  const bool mse_mode = mode == SooMode::MseMinRateConstrained;
  const bool constrained = mse_mode ? threshold > 0.0 : std::isfinite(threshold);
  if (!mse_mode && !(threshold > 0.0)) throw InvalidArgument("threshold: MSE ceiling must be positive");

  SooResult res;
  double margin = 0.0;
  const auto xf = detail::ci_feasible_start(nz, cfg.max_iters_moop, margin);
  if (!xf) {
    res.status = convex::Status::Infeasible;
    return res;
  }

  // M_s of the isotropic covariance sets the scale of the sensing objective.
  const RVec iso = convex::params_from_hermitian(CMat::Identity(nz.n_tx, nz.n_tx) / nz.n_tx);
  const double ms_iso = std::max(iso.dot(nz.Q_ms * iso), 1e-12);
  const RMat Qs = L.lift_quadratic(nz.Q_ms);
  const double mu_floor = mse_mode && constrained ? threshold * std::log(2.0) / nz.bandwidth : kMuFloor;
  const double ceiling = constrained && !mse_mode ? threshold / nz.mse_scale() : 0.0;
  std::vector<cdouble> cur;

  detail::LiftedScaPlan plan;
  plan.max_iters = cfg.max_iters_moop;
  plan.eps_c = cfg.eps3 / nz.c_scale();
  plan.build = [&](convex::ConvexProblem& p, const std::vector<cdouble>& cbar) {
    cur = cbar;
    pin(p, L.aux(), 0.0);
    if (mse_mode) {
      p.objective.Q = Qs / ms_iso;
      if (constrained) {
        for (int k = 0; k < nz.n_users; ++k)
          p.constraints.emplace_back(detail::rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]));
        floor_mu(p, L, mu_floor);
      } else {
        for (int k = 0; k < nz.n_users; ++k) pin(p, L.mu(k), 0.0);
      }
    } else {
      for (int k = 0; k < nz.n_users; ++k) {
        p.objective.c[L.mu(k)] = -1.0;
        p.constraints.emplace_back(detail::rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]));
      }
      if (constrained) p.constraints.emplace_back(convex::ConvexQuadIneq{Qs / ceiling, p.zeros(), -1.0});
    }
  };
  plan.complete_start = [&](const convex::ConvexProblem&, RVec& v) {
    v[L.aux()] = 0.0;
    if (mse_mode && !constrained) {
      for (int k = 0; k < nz.n_users; ++k) v[L.mu(k)] = 0.0;
      return true;
    }
    if (!fill_mu(nz, L, cur, v, mse_mode ? mu_floor : -std::numeric_limits<double>::infinity())) return false;
    return !constrained || mse_mode || v.dot(Qs * v) < ceiling;
  };
  plan.objective = [&](const RVec& v) {
    if (mse_mode) return v.dot(Qs * v) * nz.mse_scale();
    double acc = 0.0;
    for (int k = 0; k < nz.n_users; ++k) acc += v[L.mu(k)];
    return -nz.bandwidth * kLog2e * acc;
  };

  auto sca = detail::run_lifted_sca(nz, L, plan, *xf);
  res.trajectory = std::move(sca.trajectory);
  res.iterations = sca.iterations;
  res.converged = sca.converged;
  res.status = sca.status;
  if (sca.iterations == 0) return res;

  const auto lv = detail::lifted_values(nz, L, sca.v, sca.cbar);
  res.f1_relaxed = lv.f1;
  res.f2_relaxed = lv.f2;

  const CMat A = metrics::steering_matrix(nz.n_tx, s.grid);
  auto selector = [&](const CVec& x) {
    const double mse = metrics::optimal_mse(metrics::beampattern_gain_vec(x, A), s.desired_gain);
    if (mse_mode) {
      double short_fall = 0.0;
      if (constrained)
        for (const auto& h : s.channels)
          short_fall += std::max(0.0, threshold - metrics::user_rate(h, x, cfg.noise_mw(), cfg.bandwidth_hz));
      return mse / (ms_iso * nz.mse_scale()) + 1e3 * short_fall;
    }
    const double over = constrained ? std::max(0.0, mse / threshold - 1.0) : 0.0;
    return -metrics::sum_rate(s, x, cfg) + 1e3 * over;
  };
  res.design = detail::extract_design(lv, s, cfg, selector, seed);
  res.f1 = -res.design.report.sum_rate_bps;
  res.f2 = res.design.report.mse;
  return res;
}

double gain_gap(double f1, double f2, const Utopia& u) {
  u.validate();
  const double d1 = (f1 - u.f1_star) / std::abs(u.f1_star);
  const double d2 = (f2 - u.f2_star) / std::abs(u.f2_star);
  return std::abs(d1 - d2);
}

}  // namespace isac::algo
