#include "isac/algorithms/soop1.hpp"

#include <cmath>

#include "isac/metrics.hpp"
#include "lifted.hpp"

namespace isac::algo {

namespace {

struct Linearised {
  RVec g;     // H H^T x~_t
  double q;   // ||H^T x~_t||^2
};

}  // namespace

Soop1Result solve_soop1(const model::ScenarioDraw& s, const model::SystemConfig& cfg) {
  cfg.require_valid();
  const auto nz = detail::Normalized::build(s, cfg);
  const int nt = nz.n_tx, K = nz.n_users, n2 = 2 * nt;
  Soop1Result res;
  res.x = CVec::Zero(nt);

  double margin = 0.0;
  const auto xs = detail::ci_feasible_start(nz, cfg.max_iters_soop1, margin);
  if (!xs) {
    res.status = convex::Status::Infeasible;
    return res;
  }

  std::vector<model::RealifiedUser> users;
  for (const auto& h : nz.h) users.push_back(model::realify_user(h));
  auto sum_exact = [&](const RVec& xt) {
    double acc = 0.0;
    for (const auto& u : users) acc += std::log1p((u.H.transpose() * xt).squaredNorm() / nz.noise);
    return acc;
  };

  const RVec x_centre = model::realify_vector(*xs * std::sqrt(0.999));
  RVec xt = x_centre;
  double prev = sum_exact(xt);
  bool failed = false;

  for (int it = 1; it <= cfg.max_iters_soop1; ++it) {
    std::vector<Linearised> lin;
    for (const auto& u : users) {
      const RVec Hx = u.H.transpose() * xt;
      lin.push_back({u.H * Hx, Hx.squaredNorm()});
    }
    convex::ConvexProblem p(n2 + K, 0);
    for (int k = 0; k < K; ++k) p.objective.c[n2 + k] = -1.0;
    for (int k = 0; k < K; ++k) {
      convex::LogAffine la;
      la.mu_index = n2 + k;
      la.a = p.zeros();
      la.a.head(n2) = (2.0 / nz.noise) * lin[static_cast<std::size_t>(k)].g;
      la.b = 1.0 - lin[static_cast<std::size_t>(k)].q / nz.noise;
      p.constraints.emplace_back(la);
    }
    for (int k = 0; k < K; ++k) {
      const auto& u = users[static_cast<std::size_t>(k)];
      const double rhs = -nz.gamma_sqrt[static_cast<std::size_t>(k)] * nz.tan_phi;
      RVec a1 = p.zeros(), a2 = p.zeros();
      a1.head(n2) = u.z - nz.tan_phi * u.z_tilde;
      a2.head(n2) = -u.z - nz.tan_phi * u.z_tilde;
      p.constraints.emplace_back(convex::AffineIneq{a1, rhs});
      p.constraints.emplace_back(convex::AffineIneq{a2, rhs});
    }
    std::vector<int> idx(static_cast<std::size_t>(n2));
    for (int i = 0; i < n2; ++i) idx[static_cast<std::size_t>(i)] = i;
    p.constraints.emplace_back(convex::Ball{idx, 1.0});

    // Strictly interior start: pull the incumbent towards the CI centre point.
    std::optional<RVec> start;
    for (double beta : {0.1, 0.01, 0.001}) {
      const RVec xb = (1.0 - beta) * xt + beta * x_centre;
      RVec v = p.zeros();
      v.head(n2) = xb;
      bool ok = true;
      for (int k = 0; k < K && ok; ++k) {
        const auto& l = lin[static_cast<std::size_t>(k)];
        const double arg = 1.0 + (2.0 * l.g.dot(xb) - l.q) / nz.noise;
        if (!(arg > 0.0)) ok = false;
        else v[n2 + k] = std::log(arg) - 0.1;
      }
      if (ok) {
        start = v;
        break;
      }
    }
    const auto sol = convex::solve(p, {}, start);

    TrajectoryEntry e;
    e.iteration = it;
    e.kkt = sol.kkt;
    e.newton_steps = sol.newton_steps;
    e.status = sol.status;
    const bool usable = sol.status == convex::Status::Optimal ||
                        (sol.status != convex::Status::Infeasible && sol.kkt.primal <= 1e-7);
    if (!usable) {
      res.status = sol.status;
      res.trajectory.push_back(e);
      failed = true;
      break;
    }
    xt = sol.u.head(n2);
    const double cur = sol.u.tail(K).sum();
    e.objective = cur;
    e.change = std::abs(cur - prev);
    const CVec x = nz.to_physical(model::complexify(xt));
    e.f1 = -metrics::sum_rate(s, x, cfg);
    res.trajectory.push_back(e);
    res.iterations = it;
    prev = cur;
    if (e.change <= cfg.eps1) {
      res.converged = true;
      break;
    }
  }

  res.x = nz.to_physical(model::complexify(xt));
  res.sum_rate = metrics::sum_rate(s, res.x, cfg);
  res.f1_star = -res.sum_rate;
  if (!failed) res.status = res.converged ? convex::Status::Optimal : convex::Status::MaxIters;
  return res;
}

}  // namespace isac::algo
