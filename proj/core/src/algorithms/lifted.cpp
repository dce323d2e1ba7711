#include "lifted.hpp"

#include <algorithm>

#include "isac/algorithms/extraction.hpp"
#include "isac/metrics.hpp"

namespace isac::algo::detail {

namespace {

int pair_index(int M, int i, int j) { return M + 2 * (i * (M - 1) - i * (i - 1) / 2 + (j - i - 1)); }

}  // namespace

Normalized Normalized::build(const model::ScenarioDraw& s, const model::SystemConfig& cfg) {
  Normalized nz;
  nz.n_tx = s.n_tx();
  nz.n_users = s.n_users();
  nz.p_mw = cfg.p_max_mw();
  double e = 0.0;
  for (const auto& h : s.channels) e += h.squaredNorm();
  nz.sigma = std::sqrt(e / std::max(1, nz.n_users));
  if (!(nz.sigma > 0.0)) throw InvalidArgument("scenario: all channels are zero");
  nz.noise = cfg.noise_mw() / (nz.p_mw * nz.sigma * nz.sigma);
  nz.tan_phi = std::tan(kPi / cfg.psk_order);
  nz.bandwidth = cfg.bandwidth_hz;
  for (int k = 0; k < nz.n_users; ++k) {
    nz.h.push_back(s.rotated_channel(k) / nz.sigma);
    nz.gamma_sqrt.push_back(std::sqrt(cfg.noise_mw() * cfg.gamma_linear(k)) / nz.c_scale());
  }

  const CMat A = metrics::steering_matrix(nz.n_tx, s.grid);
  const auto L = A.cols();
  nz.B.resize(L, convex::hermitian_param_count(nz.n_tx));
  for (Eigen::Index l = 0; l < L; ++l)
    nz.B.row(l) = convex::hermitian_gradient(A.col(l) * A.col(l).adjoint()).transpose();
  nz.desired = s.desired_gain;
  const double gg = nz.desired.squaredNorm();
  if (!(gg > 0.0)) throw InvalidArgument("degenerate desired beampattern");
  const RVec bg = nz.B.transpose() * nz.desired;
  nz.Q_ms = (nz.B.transpose() * nz.B - bg * bg.transpose() / gg) / static_cast<double>(L);
  nz.Q_ms = 0.5 * (nz.Q_ms + nz.Q_ms.transpose());
  return nz;
}

double Normalized::ci_margin(int k, cdouble c) const {
  return metrics::ci_margin_value(c, gamma_sqrt[static_cast<std::size_t>(k)], std::atan(tan_phi));
}

double Normalized::min_ci_margin(const CVec& xn) const {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_users; ++k) m = std::min(m, ci_margin(k, h[static_cast<std::size_t>(k)].dot(xn)));
  return m;
}

LiftedLayout::LiftedLayout(int nt, int k) : n_tx(nt), n_users(k), vector_dim(k + 1), matrix_dim(nt + 1) {
  const int M = matrix_dim;
  r_index.resize(static_cast<std::size_t>(nt * nt));
  for (int i = 0; i < nt; ++i) r_index[static_cast<std::size_t>(i)] = i;
  int kk = nt;
  for (int i = 0; i < nt; ++i)
    for (int j = i + 1; j < nt; ++j, kk += 2) {
      const int big = pair_index(M, i, j);
      r_index[static_cast<std::size_t>(kk)] = big;
      r_index[static_cast<std::size_t>(kk + 1)] = big + 1;
    }
  for (int i = 0; i < nt; ++i) {
    const int big = pair_index(M, i, nt);
    x_re.push_back(big);
    x_im.push_back(big + 1);
  }
}

RVec LiftedLayout::re_coeffs(const CVec& h) const {
  RVec a = RVec::Zero(vector_dim + matrix_dim * matrix_dim);
  for (int i = 0; i < n_tx; ++i) {
    a[param(x_re[static_cast<std::size_t>(i)])] = h[i].real();
    a[param(x_im[static_cast<std::size_t>(i)])] = h[i].imag();
  }
  return a;
}

RVec LiftedLayout::im_coeffs(const CVec& h) const {
  RVec a = RVec::Zero(vector_dim + matrix_dim * matrix_dim);
  for (int i = 0; i < n_tx; ++i) {
    a[param(x_re[static_cast<std::size_t>(i)])] = -h[i].imag();
    a[param(x_im[static_cast<std::size_t>(i)])] = h[i].real();
  }
  return a;
}

RMat LiftedLayout::lift_quadratic(const RMat& Q) const {
  const int n = vector_dim + matrix_dim * matrix_dim;
  RMat out = RMat::Zero(n, n);
  const auto np = static_cast<int>(r_index.size());
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      out(param(r_index[static_cast<std::size_t>(i)]), param(r_index[static_cast<std::size_t>(j)])) = Q(i, j);
  return out;
}

RVec LiftedLayout::lift_r_linear(const RVec& c) const {
  RVec out = RVec::Zero(vector_dim + matrix_dim * matrix_dim);
  for (std::size_t i = 0; i < r_index.size(); ++i) out[param(r_index[i])] = c[static_cast<Eigen::Index>(i)];
  return out;
}

CVec LiftedLayout::x_of(const RVec& v) const {
  CVec x(n_tx);
  for (int i = 0; i < n_tx; ++i)
    x[i] = cdouble(v[param(x_re[static_cast<std::size_t>(i)])], v[param(x_im[static_cast<std::size_t>(i)])]);
  return x;
}

RVec LiftedLayout::r_params(const RVec& v) const {
  RVec p(static_cast<Eigen::Index>(r_index.size()));
  for (std::size_t i = 0; i < r_index.size(); ++i) p[static_cast<Eigen::Index>(i)] = v[param(r_index[i])];
  return p;
}

CMat LiftedLayout::R_of(const RVec& v) const { return convex::hermitian_from_params(r_params(v), n_tx); }

RVec LiftedLayout::pack(const CMat& R, const CVec& x, const RVec& vec) const {
  CMat Rh(matrix_dim, matrix_dim);
  Rh.topLeftCorner(n_tx, n_tx) = R;
  Rh.topRightCorner(n_tx, 1) = x;
  Rh.bottomLeftCorner(1, n_tx) = x.adjoint();
  Rh(n_tx, n_tx) = 1.0;
  RVec v(vector_dim + matrix_dim * matrix_dim);
  v.head(vector_dim) = vec;
  v.tail(matrix_dim * matrix_dim) = convex::params_from_hermitian(Rh);
  return v;
}

convex::ConvexProblem lifted_base(const Normalized& nz, const LiftedLayout& L) {
  convex::ConvexProblem p(L.vector_dim, L.matrix_dim);
  p.constraints.emplace_back(convex::PsdCone{});
  RVec corner = p.zeros();
  corner[L.corner()] = 1.0;
  p.constraints.emplace_back(convex::AffineEq{corner, 1.0});
  RVec tr = p.zeros();
  for (int i = 0; i < L.n_tx; ++i) tr[L.param(i)] = 1.0;
  p.constraints.emplace_back(convex::AffineEq{tr, 1.0});
  for (int k = 0; k < nz.n_users; ++k) {
    const RVec re = L.re_coeffs(nz.h[static_cast<std::size_t>(k)]);
    const RVec im = L.im_coeffs(nz.h[static_cast<std::size_t>(k)]);
    const double rhs = -nz.gamma_sqrt[static_cast<std::size_t>(k)] * nz.tan_phi;
    p.constraints.emplace_back(convex::AffineIneq{RVec(im - nz.tan_phi * re), rhs});
    p.constraints.emplace_back(convex::AffineIneq{RVec(-im - nz.tan_phi * re), rhs});
  }
  return p;
}

convex::LogAffine rate_proxy(const Normalized& nz, const LiftedLayout& L, int k, cdouble cbar) {
  const CVec& h = nz.h[static_cast<std::size_t>(k)];
  convex::LogAffine la;
  la.mu_index = L.mu(k);
  la.a = (2.0 / nz.noise) * (cbar.real() * L.re_coeffs(h) + cbar.imag() * L.im_coeffs(h));
  la.b = 1.0 - std::norm(cbar) / nz.noise;
  return la;
}

std::optional<CVec> ci_feasible_start(const Normalized& nz, int max_iters, double& best_margin) {
  CVec x0 = CVec::Zero(nz.n_tx);
  for (const auto& h : nz.h) x0 += h / h.norm();
  if (x0.norm() > 0.0) {
    x0 /= x0.norm();
    best_margin = nz.min_ci_margin(x0);
    if (best_margin > 0.0) return x0;
  }

  // Max-min CI margin under the unit power budget: u = [x~; tau], minimise -tau.
  const int n2 = 2 * nz.n_tx;
  convex::ConvexProblem p(n2 + 1, 0);
  p.objective.c[n2] = -1.0;
  for (int k = 0; k < nz.n_users; ++k) {
    const auto ru = model::realify_user(nz.h[static_cast<std::size_t>(k)]);
    RVec a1 = p.zeros(), a2 = p.zeros();
    a1.head(n2) = ru.z - nz.tan_phi * ru.z_tilde;
    a2.head(n2) = -ru.z - nz.tan_phi * ru.z_tilde;
    a1[n2] = a2[n2] = 1.0;
    const double rhs = -nz.gamma_sqrt[static_cast<std::size_t>(k)] * nz.tan_phi;
    p.constraints.emplace_back(convex::AffineIneq{a1, rhs});
    p.constraints.emplace_back(convex::AffineIneq{a2, rhs});
  }
  std::vector<int> idx(static_cast<std::size_t>(n2));
  for (int i = 0; i < n2; ++i) idx[static_cast<std::size_t>(i)] = i;
  p.constraints.emplace_back(convex::Ball{idx, 1.0});

  RVec start = p.zeros();
  if (x0.norm() > 0.0) start.head(n2) = model::realify_vector(x0 * 0.5);
  start[n2] = nz.min_ci_margin(model::complexify(start.head(n2))) - 1.0;
  convex::SolverConfig sc;
  sc.max_iters = std::max(sc.max_iters, max_iters);
  const auto sol = convex::solve(p, sc, start);
  CVec x = model::complexify(sol.u.head(n2));
  if (x.norm() > 0.0) x /= x.norm();
  best_margin = nz.min_ci_margin(x);
  if (!(best_margin > 0.0)) return std::nullopt;
  return x;
}

double proxy_sum_mu(const Normalized& nz, const LiftedLayout& L, const RVec& v, const std::vector<cdouble>& cbar) {
  double acc = 0.0;
  for (int k = 0; k < nz.n_users; ++k) {
    const auto la = rate_proxy(nz, L, k, cbar[static_cast<std::size_t>(k)]);
    acc += std::log(std::max(la.a.dot(v) + la.b, 1e-300));
  }
  return acc;
}

LiftedValues lifted_values(const Normalized& nz, const LiftedLayout& L, const RVec& v,
                           const std::vector<cdouble>& cbar) {
  LiftedValues lv;
  lv.R = nz.p_mw * L.R_of(v);
  lv.R = 0.5 * (lv.R + lv.R.adjoint()).eval();
  lv.x = nz.to_physical(L.x_of(v));
  lv.f1 = -nz.bandwidth * kLog2e * proxy_sum_mu(nz, L, v, cbar);
  const RVec pr = L.r_params(v);
  lv.f2 = pr.dot(nz.Q_ms * pr) * nz.mse_scale();
  return lv;
}

WaveformDesign extract_design(const LiftedValues& lv, const model::ScenarioDraw& s, const model::SystemConfig& cfg,
                              const std::function<double(const CVec&)>& selector, std::uint64_t seed) {
  WaveformDesign d;
  d.R = lv.R;
  d.rank_ratio = metrics::rank_ratio(lv.R);
  d.rank_one = d.rank_ratio <= cfg.rank_one_tol;
  if (d.rank_one) {
    d.x = center_ci_phase(metrics::principal_component(lv.R), s, cfg);
  } else {
    const CVec extra[] = {lv.x, metrics::principal_component(lv.R)};
    const auto ex = gaussian_randomization(lv.R, s, cfg, cfg.randomization_draws, selector, seed, extra);
    d.x = ex.x;
    d.extraction_fallback = !ex.feasible_found;
  }
  d.report = metrics::evaluate_waveform(d.x, std::nullopt, s, cfg);
  d.report.rank_ratio = d.rank_ratio;
  return d;
}

LiftedScaResult run_lifted_sca(const Normalized& nz, const LiftedLayout& L, const LiftedScaPlan& plan,
                               const CVec& x_feasible) {
  const int nt = nz.n_tx, K = nz.n_users;
  // Strictly feasible anchor: R = x x^H + beta I / Nt with ||x||^2 = 1 - beta.
  double beta = 0.1;
  CVec xs = x_feasible;
  for (int tries = 0; tries < 30; ++tries, beta *= 0.5) {
    xs = x_feasible * std::sqrt(1.0 - beta);
    if (nz.min_ci_margin(xs) > 0.0) break;
  }
  const CMat Rs = xs * xs.adjoint() + beta / nt * CMat::Identity(nt, nt);
  const RVec anchor = L.pack(Rs, xs, RVec::Zero(L.vector_dim));

  LiftedScaResult res;
  std::vector<cdouble> cbar(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) cbar[static_cast<std::size_t>(k)] = nz.h[static_cast<std::size_t>(k)].dot(xs);
  RVec v = anchor;
  bool failed = false;

  for (int it = 1; it <= plan.max_iters; ++it) {
    auto p = lifted_base(nz, L);
    plan.build(p, cbar);

    std::optional<RVec> start;
    for (double w : {0.1, 0.01, 0.001}) {
      RVec cand = it == 1 ? anchor : RVec((1.0 - w) * v + w * anchor);
      if (plan.complete_start(p, cand)) {
        start = cand;
        break;
      }
      if (it == 1) break;
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
      res.trajectory.push_back(e);
      res.status = sol.status;
      failed = true;
      break;
    }
    v = sol.v;
    const CVec x = L.x_of(v);
    double change = 0.0;
    std::vector<cdouble> c(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      c[static_cast<std::size_t>(k)] = nz.h[static_cast<std::size_t>(k)].dot(x);
      change = std::max(change, std::abs(c[static_cast<std::size_t>(k)] - cbar[static_cast<std::size_t>(k)]));
    }
    e.objective = plan.objective(v);
    e.change = change * nz.c_scale();
    e.f1 = -nz.bandwidth * kLog2e * proxy_sum_mu(nz, L, v, cbar);
    const RVec pr = L.r_params(v);
    e.f2 = pr.dot(nz.Q_ms * pr) * nz.mse_scale();
    res.trajectory.push_back(e);
    res.iterations = it;
    res.cbar = cbar;
    cbar = c;
    if (change <= plan.eps_c) {
      res.converged = true;
      break;
    }
  }
  res.v = v;
  if (res.cbar.empty()) res.cbar = cbar;
  if (!failed) res.status = res.converged ? convex::Status::Optimal : convex::Status::MaxIters;
  return res;
}

}  // namespace isac::algo::detail
