#include "isac/convex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace isac::convex {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::MaxIters: return "MaxIters";
    case Status::Infeasible: return "Infeasible";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Inequality f(x) <= 0 in solver form. `x` is the original decision vector;
// in phase I an extra slack s sits at index n_orig and shifted atoms read f - s.
struct Ineq {
  enum class Kind { Affine, Ball, Quad, Log, Exp, Floor } kind = Kind::Affine;
  RVec a;
  double b = 0.0;
  std::vector<int> idx;
  RVec center;
  const RMat* Q = nullptr;
  int mu = 0;
  bool shift = false;
  int source = -1;  // index into ConvexProblem::constraints
};

struct Model {
  const ConvexProblem* p = nullptr;
  bool phase1 = false;
  int n_orig = 0;
  int n = 0;
  int m = 0;
  int off = 0;
  bool psd = false;
  RMat A;
  RVec beq;
  std::vector<Ineq> ineqs;
  RVec trace_coeffs;  // tr R as a linear functional on the full vector

  int slack() const { return n_orig; }
  int barrier_count() const { return static_cast<int>(ineqs.size()) + (psd ? m : 0); }
};

std::vector<Ineq> translate(const ConvexProblem& p, const RVec& trace_coeffs, bool exp_form) {
  std::vector<Ineq> out;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    Ineq q;
    q.source = static_cast<int>(i);
    if (auto* a = std::get_if<AffineIneq>(&c)) {
      q.kind = Ineq::Kind::Affine;
      q.a = a->a;
      q.b = a->b;
    } else if (auto* bl = std::get_if<Ball>(&c)) {
      q.kind = Ineq::Kind::Ball;
      q.idx = bl->indices;
      q.center = RVec::Zero(static_cast<Eigen::Index>(bl->indices.size()));
      q.b = bl->radius_sq;
    } else if (auto* qd = std::get_if<ConvexQuadIneq>(&c)) {
      q.kind = Ineq::Kind::Quad;
      q.Q = &qd->Q;
      q.a = qd->c;
      q.b = -qd->d;
    } else if (auto* l = std::get_if<LogAffine>(&c)) {
      q.kind = exp_form ? Ineq::Kind::Exp : Ineq::Kind::Log;
      q.mu = l->mu_index;
      q.a = l->a;
      q.b = l->b;
    } else if (auto* tc = std::get_if<TraceCap>(&c)) {
      q.kind = Ineq::Kind::Affine;
      q.a = trace_coeffs;
      q.b = tc->cap;
    } else {
      continue;  // equalities and the PSD cone are handled separately
    }
    out.push_back(std::move(q));
  }
  return out;
}

// f value; Log atoms outside their domain return +inf.
double ineq_value(const Model& M, const Ineq& q, const RVec& v) {
  const auto x = v.head(M.n_orig);
  double f = 0.0;
  switch (q.kind) {
    case Ineq::Kind::Affine: f = q.a.dot(x) - q.b; break;
    case Ineq::Kind::Ball:
      for (std::size_t j = 0; j < q.idx.size(); ++j) {
        const double d = x[q.idx[j]] - q.center[static_cast<Eigen::Index>(j)];
        f += d * d;
      }
      f -= q.b;
      break;
    case Ineq::Kind::Quad: f = x.dot(*q.Q * x) + q.a.dot(x) - q.b; break;
    case Ineq::Kind::Log: {
      const double arg = q.a.dot(x) + q.b;
      if (!(arg > 0.0)) return kInf;
      f = x[q.mu] - std::log(arg);
      break;
    }
    case Ineq::Kind::Exp: f = std::exp(x[q.mu]) - (q.a.dot(x) + q.b); break;
    case Ineq::Kind::Floor: return -v[M.slack()] - 1.0;
  }
  return q.shift ? f - v[M.slack()] : f;
}

RVec ineq_gradient(const Model& M, const Ineq& q, const RVec& v) {
  const auto x = v.head(M.n_orig);
  RVec g = RVec::Zero(M.n);
  switch (q.kind) {
    case Ineq::Kind::Affine: g.head(M.n_orig) = q.a; break;
    case Ineq::Kind::Ball:
      for (std::size_t j = 0; j < q.idx.size(); ++j)
        g[q.idx[j]] += 2.0 * (x[q.idx[j]] - q.center[static_cast<Eigen::Index>(j)]);
      break;
    case Ineq::Kind::Quad: g.head(M.n_orig) = 2.0 * (*q.Q * x) + q.a; break;
    case Ineq::Kind::Log: g.head(M.n_orig) = -q.a / (q.a.dot(x) + q.b); g[q.mu] += 1.0; break;
    case Ineq::Kind::Exp: g.head(M.n_orig) = -q.a; g[q.mu] += std::exp(x[q.mu]); break;
    case Ineq::Kind::Floor: g[M.slack()] = -1.0; return g;
  }
  if (q.shift) g[M.slack()] -= 1.0;
  return g;
}

void add_ineq_hessian(const Model& M, const Ineq& q, const RVec& v, double w, RMat& H) {
  const auto x = v.head(M.n_orig);
  switch (q.kind) {
    case Ineq::Kind::Ball:
      for (int i : q.idx) H(i, i) += 2.0 * w;
      break;
    case Ineq::Kind::Quad: H.topLeftCorner(M.n_orig, M.n_orig) += 2.0 * w * *q.Q; break;
    case Ineq::Kind::Log: {
      const double arg = q.a.dot(x) + q.b;
      H.topLeftCorner(M.n_orig, M.n_orig).noalias() += (w / (arg * arg)) * q.a * q.a.transpose();
      break;
    }
    case Ineq::Kind::Exp: H(q.mu, q.mu) += w * std::exp(x[q.mu]); break;
    default: break;
  }
}

CMat model_matrix(const Model& M, const RVec& v) {
  CMat R = hermitian_from_params(v.segment(M.off, hermitian_param_count(M.m)), M.m);
  if (M.phase1) R.diagonal().array() += v[M.slack()];
  return R;
}

double f0_value(const Model& M, const RVec& v) {
  return M.phase1 ? v[M.slack()] : M.p->objective_value(v.head(M.n_orig));
}

bool objective_domain_ok(const Model& M, const RVec& v) {
  if (M.phase1) return true;
  for (const auto& t : M.p->objective.logs)
    if (!(t.a.dot(v.head(M.n_orig)) + t.b > 0.0)) return false;
  return true;
}

// F = t f0 + barrier. Returns false outside the domain.
bool barrier_value(const Model& M, const RVec& v, double t, double& F) {
  if (!objective_domain_ok(M, v)) return false;
  F = t * f0_value(M, v);
  for (const auto& q : M.ineqs) {
    const double f = ineq_value(M, q, v);
    if (!(f < 0.0)) return false;
    F -= std::log(-f);
  }
  if (M.psd) {
    Eigen::LLT<CMat> llt(model_matrix(M, v));
    if (llt.info() != Eigen::Success) return false;
    const auto d = llt.matrixLLT().diagonal().real();
    if (!(d.minCoeff() > 0.0)) return false;
    F -= 2.0 * d.array().log().sum();
  }
  return std::isfinite(F);
}

// Column i of S E_i S for the Hermitian basis, plus S^2 for the phase-I shift.
void add_psd_derivatives(const Model& M, const CMat& S, RVec& g, RMat& H) {
  const int m = M.m;
  const int np = hermitian_param_count(m);
  g.segment(M.off, np) -= hermitian_gradient(S);
  std::vector<CMat> X;
  X.reserve(static_cast<std::size_t>(np));
  for (int i = 0; i < m; ++i) X.push_back(S.col(i) * S.col(i).adjoint());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const CMat P = S.col(i) * S.col(j).adjoint();
      X.push_back(P + P.adjoint());
      X.push_back(cdouble(0, 1) * (P - P.adjoint()));
    }
  for (int i = 0; i < np; ++i) H.block(M.off, M.off + i, np, 1) += hermitian_gradient(X[static_cast<std::size_t>(i)]);
  if (M.phase1) {
    const int s = M.slack();
    g[s] -= S.trace().real();
    const CMat S2 = S * S;
    const RVec cross = hermitian_gradient(S2);
    H.block(M.off, s, np, 1) += cross;
    H.block(s, M.off, 1, np) += cross.transpose();
    H(s, s) += S2.trace().real();
  }
}

void barrier_derivatives(const Model& M, const RVec& v, double t, RVec& g, RMat& H) {
  g = RVec::Zero(M.n);
  H = RMat::Zero(M.n, M.n);
  if (M.phase1) {
    g[M.slack()] = t;
  } else {
    const auto x = v.head(M.n_orig);
    g.head(M.n_orig) = t * M.p->objective_gradient(x);
    if (M.p->objective.Q.size()) H.topLeftCorner(M.n_orig, M.n_orig) += 2.0 * t * M.p->objective.Q;
    for (const auto& lt : M.p->objective.logs) {
      const double arg = lt.a.dot(x) + lt.b;
      H.topLeftCorner(M.n_orig, M.n_orig).noalias() += (t * lt.weight / (arg * arg)) * lt.a * lt.a.transpose();
    }
  }
  for (const auto& q : M.ineqs) {
    const double f = ineq_value(M, q, v);
    const RVec gi = ineq_gradient(M, q, v);
    g += gi / (-f);
    H.noalias() += (1.0 / (f * f)) * gi * gi.transpose();
    add_ineq_hessian(M, q, v, 1.0 / (-f), H);
  }
  if (M.psd) {
    const CMat R = model_matrix(M, v);
    Eigen::LLT<CMat> llt(R);
    const CMat S = llt.solve(CMat::Identity(M.m, M.m));
    add_psd_derivatives(M, 0.5 * (S + S.adjoint()), g, H);
  }
  H = 0.5 * (H + H.transpose());
}

struct NewtonResult {
  Status status = Status::Optimal;
  bool early_exit = false;  // phase I found a strictly feasible point
  double t = 1.0;
};

// Newton step for the equality-constrained barrier problem.
bool newton_direction(const Model& M, const RVec& v, const RVec& g, const RMat& H, RVec& dv) {
  const int p = static_cast<int>(M.A.rows());
  if (p == 0) {
    Eigen::LDLT<RMat> ldlt(H);
    dv = ldlt.solve(-g);
    if (ldlt.info() == Eigen::Success && dv.allFinite()) return true;
    dv = H.fullPivLu().solve(-g);
    return dv.allFinite();
  }
  RMat K = RMat::Zero(M.n + p, M.n + p);
  K.topLeftCorner(M.n, M.n) = H;
  K.topRightCorner(M.n, p) = M.A.transpose();
  K.bottomLeftCorner(p, M.n) = M.A;
  RVec rhs(M.n + p);
  rhs.head(M.n) = -g;
  rhs.tail(p) = -(M.A * v - M.beq);
  RVec sol = K.partialPivLu().solve(rhs);
  if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-6 * (1.0 + rhs.norm())) sol = K.fullPivLu().solve(rhs);
  dv = sol.head(M.n);
  return dv.allFinite();
}

NewtonResult barrier_method(const Model& M, RVec& v, const SolverConfig& cfg, int& steps, double newton_tol) {
  NewtonResult res;
  double t = cfg.t0;
  const int m_eff = M.barrier_count();
  while (true) {
    // Centering.
    int polish = 0;
    bool final_round = false;
    for (;;) {
      const double gap_scale = std::max(1.0, std::abs(f0_value(M, v)));
      final_round = m_eff == 0 || m_eff / t <= cfg.tol * gap_scale;
      RVec g;
      RMat H;
      barrier_derivatives(M, v, t, g, H);
      RVec dv;
      if (!newton_direction(M, v, g, H, dv)) {
        res.status = Status::NumericalFailure;
        res.t = t;
        return res;
      }
      const double lambda2 = std::max(0.0, dv.dot(H * dv));
      const double tol_here = final_round ? 1e-22 : newton_tol;
      if (lambda2 / 2.0 <= tol_here) break;
      if (final_round && ++polish > 8) break;
      if (steps >= cfg.max_iters) {
        res.status = Status::MaxIters;
        res.t = t;
        return res;
      }
      double F0 = 0.0;
      barrier_value(M, v, t, F0);
      const double slope = g.dot(dv);
      double alpha = 1.0;
      double F1 = 0.0;
      while (alpha > 1e-16 && !barrier_value(M, v + alpha * dv, t, F1)) alpha *= cfg.backtrack;
      // Inside the quadratic-convergence region the full step is accepted;
      // F itself is too large there for Armijo to resolve the decrease.
      const bool quadratic = lambda2 < 1e-6;
      while (!quadratic && alpha > 1e-16 && F1 > F0 + cfg.armijo * alpha * slope) {
        alpha *= cfg.backtrack;
        if (!barrier_value(M, v + alpha * dv, t, F1)) F1 = kInf;
      }
      ++steps;
      if (alpha <= 1e-16) break;  // no further progress in floating point
      v += alpha * dv;
      if (M.phase1 && v[M.slack()] < -1e-3) {
        res.early_exit = true;
        res.t = t;
        return res;
      }
    }
    if (M.phase1 && v[M.slack()] < 0.0) {
      res.early_exit = true;
      res.t = t;
      return res;
    }
    if (final_round) break;
    t *= cfg.mu;
  }
  res.t = t;
  return res;
}

RVec constraint_gradient(const ConvexProblem& p, const Constraint& c, const RVec& v, const RVec& trace_coeffs) {
  Model M;
  M.p = &p;
  M.n_orig = M.n = p.dim();
  ConvexProblem tmp(p.vector_dim, p.matrix_dim);
  tmp.constraints = {c};
  auto one = translate(tmp, trace_coeffs, false);
  if (one.empty()) return RVec::Zero(p.dim());
  return ineq_gradient(M, one.front(), v);
}

RVec trace_functional(const ConvexProblem& p) {
  if (p.matrix_dim == 0) return p.zeros();
  return p.lift_matrix_coeffs(hermitian_gradient(CMat::Identity(p.matrix_dim, p.matrix_dim)));
}

void equality_system(const ConvexProblem& p, RMat& A, RVec& b) {
  std::vector<const AffineEq*> eqs;
  for (const auto& c : p.constraints)
    if (auto* e = std::get_if<AffineEq>(&c)) eqs.push_back(e);
  A.resize(static_cast<Eigen::Index>(eqs.size()), p.dim());
  b.resize(static_cast<Eigen::Index>(eqs.size()));
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = eqs[i]->a.transpose();
    b[static_cast<Eigen::Index>(i)] = eqs[i]->b;
  }
}

RVec lagrangian_gradient(const ConvexProblem& p, const RVec& v, const Duals& d, const RVec& trace_coeffs) {
  RVec g = p.objective_gradient(v);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (std::holds_alternative<AffineEq>(c) || std::holds_alternative<PsdCone>(c)) continue;
    const double l = d.lambda[static_cast<Eigen::Index>(i)];
    if (l != 0.0) g += l * constraint_gradient(p, c, v, trace_coeffs);
  }
  if (p.matrix_dim > 0 && d.Z.size()) g -= p.lift_matrix_coeffs(hermitian_gradient(d.Z));
  RMat A;
  RVec b;
  equality_system(p, A, b);
  if (A.rows() && d.nu.size()) g += A.transpose() * d.nu;
  return g;
}

}  // namespace

KktResiduals kkt_residuals(const ConvexProblem& p, const RVec& v, const Duals& d) {
  const RVec tc = trace_functional(p);
  KktResiduals r;
  r.primal = max_violation(p, v);
  const double g0 = p.objective_gradient(v).norm();
  r.dual = lagrangian_gradient(p, v, d, tc).norm() / std::max(1.0, g0);
  double comp = 0.0;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (std::holds_alternative<AffineEq>(c) || std::holds_alternative<PsdCone>(c)) continue;
    comp += std::abs(d.lambda[static_cast<Eigen::Index>(i)] * constraint_value(p, c, v));
  }
  if (p.matrix_dim > 0 && d.Z.size()) comp += std::abs((d.Z.adjoint() * p.matrix_block(v)).trace().real());
  r.gap = comp / std::max(1.0, std::abs(p.objective_value(v)));
  return r;
}

namespace {

// Least-squares multipliers on an estimated active set. Without a central
// path the active set is every constraint within 1e-6 of its bound; with one
// (multipliers `cp` at barrier parameter t) a constraint is active when its
// multiplier exceeds its slack, which is scale-free since their product is 1/t.
Duals estimate_duals(const ConvexProblem& p, const RVec& v, const Duals* cp = nullptr, double t = 0.0) {
  const RVec tc = trace_functional(p);
  constexpr double kActive = 1e-6;
  auto is_active = [&](std::size_t i, double value) {
    if (!cp) return value >= -kActive;
    return cp->lambda[static_cast<Eigen::Index>(i)] >= -value;
  };

  // Unknown multipliers: active inequalities (>= 0), PSD dual on the near-null
  // space (Hermitian, projected afterwards), equality multipliers (free).
  std::vector<int> active;
  std::vector<RVec> cols;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (std::holds_alternative<AffineEq>(c) || std::holds_alternative<PsdCone>(c)) continue;
    if (is_active(i, constraint_value(p, c, v))) {
      active.push_back(static_cast<int>(i));
      cols.push_back(constraint_gradient(p, c, v, tc));
    }
  }
  CMat U;
  int r_null = 0;
  if (p.has_psd()) {
    Eigen::SelfAdjointEigenSolver<CMat> es(p.matrix_block(v));
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < p.matrix_dim; ++i) {
      const double r = es.eigenvalues()[i];
      if (cp ? r * r * t <= 1.0 : r <= kActive * scale) ++r_null;
    }
    U = es.eigenvectors().leftCols(r_null);
  }
  std::vector<CMat> zbasis;
  for (int i = 0; i < r_null; ++i) {
    CMat E = CMat::Zero(r_null, r_null);
    E(i, i) = 1.0;
    zbasis.push_back(E);
    for (int j = i + 1; j < r_null; ++j) {
      CMat Er = CMat::Zero(r_null, r_null), Ei = CMat::Zero(r_null, r_null);
      Er(i, j) = Er(j, i) = 1.0;
      Ei(i, j) = cdouble(0, 1);
      Ei(j, i) = cdouble(0, -1);
      zbasis.push_back(Er);
      zbasis.push_back(Ei);
    }
  }
  RMat A;
  RVec b;
  equality_system(p, A, b);

  const RVec g0 = p.objective_gradient(v);
  std::vector<bool> keep(active.size(), true);
  Duals d;
  RVec coef;
  for (;;) {
    std::vector<RVec> all;
    std::vector<int> which;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (keep[i]) {
        all.push_back(cols[i]);
        which.push_back(static_cast<int>(i));
      }
    for (const auto& E : zbasis) all.push_back(-p.lift_matrix_coeffs(hermitian_gradient(U * E * U.adjoint())));
    for (Eigen::Index i = 0; i < A.rows(); ++i) all.push_back(A.row(i).transpose());
    RMat C(p.dim(), static_cast<Eigen::Index>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) C.col(static_cast<Eigen::Index>(i)) = all[i];
    coef = all.empty() ? RVec() : RVec(C.completeOrthogonalDecomposition().solve(-g0));
    int worst = -1;
    double worst_val = 0.0;
    for (std::size_t i = 0; i < which.size(); ++i)
      if (coef[static_cast<Eigen::Index>(i)] < worst_val) {
        worst_val = coef[static_cast<Eigen::Index>(i)];
        worst = which[i];
      }
    if (worst < 0) {
      d.lambda = RVec::Zero(static_cast<Eigen::Index>(p.constraints.size()));
      for (std::size_t i = 0; i < which.size(); ++i)
        d.lambda[active[static_cast<std::size_t>(which[i])]] = coef[static_cast<Eigen::Index>(i)];
      const auto nz = static_cast<Eigen::Index>(which.size());
      CMat W = CMat::Zero(r_null, r_null);
      for (std::size_t i = 0; i < zbasis.size(); ++i) W += coef[nz + static_cast<Eigen::Index>(i)] * zbasis[i];
      if (r_null > 0) {
        Eigen::SelfAdjointEigenSolver<CMat> es(W);
        W = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().adjoint();
        d.Z = U * W * U.adjoint();
      } else {
        d.Z = CMat::Zero(p.matrix_dim, p.matrix_dim);
      }
      d.nu = A.rows() ? RVec(coef.tail(A.rows())) : RVec();
      break;
    }
    keep[static_cast<std::size_t>(worst)] = false;
  }
  return d;
}

double worst(const KktResiduals& r) { return std::max({r.primal, r.dual, r.gap}); }

// Hermitian basis of r x r matrices: diagonal units, then symmetric and
// antisymmetric off-diagonal pairs.
std::vector<CMat> hermitian_basis(int r) {
  std::vector<CMat> out;
  for (int i = 0; i < r; ++i) {
    CMat E = CMat::Zero(r, r);
    E(i, i) = 1.0;
    out.push_back(E);
    for (int j = i + 1; j < r; ++j) {
      CMat Er = CMat::Zero(r, r), Ei = CMat::Zero(r, r);
      Er(i, j) = Er(j, i) = 1.0;
      Ei(i, j) = cdouble(0, 1);
      Ei(j, i) = cdouble(0, -1);
      out.push_back(Er);
      out.push_back(Ei);
    }
  }
  return out;
}

// Central-path multipliers are lambda_i = 1 / (t s_i) and Z = R^{-1} / t, so
// tiny slacks and eigenvalues carry their rounding (relative 1e-7 at the end
// of the path) into the stationarity residual. This correction leaves the
// primal point alone and solves the minimum-norm least-squares problem for
// relative changes lambda_i (1 + rho_i), Z^{1/2} (I + S) Z^{1/2} and a free
// shift of nu; |rho_i| < 1 and ||S|| < 1 keep the multipliers in their cones.
std::optional<Duals> correct_duals(const ConvexProblem& p, const RVec& v, const Duals& cp, const RVec& tc) {
  const RVec r0 = lagrangian_gradient(p, v, cp, tc);
  std::vector<RVec> cols;
  std::vector<int> lam_idx;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const double l = cp.lambda[static_cast<Eigen::Index>(i)];
    if (l <= 0.0) continue;
    lam_idx.push_back(static_cast<int>(i));
    cols.push_back(l * constraint_gradient(p, p.constraints[i], v, tc));
  }
  CMat Zh;
  std::vector<CMat> zbasis;
  if (p.matrix_dim > 0 && cp.Z.size()) {
    Eigen::SelfAdjointEigenSolver<CMat> es(cp.Z);
    Zh = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    zbasis = hermitian_basis(p.matrix_dim);
    for (const auto& E : zbasis) cols.push_back(-p.lift_matrix_coeffs(hermitian_gradient(Zh * E * Zh)));
  }
  RMat A;
  RVec b;
  equality_system(p, A, b);
  for (Eigen::Index i = 0; i < A.rows(); ++i) cols.push_back(A.row(i).transpose());
  if (cols.empty()) return std::nullopt;

  RMat C(p.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) C.col(static_cast<Eigen::Index>(i)) = cols[i];
  const RVec y = C.completeOrthogonalDecomposition().solve(-r0);
  if (!y.allFinite()) return std::nullopt;

  Duals d = cp;
  const auto nl = static_cast<Eigen::Index>(lam_idx.size());
  for (Eigen::Index k = 0; k < nl; ++k) {
    if (std::abs(y[k]) >= 1.0) return std::nullopt;
    d.lambda[lam_idx[static_cast<std::size_t>(k)]] *= 1.0 + y[k];
  }
  if (!zbasis.empty()) {
    CMat S = CMat::Zero(p.matrix_dim, p.matrix_dim);
    for (std::size_t e = 0; e < zbasis.size(); ++e) S += y[nl + static_cast<Eigen::Index>(e)] * zbasis[e];
    Eigen::SelfAdjointEigenSolver<CMat> es(S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) return std::nullopt;
    d.Z = Zh * (CMat::Identity(p.matrix_dim, p.matrix_dim) + S) * Zh;
  }
  if (A.rows()) {
    const auto off = nl + static_cast<Eigen::Index>(zbasis.size());
    d.nu = (cp.nu.size() ? cp.nu : RVec::Zero(A.rows())) + y.segment(off, A.rows());
  }
  return d;
}

}  // namespace

KktResiduals kkt_residuals(const ConvexProblem& p, const RVec& v) {
  p.validate();
  if (v.size() != p.dim()) throw InvalidArgument("kkt_residuals: candidate dimension");
  return kkt_residuals(p, v, estimate_duals(p, v));
}

Solution solve(const ConvexProblem& p, const SolverConfig& cfg, const std::optional<RVec>& start) {
  p.validate();
  Solution sol;
  const RVec tc = trace_functional(p);

  Model M;
  M.p = &p;
  M.n_orig = M.n = p.dim();
  M.m = p.matrix_dim;
  M.off = p.matrix_offset();
  M.psd = p.has_psd();
  M.trace_coeffs = tc;
  equality_system(p, M.A, M.beq);
  M.ineqs = translate(p, tc, false);

  RVec v = p.zeros();
  if (start) {
    if (start->size() != p.dim()) throw InvalidArgument("solve: start has wrong dimension");
    v = *start;
  } else if (p.matrix_dim > 0) {
    v = p.pack(RVec::Zero(p.vector_dim), CMat::Identity(p.matrix_dim, p.matrix_dim));
  }
  if (M.A.rows()) v += M.A.completeOrthogonalDecomposition().solve(M.beq - M.A * v);

  int steps = 0;
  double dummy = 0.0;
  if (!barrier_value(M, v, 1.0, dummy)) {
    // Phase I: minimise s subject to f_i(x) <= s, R + sI >= 0, s >= -1.
    sol.used_phase1 = true;
    Model P1 = M;
    P1.phase1 = true;
    P1.n = M.n_orig + 1;
    P1.A = RMat::Zero(M.A.rows(), P1.n);
    P1.A.leftCols(M.n_orig) = M.A;
    P1.ineqs = translate(p, tc, true);
    for (auto& q : P1.ineqs) q.shift = true;
    for (const auto& lt : p.objective.logs) {
      Ineq q;
      q.kind = Ineq::Kind::Affine;
      q.a = -lt.a;
      q.b = lt.b;
      q.shift = true;
      P1.ineqs.push_back(q);
    }
    Ineq floor;
    floor.kind = Ineq::Kind::Floor;
    P1.ineqs.push_back(floor);
    Ineq box;
    box.kind = Ineq::Kind::Ball;
    for (int i = 0; i < M.n_orig; ++i) box.idx.push_back(i);
    box.center = v;
    box.b = 1e8 * (1.0 + v.squaredNorm());
    P1.ineqs.push_back(box);

    RVec w(P1.n);
    w.head(M.n_orig) = v;
    double s0 = 0.0;
    w[M.n_orig] = 0.0;
    for (const auto& q : P1.ineqs)
      if (q.shift) s0 = std::max(s0, ineq_value(P1, q, w));
    if (M.psd) {
      Eigen::SelfAdjointEigenSolver<CMat> es(p.matrix_block(v), Eigen::EigenvaluesOnly);
      s0 = std::max(s0, -es.eigenvalues().minCoeff());
    }
    w[M.n_orig] = s0 + 1.0;
    if (!std::isfinite(s0)) {
      sol.status = Status::NumericalFailure;
      sol.message = "phase I: initial point outside every domain";
      sol.v = v;
      sol.u = p.vector_block(v);
      if (p.matrix_dim) sol.R = p.matrix_block(v);
      return sol;
    }
    SolverConfig c1 = cfg;
    auto r1 = barrier_method(P1, w, c1, steps, 1e-8);
    v = w.head(M.n_orig);
    if (!r1.early_exit) {
      sol.v = v;
      sol.u = p.vector_block(v);
      if (p.matrix_dim) sol.R = p.matrix_block(v);
      sol.objective = p.objective_value(v);
      sol.newton_steps = steps;
      sol.kkt.primal = max_violation(p, v);
      if (r1.status == Status::Optimal) {
        sol.status = Status::Infeasible;
        sol.message = "phase I optimum " + std::to_string(w[M.n_orig]) + " is not negative";
      } else {
        sol.status = r1.status;
        sol.message = "phase I did not finish";
      }
      return sol;
    }
    if (!barrier_value(M, v, 1.0, dummy)) {
      sol.status = Status::NumericalFailure;
      sol.message = "phase I point left the domain";
      sol.v = v;
      return sol;
    }
  }

  auto r2 = barrier_method(M, v, cfg, steps, 1e-10);
  sol.v = v;
  sol.u = p.vector_block(v);
  if (p.matrix_dim) sol.R = p.matrix_block(v);
  sol.objective = p.objective_value(v);
  sol.newton_steps = steps;

  // Central-path multipliers.
  Duals d;
  d.lambda = RVec::Zero(static_cast<Eigen::Index>(p.constraints.size()));
  for (const auto& q : M.ineqs) d.lambda[q.source] = 1.0 / (r2.t * -ineq_value(M, q, v));
  if (M.psd) {
    const CMat S = p.matrix_block(v).llt().solve(CMat::Identity(M.m, M.m));
    d.Z = 0.5 * (S + S.adjoint()) / r2.t;
  } else if (p.matrix_dim > 0) {
    d.Z = CMat::Zero(M.m, M.m);
  }
  if (M.A.rows()) {
    Duals d0 = d;
    d0.nu = RVec::Zero(M.A.rows());
    const RVec gl = lagrangian_gradient(p, v, d0, tc);
    d.nu = M.A.transpose().completeOrthogonalDecomposition().solve(-gl);
  }
  sol.duals = d;
  sol.kkt = kkt_residuals(p, v, d);
  if (worst(sol.kkt) > cfg.tol) {
    // Central-path multipliers inherit the rounding of near-null directions
    // of R; a least-squares refit on the near-active set is often sharper.
    const Duals central = d;
    for (const Duals& refit : {estimate_duals(p, v, &central, r2.t), estimate_duals(p, v)}) {
      const auto k2 = kkt_residuals(p, v, refit);
      if (worst(k2) < worst(sol.kkt)) {
        sol.duals = refit;
        sol.kkt = k2;
      }
    }
    if (auto corrected = correct_duals(p, v, central, tc)) {
      const auto k3 = kkt_residuals(p, v, *corrected);
      if (worst(k3) < worst(sol.kkt)) {
        sol.duals = *corrected;
        sol.kkt = k3;
      }
    }
  }

  if (r2.status != Status::Optimal) {
    sol.status = r2.status;
    return sol;
  }
  const bool within = sol.kkt.primal <= cfg.tol && sol.kkt.dual <= cfg.tol && sol.kkt.gap <= cfg.tol;
  sol.status = within ? Status::Optimal : Status::NumericalFailure;
  if (!within) sol.message = "residuals above tolerance";
  return sol;
}

}  // namespace isac::convex
