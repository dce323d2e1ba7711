#include "isac/convex/projection.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace isac::convex {

namespace {

Eigen::SelfAdjointEigenSolver<CMat> hermitian_eig(const CMat& H) {
  if (H.rows() != H.cols()) throw InvalidArgument("projection: matrix not square");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidArgument("projection: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  if (es.info() != Eigen::Success) throw std::runtime_error("projection: eigendecomposition failed");
  return es;
}

CMat rebuild(const Eigen::SelfAdjointEigenSolver<CMat>& es, const RVec& lam) {
  const CMat& V = es.eigenvectors();
  CMat R = V * lam.asDiagonal() * V.adjoint();
  return 0.5 * (R + R.adjoint());
}

}  // namespace

CMat psd_project(const CMat& H) {
  auto es = hermitian_eig(H);
  return rebuild(es, es.eigenvalues().cwiseMax(0.0));
}

RVec capped_simplex_project(const RVec& x, double cap) {
  if (!(cap > 0.0)) throw InvalidArgument("capped_simplex_project: cap must be > 0");
  RVec c = x.cwiseMax(0.0);
  if (c.sum() <= cap) return c;
  // Shift tau so that sum max(x - tau, 0) = cap (sort-based rule).
  std::vector<double> s(x.data(), x.data() + x.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double acc = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    acc += s[k];
    const double cand = (acc - cap) / static_cast<double>(k + 1);
    if (k + 1 == s.size() || s[k + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  return (x.array() - tau).cwiseMax(0.0).matrix();
}

CMat psd_trace_project(const CMat& H, double cap) {
  if (!(cap > 0.0)) throw InvalidArgument("psd_trace_project: cap must be > 0");
  auto es = hermitian_eig(H);
  return rebuild(es, capped_simplex_project(es.eigenvalues(), cap));
}

}  // namespace isac::convex
