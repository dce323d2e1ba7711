#pragma once

// Shared problem builders in normalized units: transmit power 1, channels
// divided by their RMS norm sigma, so every solver input is O(1).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "isac/algorithms/types.hpp"
#include "isac/convex/problem.hpp"
#include "isac/model.hpp"

namespace isac::algo::detail {

struct Normalized {
  int n_tx = 0;
  int n_users = 0;
  double p_mw = 1.0;
  double sigma = 1.0;                 // channel scale
  double noise = 1.0;                 // N0 / (P sigma^2)
  double tan_phi = 1.0;
  double bandwidth = 1.0;
  std::vector<CVec> h;                // symbol-rotated, scaled channels
  std::vector<double> gamma_sqrt;     // sqrt(N0 Gamma_k) / (sigma sqrt P)
  RMat B;                             // L x Nt^2, gains = B p(R)
  RVec desired;
  RMat Q_ms;                          // M_s with eta* substituted, on p(R)

  static Normalized build(const model::ScenarioDraw& s, const model::SystemConfig& cfg);

  /// Physical <-> normalized conversions.
  double c_scale() const { return sigma * std::sqrt(p_mw); }
  double mse_scale() const { return p_mw * p_mw; }
  CVec to_physical(const CVec& xn) const { return xn * std::sqrt(p_mw); }
  CVec to_normalized(const CVec& x) const { return x / std::sqrt(p_mw); }

  double ci_margin(int k, cdouble c) const;
  double min_ci_margin(const CVec& xn) const;
};

/// Layout of the lifted problem: vector block [mu_1..mu_K, aux], Hermitian
/// block [[R, x], [x^H, 1]] of size Nt + 1.
struct LiftedLayout {
  int n_tx = 0;
  int n_users = 0;
  int vector_dim = 0;
  int matrix_dim = 0;
  std::vector<int> r_index;  // parameter of R (Nt x Nt) -> parameter of the lifted block
  std::vector<int> x_re, x_im;

  explicit LiftedLayout(int n_tx, int n_users);

  int mu(int k) const { return k; }
  int aux() const { return n_users; }
  int param(int i) const { return vector_dim + i; }
  int corner() const { return vector_dim + n_tx; }

  /// Coefficients (full length) of Re(h^H x) and Im(h^H x).
  RVec re_coeffs(const CVec& h) const;
  RVec im_coeffs(const CVec& h) const;
  /// Lifts an Nt^2 quadratic form on p(R) to the full vector.
  RMat lift_quadratic(const RMat& Q) const;
  RVec lift_r_linear(const RVec& c) const;

  CVec x_of(const RVec& v) const;
  CMat R_of(const RVec& v) const;
  RVec r_params(const RVec& v) const;
  RVec pack(const CMat& R, const CVec& x, const RVec& vec) const;
};

/// Skeleton shared by the joint SCA and its baselines: PSD lifted block, corner = 1,
/// tr R = 1, CI cone on every c_k. Objective left empty.
convex::ConvexProblem lifted_base(const Normalized& nz, const LiftedLayout& L);

/// Linearised rate proxy: mu_k <= log(1 + lin_k(c_k) / N0) about cbar_k.
convex::LogAffine rate_proxy(const Normalized& nz, const LiftedLayout& L, int k, cdouble cbar);

/// Strictly CI-feasible unit-power vector: the aligned channel sum when it
/// qualifies, else the max-min CI margin design. Empty when infeasible.
std::optional<CVec> ci_feasible_start(const Normalized& nz, int max_iters, double& best_margin);

/// Hooks that specialise the lifted SCA loop.
struct LiftedScaPlan {
  /// Adds objective and scheme-specific constraints for the linearisation point cbar.
  std::function<void(convex::ConvexProblem&, const std::vector<cdouble>& cbar)> build;
  /// Fills the vector block of v (matrix block given) so that v is strictly
  /// feasible for p; returns false when that is impossible.
  std::function<bool(const convex::ConvexProblem& p, RVec& v)> complete_start;
  /// Scheme objective recorded in the trajectory.
  std::function<double(const RVec& v)> objective;
  int max_iters = 100;
  double eps_c = 1e-4;  // normalized units
};

struct LiftedScaResult {
  RVec v;
  std::vector<TrajectoryEntry> trajectory;
  int iterations = 0;
  bool converged = false;
  convex::Status status = convex::Status::NumericalFailure;
  std::vector<cdouble> cbar;  // linearisation point of the last subproblem
};

/// Iterates the lifted subproblem, refreshing cbar_k = h_k^H x, until
/// max_k |c_k^(t) - c_k^(t-1)| <= eps_c. `x_feasible` must be unit power and
/// strictly CI-feasible.
LiftedScaResult run_lifted_sca(const Normalized& nz, const LiftedLayout& L, const LiftedScaPlan& plan,
                               const CVec& x_feasible);

/// Physical relaxed values at a lifted solution v.
struct LiftedValues {
  CMat R;            // P * R_of(v)
  CVec x;            // sqrt(P) * x_of(v)
  double f1 = 0.0;   // -B log2(e) sum_k log(proxy_k)
  double f2 = 0.0;   // P^2 p^T Q_ms p
};
LiftedValues lifted_values(const Normalized& nz, const LiftedLayout& L, const RVec& v, const std::vector<cdouble>& cbar);

/// Rank-one extraction of a relaxed lifted design. Rank one within cfg's
/// tolerance: phase-centred principal component; otherwise Gaussian
/// randomization with the SCA x and the eigenvector as extra candidates.
WaveformDesign extract_design(const LiftedValues& lv, const model::ScenarioDraw& s, const model::SystemConfig& cfg,
                              const std::function<double(const CVec&)>& selector, std::uint64_t seed);

/// Largest mu_k allowed by the rate proxy at v (log of its affine argument).
double proxy_sum_mu(const Normalized& nz, const LiftedLayout& L, const RVec& v, const std::vector<cdouble>& cbar);

}  // namespace isac::algo::detail
