#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/common.hpp"

namespace isac::convex {

// The decision vector is v = [u; p], where u is the real vector block and p
// holds the m*m real parameters of the Hermitian block R: the m diagonal
// entries first, then (Re R_pq, Im R_pq) for p < q in row-major order.

/// Number of real parameters describing an m x m Hermitian matrix.
inline int hermitian_param_count(int m) { return m * m; }
CMat hermitian_from_params(const RVec& p, int m);
RVec params_from_hermitian(const CMat& R);
/// Coefficients c with c^T p = Re tr(G^H R(p)) for Hermitian G.
RVec hermitian_gradient(const CMat& G);

/// a^T v <= b
struct AffineIneq {
  RVec a;
  double b = 0.0;
};
/// a^T v = b
struct AffineEq {
  RVec a;
  double b = 0.0;
};
/// sum_{i in indices} v_i^2 <= radius_sq
struct Ball {
  std::vector<int> indices;
  double radius_sq = 1.0;
};
/// v^T Q v + c^T v + d <= 0 with Q PSD.
struct ConvexQuadIneq {
  RMat Q;
  RVec c;
  double d = 0.0;
};
/// v_mu <= log(a^T v + b)
struct LogAffine {
  int mu_index = 0;
  RVec a;
  double b = 0.0;
};
/// R >= 0
struct PsdCone {};
/// tr R <= cap
struct TraceCap {
  double cap = 1.0;
};

using Constraint = std::variant<AffineIneq, AffineEq, Ball, ConvexQuadIneq, LogAffine, PsdCone, TraceCap>;

/// weight * log(a^T v + b), subtracted from the objective.
struct LogTerm {
  double weight = 1.0;
  RVec a;
  double b = 0.0;
};

/// v^T Q v + c^T v - sum_i w_i log(a_i^T v + b_i). An empty Q means zero.
struct Objective {
  RMat Q;
  RVec c;
  std::vector<LogTerm> logs;
};

struct ConvexProblem {
  int vector_dim = 0;
  int matrix_dim = 0;
  Objective objective;
  std::vector<Constraint> constraints;

  ConvexProblem() = default;
  ConvexProblem(int n, int m);

  int dim() const { return vector_dim + hermitian_param_count(matrix_dim); }
  int matrix_offset() const { return vector_dim; }

  /// Zero-padded coefficient vector of length dim().
  RVec zeros() const { return RVec::Zero(dim()); }
  /// Embeds Hermitian-block coefficients (length m*m) into a full-length vector.
  RVec lift_matrix_coeffs(const RVec& pc) const;

  RVec vector_block(const RVec& v) const { return v.head(vector_dim); }
  CMat matrix_block(const RVec& v) const;
  RVec pack(const RVec& u, const CMat& R) const;

  double objective_value(const RVec& v) const;
  RVec objective_gradient(const RVec& v) const;

  bool has_psd() const;

  /// Throws InvalidArgument on dimension errors or an indefinite quadratic.
  void validate() const;
};

/// Value f(v) of the constraint written as f(v) <= 0 (or = 0 for equalities).
/// PsdCone reports -lambda_min(R).
double constraint_value(const ConvexProblem& p, const Constraint& c, const RVec& v);
/// Largest violation over all constraints; 0 when feasible.
double max_violation(const ConvexProblem& p, const RVec& v);

nlohmann::json to_json(const ConvexProblem& p);

}  // namespace isac::convex
