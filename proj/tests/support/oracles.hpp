#pragma once

// Reference implementations that share no code with the library solvers.

#include <random>
#include <string>
#include <vector>

#include "isac/convex/problem.hpp"

namespace isac::testing {

using Rng = std::mt19937_64;

/// Euclidean projection onto {R >= 0} by enumerating every active set of the
/// eigenvalue QP  min ||x - lambda||^2, x >= 0.
CMat brute_force_psd_projection(const CMat& H);
/// Same for {R >= 0, tr R <= cap}: active sets of x >= 0 plus the trace row.
CMat brute_force_psd_trace_projection(const CMat& H, double cap);

struct OracleResult {
  RVec v;
  double objective = 0.0;
  double violation = 0.0;
  int outer = 0;
};

/// Augmented Lagrangian with an accelerated projected-gradient inner loop.
/// Ball and PsdCone are handled by projection; the other atoms (LogAffine
/// in its exponential form) enter the Lagrangian. Objective log terms are not
/// supported.
OracleResult projected_gradient_oracle(const convex::ConvexProblem& p);

struct Instance {
  std::string combo;
  convex::ConvexProblem problem;
};

/// Atom combination of the realified sum-rate subproblem:
/// linear objective, LogAffine, AffineIneq, Ball (vector dim <= 6).
Instance random_sum_rate_instance(Rng& g);
/// Beampattern QSDP: quadratic on R, PsdCone and tr R = 1 (m <= 4).
Instance random_qsdp_instance(Rng& g);
/// Same with TraceCap instead of the trace equality.
Instance random_qsdp_cap_instance(Rng& g);
/// Lifted multi-objective subproblem: min alpha over [mu; alpha] and
/// [[R, x], [x^H, 1]] with LogAffine, ConvexQuadIneq, AffineIneq, AffineEq
/// and PsdCone (matrix dim <= 4).
Instance random_lifted_instance(Rng& g);

/// Random Hermitian and PSD matrices.
CMat random_hermitian(Rng& g, int n);
CMat random_psd(Rng& g, int n, int rank);
CVec random_cvec(Rng& g, int n);

}  // namespace isac::testing
