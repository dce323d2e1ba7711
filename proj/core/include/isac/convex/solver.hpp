#pragma once

#include <optional>
#include <string>

#include "isac/convex/problem.hpp"

namespace isac::convex {

enum class Status { Optimal, MaxIters, Infeasible, NumericalFailure };

std::string to_string(Status s);

struct SolverConfig {
  double tol = 1e-8;          // bound on each KKT residual for Optimal
  int max_iters = 500;        // Newton steps, phase-I included
  double backtrack = 0.5;     // line-search contraction
  double armijo = 0.01;       // sufficient-decrease fraction
  double mu = 20.0;           // barrier parameter growth
  double t0 = 1.0;
};

struct KktResiduals {
  double primal = 0.0;  // largest constraint violation
  double dual = 0.0;    // Lagrangian gradient norm / max(1, |grad f0|)
  double gap = 0.0;     // complementarity / max(1, |f0|)
};

/// Multipliers: one per constraint (0 for PsdCone entries), PSD dual Z, equality nu.
struct Duals {
  RVec lambda;
  CMat Z;
  RVec nu;
};

struct Solution {
  RVec v;
  RVec u;
  CMat R;
  double objective = 0.0;
  Status status = Status::NumericalFailure;
  KktResiduals kkt;
  std::optional<Duals> duals;
  int newton_steps = 0;
  bool used_phase1 = false;
  std::string message;

  bool ok() const { return status == Status::Optimal; }
};

/// Log-barrier interior-point method with a phase-I search when `start` is
/// absent or not strictly feasible. Deterministic in (problem, cfg, start).
Solution solve(const ConvexProblem& p, const SolverConfig& cfg = {}, const std::optional<RVec>& start = std::nullopt);

/// Residuals at v with multipliers estimated by least squares over the
/// near-active constraints.
KktResiduals kkt_residuals(const ConvexProblem& p, const RVec& v);
/// Residuals using supplied multipliers.
KktResiduals kkt_residuals(const ConvexProblem& p, const RVec& v, const Duals& d);

}  // namespace isac::convex
