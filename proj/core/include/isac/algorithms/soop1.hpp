#pragma once

#include <vector>

#include "isac/algorithms/types.hpp"
#include "isac/model.hpp"

namespace isac::algo {

struct Soop1Result {
  CVec x;               // physical units, ||x||^2 <= P
  double f1_star = 0.0; // -R_sum(x)
  double sum_rate = 0.0;
  int iterations = 0;
  bool converged = false;
  convex::Status status = convex::Status::NumericalFailure;
  std::vector<TrajectoryEntry> trajectory;  // objective = sum mu (nats)
};

/// Sum-rate maximisation under CI constraints by SCA on the real-valued model.
/// Status Infeasible when no x with ||x||^2 <= P satisfies every CI constraint.
Soop1Result solve_soop1(const model::ScenarioDraw& s, const model::SystemConfig& cfg);

}  // namespace isac::algo
