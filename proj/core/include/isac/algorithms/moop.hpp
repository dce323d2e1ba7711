#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/algorithms/tchebycheff.hpp"
#include "isac/algorithms/types.hpp"
#include "isac/model.hpp"

namespace isac::algo {

struct ParetoPoint {
  ScalarizationWeights weights;
  WaveformDesign design;
  double f1 = 0.0;          // -R_sum of the extracted x
  double f2 = 0.0;          // M_s of the extracted x
  double f1_relaxed = 0.0;  // -B log2(e) sum mu at the last subproblem
  double f2_relaxed = 0.0;  // M_s(R) of the relaxed covariance
  double alpha = 0.0;       // scheme objective at the relaxed solution
  double alpha_extracted = 0.0;
  int iterations = 0;
  bool converged = false;
  convex::Status status = convex::Status::NumericalFailure;
  std::vector<TrajectoryEntry> trajectory;
  bool dominated = false;

  bool ok() const { return status == convex::Status::Optimal || status == convex::Status::MaxIters; }
};

nlohmann::json to_json(const ParetoPoint& p);

/// Augmented Tchebycheff SCA on the lifted covariance [R x; x^H 1]. Stops when
/// max_k |c_k^(t) - c_k^(t-1)| <= eps3, then extracts x (eigenvector when rank
/// one, else Gaussian randomization scored by the scalarization). Uses the
/// magnitude normalization: the signed one leaves alpha unbounded below.
ParetoPoint solve_moop(const model::ScenarioDraw& s, const Utopia& utopia, const ScalarizationWeights& w,
                       const model::SystemConfig& cfg, std::uint64_t seed = 0);

}  // namespace isac::algo
