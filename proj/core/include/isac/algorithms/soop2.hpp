#pragma once

#include <cstdint>
#include <vector>

#include "isac/algorithms/types.hpp"
#include "isac/model.hpp"

namespace isac::algo {

struct Soop2Result {
  CMat R;                // relaxed covariance, tr R = P
  CVec x;                // extracted waveform
  double f2_star = 0.0;  // M_s(R) with eta*
  double eta = 0.0;
  double mse_extracted = 0.0;
  double rank_ratio = 0.0;
  bool rank_one = false;
  bool extraction_fallback = false;
  int iterations = 0;
  bool converged = false;
  convex::Status status = convex::Status::NumericalFailure;
  std::vector<TrajectoryEntry> trajectory;  // objective = M_s
};

/// Beampattern matching: alternate eta* and the QSDP in R, then extract x.
/// `seed` drives the Gaussian randomization.
Soop2Result solve_soop2(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed = 0);

}  // namespace isac::algo
