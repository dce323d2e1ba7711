#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/algorithms/moop.hpp"

namespace isac::algo {

/// Normalized weighted sum omega1 f1 / |f1*| + omega2 f2 / f2* on the same
/// lifted SCA; `alpha` holds that objective at the relaxed solution.
ParetoPoint weighted_sum_baseline(const model::ScenarioDraw& s, const Utopia& utopia, const ScalarizationWeights& w,
                                  const model::SystemConfig& cfg, std::uint64_t seed = 0);

enum class SooMode {
  MseMinRateConstrained,  // threshold: per-user rate floor in bit/s (<= 0 disables)
  RateMaxMseConstrained,  // threshold: M_s ceiling in mW^2 (infinity disables)
};

std::string to_string(SooMode m);
SooMode soo_mode_from_string(const std::string& s);

struct SooResult {
  WaveformDesign design;
  double f1 = 0.0;  // extracted
  double f2 = 0.0;
  double f1_relaxed = 0.0;
  double f2_relaxed = 0.0;
  int iterations = 0;
  bool converged = false;
  convex::Status status = convex::Status::NumericalFailure;
  std::vector<TrajectoryEntry> trajectory;

  bool ok() const { return status == convex::Status::Optimal || status == convex::Status::MaxIters; }
};

/// Single-objective boundary tracing with the other objective as a constraint.
/// Status Infeasible when the threshold cannot be met.
SooResult soo_baselines(const model::ScenarioDraw& s, double threshold, SooMode mode, const model::SystemConfig& cfg,
                        std::uint64_t seed = 0);

/// |Delta_comm - Delta_sens| with Delta_i = (f_i - f_i*) / |f_i*|.
double gain_gap(double f1, double f2, const Utopia& u);

}  // namespace isac::algo
