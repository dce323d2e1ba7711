#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/convex/solver.hpp"
#include "isac/metrics.hpp"

namespace isac::algo {

/// One outer iteration of an SCA or alternating scheme.
struct TrajectoryEntry {
  int iteration = 0;
  double objective = 0.0;  // sum mu (rate SCA), M_s (beampattern), alpha (joint SCA)
  double change = 0.0;     // quantity tested against the stopping tolerance
  double f1 = 0.0;
  double f2 = 0.0;
  convex::KktResiduals kkt;
  int newton_steps = 0;
  convex::Status status = convex::Status::Optimal;
};

nlohmann::json to_json(const TrajectoryEntry& e);
/// One JSON object per line; `tag` fields are merged into every line.
void write_jsonl(std::ostream& os, const std::vector<TrajectoryEntry>& traj, const nlohmann::json& tag = {});

struct WaveformDesign {
  CVec x;
  CMat R;
  metrics::WaveformReport report;
  double rank_ratio = 0.0;
  bool rank_one = false;
  /// Gaussian randomization found no CI-feasible draw and fell back to the eigenvector.
  bool extraction_fallback = false;
};

struct ScalarizationWeights {
  double omega1 = 0.5;
  double omega2 = 0.5;
  double xi = 0.001;

  static ScalarizationWeights from_omega1(double omega1, double xi = 0.001);
  /// Throws InvalidArgument unless omega_i in [0,1] sum to 1 within 1e-12 and xi >= 0.
  void validate() const;
};

struct Utopia {
  double f1_star = -1.0;  // minus the optimal sum rate
  double f2_star = 1.0;   // optimal beampattern MSE

  void validate() const;
};

}  // namespace isac::algo
