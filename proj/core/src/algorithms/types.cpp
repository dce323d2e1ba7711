#include "isac/algorithms/types.hpp"

#include <cmath>
#include <ostream>

namespace isac::algo {

nlohmann::json to_json(const TrajectoryEntry& e) {
  return {{"iteration", e.iteration},
          {"objective", e.objective},
          {"change", e.change},
          {"f1", e.f1},
          {"f2", e.f2},
          {"r_primal", e.kkt.primal},
          {"r_dual", e.kkt.dual},
          {"gap", e.kkt.gap},
          {"newton_steps", e.newton_steps},
          {"status", convex::to_string(e.status)}};
}

void write_jsonl(std::ostream& os, const std::vector<TrajectoryEntry>& traj, const nlohmann::json& tag) {
  for (const auto& e : traj) {
    nlohmann::json j = to_json(e);
    if (tag.is_object()) j.update(tag);
    os << j.dump() << '\n';
  }
}

ScalarizationWeights ScalarizationWeights::from_omega1(double omega1, double xi) {
  ScalarizationWeights w{omega1, 1.0 - omega1, xi};
  w.validate();
  return w;
}

void ScalarizationWeights::validate() const {
  if (!(omega1 >= 0.0 && omega1 <= 1.0 && omega2 >= 0.0 && omega2 <= 1.0))
    throw InvalidArgument("weights must lie in [0, 1]");
  if (std::abs(omega1 + omega2 - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1");
  if (!(xi >= 0.0)) throw InvalidArgument("augmentation coefficient must be >= 0");
}

void Utopia::validate() const {
  if (!(f1_star < 0.0)) throw InvalidArgument("utopia: f1* must be negative");
  if (!(f2_star > 0.0)) throw InvalidArgument("utopia: f2* must be positive");
}

}  // namespace isac::algo
