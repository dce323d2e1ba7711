#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/harness/config.hpp"

namespace isac::harness {

inline constexpr const char* kTrialSchema = "isac.trial/1";

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double omega1 = 0.0;
  double p_max_dbm = 0.0;
  int n_tx = 0;
  double sum_rate = 0.0;
  double mse_relaxed = 0.0;
  double mse_extracted = 0.0;
  double min_ci_margin = 0.0;
  double tx_power = 0.0;
  int iters = 0;
  std::string status;
  double f1_star = 0.0;
  double f2_star = 0.0;
  /// Wall-clock time of the design; kept out of exports so outputs stay reproducible.
  double wall_ms = 0.0;

  bool ok() const { return status == "Optimal" || status == "MaxIters"; }
  /// Equality of everything except the timing.
  bool same_result(const TrialRecord& o) const;
};

void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);

struct MonteCarloResult {
  std::vector<TrialRecord> records;  // ordered by (trial, sweep point, weight)
  int failures = 0;

  double failure_fraction() const;
};

using ProgressFn = std::function<void(int trials_done, int n_trials)>;

/// Per trial t: seed_t = mix_seed(rng_seed, t), one scenario, utopia once per
/// sweep point, then every weight. Failures are recorded, never thrown.
/// Output is independent of `cfg.jobs`.
MonteCarloResult run_montecarlo(const RunConfig& cfg, const ProgressFn& progress = {});

}  // namespace isac::harness
