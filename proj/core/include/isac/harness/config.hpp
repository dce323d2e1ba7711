#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/model.hpp"

namespace isac::harness {

enum class SweepAxis { Omega, PMax, NTx };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepPlan {
  SweepAxis axis = SweepAxis::Omega;
  /// Grid of the swept quantity; empty on the omega axis means the interior
  /// weight grid of delta_omega.
  std::vector<double> values;
};

/// Which design is recorded per (trial, sweep point).
enum class Scheme { Tchebycheff, WeightedSum, Soop1, Soop2 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct RunConfig {
  model::SystemConfig system;
  int n_trials = 1000;
  SweepPlan sweep;
  /// Weights evaluated at every point of a power or antenna sweep.
  std::vector<double> omega1{0.5};
  Scheme scheme = Scheme::Tchebycheff;
  std::string output_dir = "out";
  int jobs = 1;

  /// Weight grid when sweeping omega, else `omega1`.
  std::vector<double> weights() const;
  /// Swept values; a single entry holding the base value off-axis.
  std::vector<double> sweep_values() const;

  std::vector<std::string> validate() const;
  void require_valid() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Top-level keys are SystemConfig fields plus n_trials, sweep {axis, values},
/// omega1, scheme, output_dir and jobs. Errors name the offending field path.
void from_json(const nlohmann::json& j, RunConfig& c);

/// Parses and validates; every invariant failure is listed in the message.
RunConfig load_config(const std::string& path);

}  // namespace isac::harness
