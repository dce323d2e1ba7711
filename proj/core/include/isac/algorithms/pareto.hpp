#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "isac/algorithms/moop.hpp"
#include "isac/algorithms/soop1.hpp"
#include "isac/algorithms/soop2.hpp"

namespace isac::algo {

struct UtopiaRun {
  Utopia utopia;
  Soop1Result soop1;
  Soop2Result soop2;

  bool ok() const;
};

/// f1* from the sum-rate problem and f2* from the beampattern problem.
UtopiaRun compute_utopia(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed = 0);

/// omega_1 in {d, 2d, ..., 1 - d}.
std::vector<double> weight_grid(double delta_omega);

struct ParetoFront {
  UtopiaRun utopia;
  std::vector<ParetoPoint> points;    // one per weight, in weight order
  std::vector<std::size_t> filtered;  // indices of the non-dominated points
  int failures = 0;
};

/// Utopia once, then solve_moop on every weight of the grid. Failed points
/// are counted and kept; `jobs` only changes scheduling.
ParetoFront pareto_sweep(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed = 0,
                         int jobs = 1);

struct Objectives {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Indices of points no other point weakly dominates with one strict improvement.
std::vector<std::size_t> dominance_filter(std::span<const Objectives> pts);
/// Same on extracted (f1, f2); skips failed points and sets `dominated`.
std::vector<std::size_t> dominance_filter(std::vector<ParetoPoint>& pts);

}  // namespace isac::algo
