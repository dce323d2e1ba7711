#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "isac/model.hpp"

namespace isac::algo {

using Selector = std::function<double(const CVec&)>;

struct ExtractionResult {
  CVec x;
  double selector_value = 0.0;
  int feasible_count = 0;
  /// False when no candidate met the CI constraints and the eigenvector fallback was used.
  bool feasible_found = false;
};

/// Rotates x by the global phase that maximises the smallest CI margin. The
/// rate and the beampattern do not depend on that phase.
CVec center_ci_phase(const CVec& x, const model::ScenarioDraw& s, const model::SystemConfig& cfg);

/// Gaussian randomization around the relaxed covariance R. Every candidate
/// (the n_draws samples plus `extra`) is rescaled to ||x||^2 = min(tr R, P),
/// phase-centred, kept when every CI margin is >= -1e-9, and scored by
/// `selector`; the smallest score wins.
ExtractionResult gaussian_randomization(const CMat& R, const model::ScenarioDraw& s, const model::SystemConfig& cfg,
                                        int n_draws, const Selector& selector, std::uint64_t seed,
                                        std::span<const CVec> extra = {});

}  // namespace isac::algo
