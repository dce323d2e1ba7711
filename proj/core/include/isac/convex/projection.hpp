#pragma once

#include "isac/common.hpp"

namespace isac::convex {

/// Frobenius-nearest PSD matrix: negative eigenvalues clamped to zero.
CMat psd_project(const CMat& H);

/// Euclidean projection onto {R >= 0, tr R <= cap}.
CMat psd_trace_project(const CMat& H, double cap);

/// Projection of a real vector onto {x >= 0, sum x <= cap}.
RVec capped_simplex_project(const RVec& x, double cap);

}  // namespace isac::convex
