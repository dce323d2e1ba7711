#pragma once

#include "isac/algorithms/types.hpp"

namespace isac::algo {

/// How the relative degradation (f_i - f_i*) / d_i is normalised.
enum class Normalization {
  Magnitude,  // d_i = |f_i*|: both terms grow as the design moves away from the optimum
  Signed,     // d_i = f_i*: literal form; flips the sign of the rate term since f1* < 0
};

struct Scalarized {
  double f1p = 0.0;
  double f2p = 0.0;
  double alpha = 0.0;  // max(f1p, f2p)
};

/// f_i' = omega_i [Delta_i + xi (Delta_1 + Delta_2)] with Delta_i = (f_i - f_i*) / d_i.
Scalarized scalarize_tchebycheff(double f1, double f2, const Utopia& u, const ScalarizationWeights& w,
                                 Normalization n = Normalization::Magnitude);

}  // namespace isac::algo
