#include "isac/algorithms/tchebycheff.hpp"

#include <algorithm>
#include <cmath>

namespace isac::algo {

Scalarized scalarize_tchebycheff(double f1, double f2, const Utopia& u, const ScalarizationWeights& w,
                                 Normalization n) {
  w.validate();
  if (u.f1_star == 0.0 || u.f2_star == 0.0) throw InvalidArgument("scalarize_tchebycheff: zero utopia component");
  const double d1 = n == Normalization::Magnitude ? std::abs(u.f1_star) : u.f1_star;
  const double d2 = n == Normalization::Magnitude ? std::abs(u.f2_star) : u.f2_star;
  const double D1 = (f1 - u.f1_star) / d1;
  const double D2 = (f2 - u.f2_star) / d2;
  Scalarized s;
  s.f1p = w.omega1 * (D1 + w.xi * (D1 + D2));
  s.f2p = w.omega2 * (D2 + w.xi * (D1 + D2));
  s.alpha = std::max(s.f1p, s.f2p);
  return s;
}

}  // namespace isac::algo
