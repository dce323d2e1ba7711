#include "isac/algorithms/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isac/metrics.hpp"

namespace isac::algo {

CVec center_ci_phase(const CVec& x, const model::ScenarioDraw& s, const model::SystemConfig& cfg) {
  std::vector<cdouble> c;
  std::vector<double> g;
  std::vector<double> ang;
  for (int k = 0; k < s.n_users(); ++k) {
    c.push_back(s.rotated_channel(k).dot(x));
    g.push_back(std::sqrt(cfg.noise_mw() * cfg.gamma_linear(k)));
    if (std::abs(c.back()) > 0.0) ang.push_back(std::arg(c.back()));
  }
  if (ang.empty()) return x;

  // Seed: the phase that centres the users' phase spread on the real axis.
  std::sort(ang.begin(), ang.end());
  double best_gap = ang.front() + 2 * kPi - ang.back();
  double mid = ang.back() + best_gap / 2;
  for (std::size_t i = 0; i + 1 < ang.size(); ++i) {
    const double gap = ang[i + 1] - ang[i];
    if (gap > best_gap) {
      best_gap = gap;
      mid = ang[i] + gap / 2;
    }
  }
  const double phi = kPi / cfg.psk_order;
  auto worst = [&](double psi) {
    const cdouble r = std::polar(1.0, psi);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.size(); ++k) m = std::min(m, metrics::ci_margin_value(c[k] * r, g[k], phi));
    return m;
  };

  // Dense scan, then golden-section refinement around the best sample.
  constexpr int kScan = 720;
  const double step = 2 * kPi / kScan;
  double best_psi = -(mid + kPi), best = worst(best_psi);
  for (int i = 1; i < kScan; ++i) {
    const double psi = -(mid + kPi) + i * step;
    const double v = worst(psi);
    if (v > best) {
      best = v;
      best_psi = psi;
    }
  }
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_psi - step, hi = best_psi + step;
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  double fa = worst(a), fb = worst(b);
  for (int it = 0; it < 60; ++it) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = worst(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = worst(b);
    }
  }
  const double refined = 0.5 * (lo + hi);
  if (worst(refined) > best) best_psi = refined;
  return x * std::polar(1.0, best_psi);
}

ExtractionResult gaussian_randomization(const CMat& R, const model::ScenarioDraw& s, const model::SystemConfig& cfg,
                                        int n_draws, const Selector& selector, std::uint64_t seed,
                                        std::span<const CVec> extra) {
  if (n_draws < 1) throw InvalidArgument("gaussian_randomization: n_draws must be >= 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (R + R.adjoint()));
  if (es.info() != Eigen::Success) throw std::runtime_error("gaussian_randomization: eigensolver failed");
  const RVec lam = es.eigenvalues().cwiseMax(0.0);
  const CMat F = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
  const double power = std::min(R.trace().real(), cfg.p_max_mw());
  const int n = static_cast<int>(R.rows());

  auto prepare = [&](CVec x) {
    const double nx = x.norm();
    if (nx > 0.0 && power > 0.0) x *= std::sqrt(power) / nx;
    else x.setZero();
    return center_ci_phase(x, s, cfg);
  };
  auto feasible = [&](const CVec& x) {
    for (const auto& m : metrics::ci_margin(s, x, cfg))
      if (m.value < -1e-9) return false;
    return true;
  };

  ExtractionResult best;
  best.selector_value = std::numeric_limits<double>::infinity();
  auto consider = [&](const CVec& cand) {
    const CVec x = prepare(cand);
    if (!feasible(x)) return;
    ++best.feasible_count;
    const double v = selector(x);
    if (v < best.selector_value) {
      best.selector_value = v;
      best.x = x;
      best.feasible_found = true;
    }
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  for (int d = 0; d < n_draws; ++d) {
    CVec w(n);
    for (int i = 0; i < n; ++i) {
      const double re = nd(rng);
      w[i] = cdouble(re, nd(rng));
    }
    consider(F * w);
  }
  for (const auto& e : extra) consider(e);

  if (!best.feasible_found) {
    best.x = prepare(es.eigenvectors().col(n - 1) * std::sqrt(lam[n - 1]));
    best.selector_value = selector(best.x);
  }
  return best;
}

}  // namespace isac::algo
