#include "isac/algorithms/pareto.hpp"

#include <cmath>

#include "../parallel.hpp"

namespace isac::algo {

bool UtopiaRun::ok() const {
  auto good = [](convex::Status st) { return st == convex::Status::Optimal || st == convex::Status::MaxIters; };
  return good(soop1.status) && good(soop2.status) && utopia.f1_star < 0.0 && utopia.f2_star > 0.0;
}

UtopiaRun compute_utopia(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed) {
  UtopiaRun u;
  u.soop1 = solve_soop1(s, cfg);
  u.soop2 = solve_soop2(s, cfg, seed);
  u.utopia.f1_star = u.soop1.f1_star;
  u.utopia.f2_star = u.soop2.f2_star;
  return u;
}

std::vector<double> weight_grid(double d) {
  if (!(d > 0.0 && d <= 0.5)) throw InvalidArgument("delta_omega: must lie in (0, 0.5]");
  std::vector<double> w;
  for (int k = 1;; ++k) {
    const double o = k * d;
    if (o > 1.0 - d + 1e-9) break;
    w.push_back(o);
  }
  return w;
}

ParetoFront pareto_sweep(const model::ScenarioDraw& s, const model::SystemConfig& cfg, std::uint64_t seed, int jobs) {
  ParetoFront f;
  f.utopia = compute_utopia(s, cfg, seed);
  const auto grid = weight_grid(cfg.delta_omega);
  f.points.resize(grid.size());
  if (!f.utopia.ok()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f.points[i].weights = ScalarizationWeights::from_omega1(grid[i], cfg.xi);
      f.points[i].status = f.utopia.soop1.status == convex::Status::Infeasible ? convex::Status::Infeasible
                                                                               : convex::Status::NumericalFailure;
    }
    f.failures = static_cast<int>(grid.size());
    return f;
  }
  detail::parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const auto w = ScalarizationWeights::from_omega1(grid[i], cfg.xi);
    try {
      f.points[i] = solve_moop(s, f.utopia.utopia, w, cfg, model::mix_seed(seed, i));
    } catch (const std::exception&) {
      f.points[i] = ParetoPoint{};
      f.points[i].weights = w;
      f.points[i].status = convex::Status::NumericalFailure;
    }
  });
  for (const auto& p : f.points)
    if (!p.ok()) ++f.failures;
  f.filtered = dominance_filter(f.points);
  return f;
}

std::vector<std::size_t> dominance_filter(std::span<const Objectives> pts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      const auto& p = pts[i];
      const auto& q = pts[j];
      dominated = q.f1 <= p.f1 && q.f2 <= p.f2 && (q.f1 < p.f1 || q.f2 < p.f2);
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

std::vector<std::size_t> dominance_filter(std::vector<ParetoPoint>& pts) {
  std::vector<Objectives> obj;
  std::vector<std::size_t> map;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i].dominated = false;
    if (!pts[i].ok() || !std::isfinite(pts[i].f1) || !std::isfinite(pts[i].f2)) continue;
    obj.push_back({pts[i].f1, pts[i].f2});
    map.push_back(i);
  }
  const auto kept = dominance_filter(std::span<const Objectives>(obj));
  std::vector<std::size_t> out;
  std::vector<bool> is_kept(obj.size(), false);
  for (auto k : kept) {
    is_kept[k] = true;
    out.push_back(map[k]);
  }
  for (std::size_t k = 0; k < obj.size(); ++k)
    if (!is_kept[k]) pts[map[k]].dominated = true;
  return out;
}

}  // namespace isac::algo
