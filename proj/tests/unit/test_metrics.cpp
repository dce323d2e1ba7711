#include <doctest.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "isac/metrics.hpp"
#include "oracles.hpp"

using namespace isac;
using namespace isac::metrics;

namespace {

model::ScenarioDraw small_scenario(std::uint64_t seed, int n_tx = 4, int grid = 60) {
  model::SystemConfig c;
  c.n_tx = n_tx;
  c.grid_size = grid;
  return model::draw_scenario(c, seed);
}

RVec random_binary(testing::Rng& rng, int L) {
  std::bernoulli_distribution b(0.3);
  RVec d(L);
  for (int l = 0; l < L; ++l) d[l] = b(rng) ? 1.0 : 0.0;
  d[0] = 1.0;
  return d;
}

}  // namespace

TEST_CASE("beampattern gain closed forms") {
  const auto grid = model::build_grid(36);
  const double P = 2.5;
  const double th = grid.angles_rad[20];
  const CVec a = model::steering_vector(4, th);
  RVec g = beampattern_gain(P * a * a.adjoint(), grid);
  CHECK(g[20] == doctest::Approx(P).epsilon(1e-12));

  g = beampattern_gain(CMat::Identity(4, 4) * (P / 4), grid);
  for (Eigen::Index l = 0; l < g.size(); ++l) CHECK(g[l] == doctest::Approx(P / 4).epsilon(1e-12));

  CMat bad = CMat::Identity(4, 4);
  bad(0, 1) = cdouble(0, 1);
  CHECK_THROWS_AS(beampattern_gain(bad, grid), InvalidArgument);
}

TEST_CASE("beampattern gain is bounded by the eigenvalues") {
  testing::Rng rng(4);
  const auto grid = model::build_grid(90);
  for (int i = 0; i < 50; ++i) {
    const CMat R = testing::random_psd(rng, 5, 1 + i % 5);
    Eigen::SelfAdjointEigenSolver<CMat> es(R);
    const double top = es.eigenvalues().maxCoeff();
    const RVec g = beampattern_gain(R, grid);
    for (Eigen::Index l = 0; l < g.size(); ++l) {
      CHECK(g[l] >= -1e-12);
      CHECK(g[l] <= top * (1 + 1e-12));
    }
  }
}

TEST_CASE("sum rate") {
  CVec h(1), x(1);
  h << cdouble(1, 0);
  x << cdouble(std::sqrt(3.0), 0);
  CHECK(user_rate(h, x, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(user_rate(h, CVec::Zero(1), 1.0, 1.0) == 0.0);
  const std::vector<CVec> two{h, h};
  CHECK(sum_rate(two, x, 1.0, 1.0) == doctest::Approx(4.0));
  CHECK(sum_rate(two, x, 1.0, 3.0) == doctest::Approx(12.0));
}

TEST_CASE("rates never fall when the waveform is scaled up") {
  testing::Rng rng(8);
  std::uniform_real_distribution<double> up(1.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const CVec h = testing::random_cvec(rng, 4);
    const CVec x = testing::random_cvec(rng, 4);
    CHECK(user_rate(h, up(rng) * x, 0.3, 1.0) >= user_rate(h, x, 0.3, 1.0));
  }
}

TEST_CASE("eta star") {
  RVec d(2), g(2);
  d << 1, 0;
  g << 2, 0;
  CHECK(eta_star(g, d) == doctest::Approx(2.0));
  RVec d3(3);
  d3 << 1, 0.5, 0;
  CHECK(eta_star(1.7 * d3, d3) == doctest::Approx(1.7));
  CHECK_THROWS_AS(eta_star(g, RVec::Zero(2)), InvalidArgument);
}

TEST_CASE("eta star minimises the matching error") {
  testing::Rng rng(12);
  const auto grid = model::build_grid(40);
  for (int i = 0; i < 100; ++i) {
    const CMat R = testing::random_psd(rng, 4, 1 + i % 4);
    const RVec d = random_binary(rng, 40);
    const RVec g = beampattern_gain(R, grid);
    const double e = eta_star(g, d);
    const double best = beampattern_mse(e, g, d);
    for (int j = -25; j <= 25; ++j) {
      if (j == 0) continue;
      CHECK(beampattern_mse(e + 0.02 * j, g, d) >= best);
    }
    CHECK(beampattern_mse(e + 0.1, g, d) > best);
    CHECK(beampattern_mse(e - 0.1, g, d) > best);
    // With a binary mask the squared-mask form gives the same scale.
    const double alt = g.dot(d.cwiseProduct(d)) / d.squaredNorm();
    CHECK(std::abs(alt - e) <= 1e-12 * std::max(1.0, std::abs(e)));
  }
}

TEST_CASE("beampattern MSE") {
  RVec d(2), g(2);
  d << 1, 0;
  g << 0.5, 0.25;
  CHECK(beampattern_mse(1.0, g, d) == doctest::Approx(0.15625));
  CHECK(beampattern_mse(1.0, d, d) == 0.0);
  testing::Rng rng(2);
  const auto grid = model::build_grid(30);
  const CMat R = testing::random_psd(rng, 3, 2);
  const RVec dd = random_binary(rng, 30);
  CHECK(beampattern_mse(1.4, 2.0 * R, dd, grid) == doctest::Approx(4 * beampattern_mse(0.7, R, dd, grid)));
}

TEST_CASE("CI margin closed forms") {
  CHECK(ci_margin_value({3, 1}, 1.0, kPi / 4) == doctest::Approx(1.0));
  CHECK(ci_margin_value({1, 2}, 1.0, kPi / 4) == doctest::Approx(-2.0));
  CHECK(std::abs(ci_margin_value({3, 2}, 1.0, kPi / 4)) < 1e-15);
}

TEST_CASE("CI margins are unchanged when x and every symbol rotate together") {
  testing::Rng rng(21);
  std::uniform_real_distribution<double> ph(0, 2 * kPi);
  model::SystemConfig c;
  c.n_tx = 4;
  c.grid_size = 30;
  for (int i = 0; i < 50; ++i) {
    auto s = model::draw_scenario(c, 100 + i);
    const CVec x = testing::random_cvec(rng, 4) * 1e2;
    const auto m0 = ci_margin(s, x, c);
    const cdouble u = std::polar(1.0, ph(rng));
    for (auto& sym : s.symbols) sym *= u;
    const auto m1 = ci_margin(s, u * x, c);
    for (std::size_t k = 0; k < m0.size(); ++k) CHECK(std::abs(m0[k].value - m1[k].value) <= 1e-10);
  }
}

TEST_CASE("waveform report matches the direct formulas") {
  model::SystemConfig c;
  c.n_tx = 4;
  c.grid_size = 60;
  const auto s = model::draw_scenario(c, 3);
  testing::Rng rng(5);
  const CVec x = testing::random_cvec(rng, 4) * 5.0;
  const CMat R = x * x.adjoint();
  const auto rep = evaluate_waveform(x, R, s, c);
  CHECK(rep.tx_power == doctest::Approx(x.squaredNorm()));
  CHECK(rep.sum_rate_bps == doctest::Approx(sum_rate(s, x, c)));
  CHECK(rep.mse == doctest::Approx(optimal_mse(beampattern_gain(R, s.grid), s.desired_gain)));
  CHECK(rep.rank_one_gap < 1e-9);
  CHECK(!rep.approximate);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : ci_margin(s, x, c)) lo = std::min(lo, m.value);
  CHECK(rep.min_margin() == lo);
  CHECK_THROWS_AS(evaluate_waveform(std::nullopt, std::nullopt, s, c), InvalidArgument);
}

TEST_CASE("isotropic covariance MSE by direct summation") {
  model::SystemConfig c;
  c.n_tx = 8;
  const auto s = model::draw_scenario(c, 1);
  const double P = c.p_max_mw();
  const auto rep = evaluate_waveform(std::nullopt, CMat::Identity(8, 8) * (P / 8), s, c);
  CHECK(rep.approximate);
  double sum = 0.0, ones = 0.0;
  for (Eigen::Index l = 0; l < s.desired_gain.size(); ++l) ones += s.desired_gain[l];
  const double eta = P / 8;  // every gain equals P / N_t, so the best scale does too
  for (Eigen::Index l = 0; l < s.desired_gain.size(); ++l) {
    const double e = eta * s.desired_gain[l] - P / 8;
    sum += e * e;
  }
  CHECK(ones == 9.0);
  CHECK(rep.eta_star == doctest::Approx(eta));
  CHECK(rep.mse == doctest::Approx(sum / 180.0));
}

TEST_CASE("zero waveform") {
  const auto s = small_scenario(2);
  model::SystemConfig c;
  c.n_tx = 4;
  c.grid_size = 60;
  const auto rep = evaluate_waveform(CVec::Zero(4), std::nullopt, s, c);
  CHECK(rep.sum_rate_bps == 0.0);
  CHECK(rep.tx_power == 0.0);
  CHECK(rep.eta_star == 0.0);
  CHECK(rep.mse == 0.0);
  for (const auto& m : rep.margins) CHECK(!m.feasible());
}

TEST_CASE("report CSV row follows the documented columns") {
  const auto s = small_scenario(2);
  model::SystemConfig c;
  c.n_tx = 4;
  c.grid_size = 60;
  const auto rep = evaluate_waveform(CVec::Ones(4), std::nullopt, s, c);
  const std::string row = csv_row(rep, 7, 0.25);
  CHECK(std::count(row.begin(), row.end(), ',') == 6);
  CHECK(row.rfind("7,0.25,", 0) == 0);
  CHECK(std::string(kReportCsvHeader) == "seed,omega1,sum_rate,mse,tx_power,min_margin,rank_ratio");
}
