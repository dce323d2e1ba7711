#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/model.hpp"

namespace isac::metrics {

struct CiMargin {
  int user = 0;
  double value = 0.0;

  bool feasible() const { return value >= 0.0; }
};

struct WaveformReport {
  double sum_rate_bps = 0.0;
  std::vector<double> per_user_rate;
  double mse = 0.0;
  double eta_star = 0.0;
  std::vector<CiMargin> margins;
  double tx_power = 0.0;
  RVec beam_gains;
  /// Set when rate and margins came from a rank-one extraction of R.
  bool approximate = false;
  /// ||R - x x^H||_F when both were supplied, else NaN.
  double rank_one_gap = std::numeric_limits<double>::quiet_NaN();
  /// lambda_2 / lambda_1 of R (0 for a vector-only report).
  double rank_ratio = 0.0;

  double min_margin() const;
};

/// Column order of WaveformReport::csv_row.
inline constexpr const char* kReportCsvHeader = "seed,omega1,sum_rate,mse,tx_power,min_margin,rank_ratio";

nlohmann::json to_json(const WaveformReport& r);
std::string csv_row(const WaveformReport& r, std::uint64_t seed, double omega1);

/// Precomputed steering matrix (N_t x L) for repeated beampattern evaluation.
CMat steering_matrix(int n_tx, const model::AngleGrid& grid);

/// G(theta_l) = a^H R a on every grid angle.
RVec beampattern_gain(const CMat& R, const model::AngleGrid& grid);
RVec beampattern_gain(const CMat& R, const CMat& steering);
/// Gain of the rank-one covariance x x^H, i.e. |a^H x|^2.
RVec beampattern_gain_vec(const CVec& x, const CMat& steering);

double user_rate(const CVec& h, const CVec& x, double noise_mw, double bandwidth_hz);
double sum_rate(std::span<const CVec> channels, const CVec& x, double noise_mw, double bandwidth_hz);
double sum_rate(const model::ScenarioDraw& s, const CVec& x, const model::SystemConfig& cfg);

double eta_star(const RVec& gains, const RVec& desired);
double eta_star(const CMat& R, const RVec& desired, const model::AngleGrid& grid);

double beampattern_mse(double eta, const RVec& gains, const RVec& desired);
double beampattern_mse(double eta, const CMat& R, const RVec& desired, const model::AngleGrid& grid);
/// M_s with the optimal scale substituted.
double optimal_mse(const RVec& gains, const RVec& desired);

/// (Re(c) - sqrt(N0 Gamma)) tan(phi) - |Im(c)| for c = h~^H x.
double ci_margin_value(cdouble c, double sqrt_noise_gamma, double phi);
std::vector<CiMargin> ci_margin(const model::ScenarioDraw& s, const CVec& x, const model::SystemConfig& cfg);

/// Principal eigenvector scaled to sqrt(lambda_1); zero for R = 0.
CVec principal_component(const CMat& R);
/// lambda_2 / lambda_1 (0 when R has rank <= 1 or is zero).
double rank_ratio(const CMat& R);

WaveformReport evaluate_waveform(const std::optional<CVec>& x, const std::optional<CMat>& R,
                                 const model::ScenarioDraw& s, const model::SystemConfig& cfg);

}  // namespace isac::metrics
