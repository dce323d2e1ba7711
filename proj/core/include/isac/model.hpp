#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/common.hpp"

namespace isac::model {

/// Scenario parameters. Defaults reproduce the reference simulation table;
/// angles are broadside-relative (0 rad = array normal).
struct SystemConfig {
  int n_tx = 8;
  int n_rx = 8;
  int n_users = 3;
  int n_targets = 3;
  double p_max_dbm = 25.0;
  double noise_dbm = -60.0;
  int psk_order = 4;
  std::vector<double> gamma_db{0.0};  // one shared value or one per user
  double rician_factor = 1.0;
  double path_loss_db = 70.0;
  double bandwidth_hz = 1.0;
  int grid_size = 180;
  double beam_width_deg = 3.0;
  std::vector<double> target_angles_deg{-60.0, 0.0, 60.0};
  double xi = 0.001;
  double delta_omega = 0.01;
  double eps1 = 1e-4;
  double eps2 = 1e-4;
  double eps3 = 1e-4;
  int max_iters_soop1 = 100;
  int max_iters_soop2 = 100;
  int max_iters_moop = 100;
  int randomization_draws = 100;
  double rank_one_tol = 1e-6;
  std::uint64_t rng_seed = 1;

  double p_max_mw() const { return dbm_to_mw(p_max_dbm); }
  double noise_mw() const { return dbm_to_mw(noise_dbm); }
  /// SNR threshold of user k, linear scale.
  double gamma_linear(int k) const;

  /// Every violated invariant, one message per field (empty when valid).
  std::vector<std::string> validate() const;
  /// Soft issues such as xi outside [0.001, 0.01].
  std::vector<std::string> warnings() const;
  /// Throws InvalidArgument listing all violations.
  void require_valid() const;
};

void to_json(nlohmann::json& j, const SystemConfig& cfg);
/// Missing keys keep their defaults; unknown keys and type mismatches throw
/// InvalidArgument naming the offending field.
void from_json(const nlohmann::json& j, SystemConfig& cfg);

struct AngleGrid {
  std::vector<double> angles_rad;

  std::size_t size() const { return angles_rad.size(); }
  double spacing() const;
};

struct PskSymbolSet {
  int order = 4;

  static PskSymbolSet make(int order);
  /// Symbol i in {e^{j pi/M}, e^{j 3pi/M}, ...}.
  cdouble symbol(int i) const;
  /// Half-angle of the constructive-interference sector, pi / M.
  double half_angle() const { return kPi / order; }
};

/// One Monte-Carlo realization.
struct ScenarioDraw {
  std::vector<CVec> channels;
  std::vector<cdouble> symbols;
  std::vector<double> target_angles_rad;
  std::vector<double> user_angles_rad;
  AngleGrid grid;
  RVec desired_gain;

  int n_tx() const { return channels.empty() ? 0 : static_cast<int>(channels.front().size()); }
  int n_users() const { return static_cast<int>(channels.size()); }
  /// Symbol-rotated channel h_k s_k.
  CVec rotated_channel(int k) const { return channels[k] * symbols[k]; }
};

nlohmann::json scenario_to_json(const ScenarioDraw& s);
ScenarioDraw scenario_from_json(const nlohmann::json& j);

/// ULA steering vector with half-wavelength spacing and unit norm.
CVec steering_vector(int n, double theta);

AngleGrid build_grid(const SystemConfig& cfg);
AngleGrid build_grid(int grid_size);

/// Binary mask: 1 where the grid angle is strictly within delta_theta/2 of a target.
RVec desired_beampattern(const AngleGrid& grid, std::span<const double> targets_rad,
                         double delta_theta_rad);

/// Deterministic in (cfg, seed). Channels include the configured path loss.
ScenarioDraw draw_scenario(const SystemConfig& cfg, std::uint64_t seed);

/// SplitMix64 finaliser; derives independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

struct RealifiedUser {
  RVec z;        // length 2N: z^T x~ = Im(h~^H x)
  RVec z_tilde;  // length 2N: z~^T x~ = Re(h~^H x)
  RMat H;        // 2N x 2, columns [z, z~]
};

struct Realified {
  std::vector<RealifiedUser> users;
  RVec x_tilde;
};

/// x~ = [Im x; Re x].
RVec realify_vector(const CVec& x);
CVec complexify(const RVec& x_tilde);
RealifiedUser realify_user(const CVec& rotated_channel);
Realified realify(std::span<const CVec> channels, std::span<const cdouble> symbols, const CVec& x);

}  // namespace isac::model
