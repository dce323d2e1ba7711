#include "isac/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace isac::model {

namespace {

bool is_power_of_two(int m) { return m >= 2 && (m & (m - 1)) == 0; }

nlohmann::json complex_to_json(cdouble c) { return nlohmann::json::array({c.real(), c.imag()}); }

cdouble complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config field `") + key + "` has the wrong type");
  }
}

}  // namespace

double SystemConfig::gamma_linear(int k) const {
  if (gamma_db.empty()) return 1.0;
  const double db = gamma_db.size() == 1 ? gamma_db.front() : gamma_db.at(static_cast<std::size_t>(k));
  return db_to_linear(db);
}

std::vector<std::string> SystemConfig::validate() const {
  std::vector<std::string> err;
  auto positive = [&](const char* name, long long v) {
    if (v < 1) err.push_back(std::string(name) + ": must be >= 1");
  };
  positive("n_tx", n_tx);
  positive("n_rx", n_rx);
  positive("n_users", n_users);
  positive("n_targets", n_targets);
  positive("max_iters_soop1", max_iters_soop1);
  positive("max_iters_soop2", max_iters_soop2);
  positive("max_iters_moop", max_iters_moop);
  positive("randomization_draws", randomization_draws);
  if (!std::isfinite(p_max_dbm)) err.push_back("p_max_dbm: must be finite");
  if (!std::isfinite(noise_dbm)) err.push_back("noise_dbm: must be finite");
  if (!is_power_of_two(psk_order)) err.push_back("psk_order: must be a power of two >= 2");
  if (gamma_db.size() != 1 && static_cast<int>(gamma_db.size()) != n_users)
    err.push_back("gamma_db: needs one shared value or one per user");
  for (double g : gamma_db)
    if (!std::isfinite(g)) err.push_back("gamma_db: entries must be finite");
  if (!(rician_factor >= 0.0) || std::isnan(rician_factor)) err.push_back("rician_factor: must be >= 0");
  if (!std::isfinite(path_loss_db)) err.push_back("path_loss_db: must be finite");
  if (!(bandwidth_hz > 0.0)) err.push_back("bandwidth_hz: must be > 0");
  if (grid_size < 2) err.push_back("grid_size: must be >= 2");
  if (!(beam_width_deg >= 0.0)) err.push_back("beam_width_deg: must be >= 0");
  if (static_cast<int>(target_angles_deg.size()) != n_targets)
    err.push_back("target_angles_deg: length must equal n_targets");
  for (double t : target_angles_deg)
    if (!(t >= -90.0 && t < 90.0)) err.push_back("target_angles_deg: entries must lie in [-90, 90)");
  if (!(xi >= 0.0)) err.push_back("xi: must be >= 0");
  if (!(delta_omega > 0.0 && delta_omega <= 0.5)) err.push_back("delta_omega: must lie in (0, 0.5]");
  if (!(eps1 > 0.0)) err.push_back("eps1: must be > 0");
  if (!(eps2 > 0.0)) err.push_back("eps2: must be > 0");
  if (!(eps3 > 0.0)) err.push_back("eps3: must be > 0");
  if (!(rank_one_tol > 0.0)) err.push_back("rank_one_tol: must be > 0");
  return err;
}

std::vector<std::string> SystemConfig::warnings() const {
  std::vector<std::string> w;
  if (xi < 0.001 || xi > 0.01) w.push_back("xi: outside the recommended range [0.001, 0.01]");
  return w;
}

void SystemConfig::require_valid() const {
  auto err = validate();
  if (err.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : err) os << "\n  " << e;
  throw InvalidArgument(os.str());
}

void to_json(nlohmann::json& j, const SystemConfig& c) {
  j = nlohmann::json{{"n_tx", c.n_tx},
                     {"n_rx", c.n_rx},
                     {"n_users", c.n_users},
                     {"n_targets", c.n_targets},
                     {"p_max_dbm", c.p_max_dbm},
                     {"noise_dbm", c.noise_dbm},
                     {"psk_order", c.psk_order},
                     {"gamma_db", c.gamma_db},
                     {"rician_factor", c.rician_factor},
                     {"path_loss_db", c.path_loss_db},
                     {"bandwidth_hz", c.bandwidth_hz},
                     {"grid_size", c.grid_size},
                     {"beam_width_deg", c.beam_width_deg},
                     {"target_angles_deg", c.target_angles_deg},
                     {"xi", c.xi},
                     {"delta_omega", c.delta_omega},
                     {"eps1", c.eps1},
                     {"eps2", c.eps2},
                     {"eps3", c.eps3},
                     {"max_iters_soop1", c.max_iters_soop1},
                     {"max_iters_soop2", c.max_iters_soop2},
                     {"max_iters_moop", c.max_iters_moop},
                     {"randomization_draws", c.randomization_draws},
                     {"rank_one_tol", c.rank_one_tol},
                     {"rng_seed", c.rng_seed}};
}

void from_json(const nlohmann::json& j, SystemConfig& c) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  static const std::set<std::string> known{
      "n_tx", "n_rx", "n_users", "n_targets", "p_max_dbm", "noise_dbm", "psk_order", "gamma_db",
      "rician_factor", "path_loss_db", "bandwidth_hz", "grid_size", "beam_width_deg",
      "target_angles_deg", "xi", "delta_omega", "eps1", "eps2", "eps3", "max_iters_soop1",
      "max_iters_soop2", "max_iters_moop", "randomization_draws", "rank_one_tol", "rng_seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw InvalidArgument("config: unknown field `" + it.key() + "`");

  read_field(j, "n_tx", c.n_tx);
  read_field(j, "n_rx", c.n_rx);
  read_field(j, "n_users", c.n_users);
  read_field(j, "n_targets", c.n_targets);
  read_field(j, "p_max_dbm", c.p_max_dbm);
  read_field(j, "noise_dbm", c.noise_dbm);
  read_field(j, "psk_order", c.psk_order);
  if (auto it = j.find("gamma_db"); it != j.end() && it->is_number())
    c.gamma_db = {it->get<double>()};
  else
    read_field(j, "gamma_db", c.gamma_db);
  read_field(j, "rician_factor", c.rician_factor);
  read_field(j, "path_loss_db", c.path_loss_db);
  read_field(j, "bandwidth_hz", c.bandwidth_hz);
  read_field(j, "grid_size", c.grid_size);
  read_field(j, "beam_width_deg", c.beam_width_deg);
  read_field(j, "target_angles_deg", c.target_angles_deg);
  read_field(j, "xi", c.xi);
  read_field(j, "delta_omega", c.delta_omega);
  read_field(j, "eps1", c.eps1);
  read_field(j, "eps2", c.eps2);
  read_field(j, "eps3", c.eps3);
  read_field(j, "max_iters_soop1", c.max_iters_soop1);
  read_field(j, "max_iters_soop2", c.max_iters_soop2);
  read_field(j, "max_iters_moop", c.max_iters_moop);
  read_field(j, "randomization_draws", c.randomization_draws);
  read_field(j, "rank_one_tol", c.rank_one_tol);
  read_field(j, "rng_seed", c.rng_seed);
}

double AngleGrid::spacing() const {
  return angles_rad.size() < 2 ? 0.0 : angles_rad[1] - angles_rad[0];
}

PskSymbolSet PskSymbolSet::make(int order) {
  if (!is_power_of_two(order)) throw InvalidArgument("PSK order must be a power of two >= 2");
  return PskSymbolSet{order};
}

cdouble PskSymbolSet::symbol(int i) const {
  return std::polar(1.0, kPi * (2.0 * i + 1.0) / order);
}

CVec steering_vector(int n, double theta) {
  if (n < 1) throw InvalidArgument("steering_vector: n must be >= 1");
  constexpr double slack = 1e-12;
  if (!(theta >= -kPi / 2 - slack && theta <= kPi / 2 + slack))
    throw DomainError("steering_vector: angle outside [-pi/2, pi/2]");
  CVec a(n);
  const double s = std::sin(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) a[m] = std::polar(scale, -kPi * m * s);
  return a;
}

AngleGrid build_grid(int grid_size) {
  if (grid_size < 2) throw InvalidArgument("build_grid: grid_size must be >= 2");
  AngleGrid g;
  g.angles_rad.resize(static_cast<std::size_t>(grid_size));
  for (int l = 0; l < grid_size; ++l) g.angles_rad[l] = -kPi / 2 + l * (kPi / grid_size);
  return g;
}

AngleGrid build_grid(const SystemConfig& cfg) { return build_grid(cfg.grid_size); }

RVec desired_beampattern(const AngleGrid& grid, std::span<const double> targets,
                         double delta_theta) {
  if (targets.empty()) throw InvalidArgument("desired_beampattern: empty target list");
  const double half = delta_theta / 2;
  RVec g = RVec::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t l = 0; l < grid.size(); ++l) {
    for (double t : targets) {
      // Rounding slack keeps exact boundary angles outside, so the inequality stays strict.
      if (std::abs(grid.angles_rad[l] - t) < half - 1e-12) {
        g[static_cast<Eigen::Index>(l)] = 1.0;
        break;
      }
    }
  }
  return g;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ScenarioDraw draw_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.require_valid();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::uniform_int_distribution<int> pick(0, cfg.psk_order - 1);

  ScenarioDraw s;
  s.grid = build_grid(cfg);
  for (double t : cfg.target_angles_deg) s.target_angles_rad.push_back(deg_to_rad(t));
  s.desired_gain = desired_beampattern(s.grid, s.target_angles_rad, deg_to_rad(cfg.beam_width_deg));

  const double v = cfg.rician_factor;
  const double w_los = std::sqrt(v / (1.0 + v));
  const double w_nlos = std::sqrt(1.0 / (1.0 + v));
  const double attenuation = std::sqrt(db_to_linear(-cfg.path_loss_db));
  const auto psk = PskSymbolSet::make(cfg.psk_order);

  for (int k = 0; k < cfg.n_users; ++k) {
    const double theta = angle(rng);
    s.user_angles_rad.push_back(theta);
    CVec g(cfg.n_tx);
    for (int m = 0; m < cfg.n_tx; ++m) {
      const double re = normal(rng);
      g[m] = cdouble(re, normal(rng));
    }
    s.channels.push_back(attenuation * (w_los * steering_vector(cfg.n_tx, theta) + w_nlos * g));
  }
  for (int k = 0; k < cfg.n_users; ++k) s.symbols.push_back(psk.symbol(pick(rng)));
  return s;
}

nlohmann::json scenario_to_json(const ScenarioDraw& s) {
  nlohmann::json j;
  j["schema"] = "isac.scenario/1";
  auto& ch = j["channels"] = nlohmann::json::array();
  for (const auto& h : s.channels) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index i = 0; i < h.size(); ++i) row.push_back(complex_to_json(h[i]));
    ch.push_back(row);
  }
  auto& sy = j["symbols"] = nlohmann::json::array();
  for (auto c : s.symbols) sy.push_back(complex_to_json(c));
  j["target_angles_rad"] = s.target_angles_rad;
  j["user_angles_rad"] = s.user_angles_rad;
  j["grid_angles_rad"] = s.grid.angles_rad;
  j["desired_gain"] = std::vector<double>(s.desired_gain.data(), s.desired_gain.data() + s.desired_gain.size());
  return j;
}

ScenarioDraw scenario_from_json(const nlohmann::json& j) {
  ScenarioDraw s;
  try {
    for (const auto& row : j.at("channels")) {
      CVec h(static_cast<Eigen::Index>(row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) h[static_cast<Eigen::Index>(i)] = complex_from_json(row[i]);
      s.channels.push_back(h);
    }
    for (const auto& c : j.at("symbols")) s.symbols.push_back(complex_from_json(c));
    s.target_angles_rad = j.at("target_angles_rad").get<std::vector<double>>();
    s.user_angles_rad = j.at("user_angles_rad").get<std::vector<double>>();
    s.grid.angles_rad = j.at("grid_angles_rad").get<std::vector<double>>();
    auto g = j.at("desired_gain").get<std::vector<double>>();
    s.desired_gain = Eigen::Map<RVec>(g.data(), static_cast<Eigen::Index>(g.size()));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("scenario JSON: ") + e.what());
  }
  if (s.channels.size() != s.symbols.size()) throw InvalidArgument("scenario JSON: channels/symbols mismatch");
  if (static_cast<std::size_t>(s.desired_gain.size()) != s.grid.size())
    throw InvalidArgument("scenario JSON: desired_gain length differs from grid");
  return s;
}

RVec realify_vector(const CVec& x) {
  const auto n = x.size();
  RVec r(2 * n);
  r.head(n) = x.imag();
  r.tail(n) = x.real();
  return r;
}

CVec complexify(const RVec& xt) {
  if (xt.size() % 2 != 0) throw InvalidArgument("complexify: odd length");
  const auto n = xt.size() / 2;
  CVec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = cdouble(xt[n + i], xt[i]);
  return x;
}

RealifiedUser realify_user(const CVec& h) {
  // h^H x = sum (a - jb)(c + jd) with h = a + jb, x = c + jd:
  //   Re = a.c + b.d,  Im = a.d - b.c.  With x~ = [d; c]:
  //   z  = [a; -b],  z~ = [b; a].
  const auto n = h.size();
  RealifiedUser u;
  u.z.resize(2 * n);
  u.z.head(n) = h.real();
  u.z.tail(n) = -h.imag();
  u.z_tilde.resize(2 * n);
  u.z_tilde.head(n) = h.imag();
  u.z_tilde.tail(n) = h.real();
  u.H.resize(2 * n, 2);
  u.H.col(0) = u.z;
  u.H.col(1) = u.z_tilde;
  return u;
}

Realified realify(std::span<const CVec> channels, std::span<const cdouble> symbols, const CVec& x) {
  if (channels.size() != symbols.size()) throw InvalidArgument("realify: channel/symbol count mismatch");
  Realified r;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].size() != x.size()) throw InvalidArgument("realify: dimension mismatch");
    r.users.push_back(realify_user(channels[k] * symbols[k]));
  }
  r.x_tilde = realify_vector(x);
  return r;
}

}  // namespace isac::model
