#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace isac::metrics {

namespace {

void require_hermitian(const CMat& R, const char* where) {
  if (R.rows() != R.cols()) throw InvalidArgument(std::string(where) + ": matrix not square");
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  if ((R - R.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidArgument(std::string(where) + ": matrix not Hermitian");
}

}  // namespace

double WaveformReport::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : margins) m = std::min(m, c.value);
  return margins.empty() ? 0.0 : m;
}

nlohmann::json to_json(const WaveformReport& r) {
  nlohmann::json j;
  j["sum_rate_bps"] = r.sum_rate_bps;
  j["per_user_rate"] = r.per_user_rate;
  j["mse"] = r.mse;
  j["eta_star"] = r.eta_star;
  auto& m = j["margins"] = nlohmann::json::array();
  for (const auto& c : r.margins) m.push_back({{"user", c.user}, {"value", c.value}});
  j["tx_power"] = r.tx_power;
  j["beam_gains"] = std::vector<double>(r.beam_gains.data(), r.beam_gains.data() + r.beam_gains.size());
  j["approximate"] = r.approximate;
  j["rank_one_gap"] = std::isnan(r.rank_one_gap) ? nlohmann::json(nullptr) : nlohmann::json(r.rank_one_gap);
  j["rank_ratio"] = r.rank_ratio;
  return j;
}

std::string csv_row(const WaveformReport& r, std::uint64_t seed, double omega1) {
  std::ostringstream os;
  os << std::setprecision(17) << seed << ',' << omega1 << ',' << r.sum_rate_bps << ',' << r.mse << ','
     << r.tx_power << ',' << r.min_margin() << ',' << r.rank_ratio;
  return os.str();
}

CMat steering_matrix(int n_tx, const model::AngleGrid& grid) {
  CMat A(n_tx, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t l = 0; l < grid.size(); ++l)
    A.col(static_cast<Eigen::Index>(l)) = model::steering_vector(n_tx, grid.angles_rad[l]);
  return A;
}

RVec beampattern_gain(const CMat& R, const CMat& A) {
  require_hermitian(R, "beampattern_gain");
  if (R.rows() != A.rows()) throw InvalidArgument("beampattern_gain: dimension mismatch");
  // diag(A^H R A), real part; the imaginary residue is rounding only.
  const CMat RA = R * A;
  RVec g(A.cols());
  for (Eigen::Index l = 0; l < A.cols(); ++l) g[l] = A.col(l).dot(RA.col(l)).real();
  return g;
}

RVec beampattern_gain(const CMat& R, const model::AngleGrid& grid) {
  return beampattern_gain(R, steering_matrix(static_cast<int>(R.rows()), grid));
}

RVec beampattern_gain_vec(const CVec& x, const CMat& A) {
  if (x.size() != A.rows()) throw InvalidArgument("beampattern_gain_vec: dimension mismatch");
  return (A.adjoint() * x).cwiseAbs2();
}

double user_rate(const CVec& h, const CVec& x, double noise_mw, double bandwidth_hz) {
  if (h.size() != x.size()) throw InvalidArgument("user_rate: dimension mismatch");
  return bandwidth_hz * std::log2(1.0 + std::norm(h.dot(x)) / noise_mw);
}

double sum_rate(std::span<const CVec> channels, const CVec& x, double noise_mw, double bandwidth_hz) {
  double r = 0.0;
  for (const auto& h : channels) r += user_rate(h, x, noise_mw, bandwidth_hz);
  return r;
}

double sum_rate(const model::ScenarioDraw& s, const CVec& x, const model::SystemConfig& cfg) {
  return sum_rate(s.channels, x, cfg.noise_mw(), cfg.bandwidth_hz);
}

double eta_star(const RVec& gains, const RVec& desired) {
  if (gains.size() != desired.size()) throw InvalidArgument("eta_star: length mismatch");
  const double den = desired.squaredNorm();
  if (!(den > 0.0)) throw InvalidArgument("degenerate desired beampattern");
  return desired.dot(gains) / den;
}

double eta_star(const CMat& R, const RVec& desired, const model::AngleGrid& grid) {
  return eta_star(beampattern_gain(R, grid), desired);
}

double beampattern_mse(double eta, const RVec& gains, const RVec& desired) {
  if (gains.size() != desired.size()) throw InvalidArgument("beampattern_mse: length mismatch");
  if (gains.size() == 0) return 0.0;
  return (eta * desired - gains).squaredNorm() / static_cast<double>(gains.size());
}

double beampattern_mse(double eta, const CMat& R, const RVec& desired, const model::AngleGrid& grid) {
  return beampattern_mse(eta, beampattern_gain(R, grid), desired);
}

double optimal_mse(const RVec& gains, const RVec& desired) {
  return beampattern_mse(eta_star(gains, desired), gains, desired);
}

double ci_margin_value(cdouble c, double sqrt_noise_gamma, double phi) {
  return (c.real() - sqrt_noise_gamma) * std::tan(phi) - std::abs(c.imag());
}

std::vector<CiMargin> ci_margin(const model::ScenarioDraw& s, const CVec& x, const model::SystemConfig& cfg) {
  const double phi = kPi / cfg.psk_order;
  std::vector<CiMargin> out;
  for (int k = 0; k < s.n_users(); ++k) {
    if (s.channels[k].size() != x.size()) throw InvalidArgument("ci_margin: dimension mismatch");
    const cdouble c = s.rotated_channel(k).dot(x);
    const double gamma = cfg.gamma_linear(k);
    if (gamma < 0.0) throw DomainError("ci_margin: negative SNR threshold");
    out.push_back({k, ci_margin_value(c, std::sqrt(cfg.noise_mw() * gamma), phi)});
  }
  return out;
}

CVec principal_component(const CMat& R) {
  Eigen::SelfAdjointEigenSolver<CMat> es(R);
  if (es.info() != Eigen::Success) throw std::runtime_error("principal_component: eigensolver failed");
  const Eigen::Index n = R.rows();
  const double lam = std::max(0.0, es.eigenvalues()[n - 1]);
  return std::sqrt(lam) * es.eigenvectors().col(n - 1);
}

double rank_ratio(const CMat& R) {
  if (R.rows() < 2) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(R, Eigen::EigenvaluesOnly);
  const Eigen::Index n = R.rows();
  const double l1 = es.eigenvalues()[n - 1];
  if (!(l1 > 0.0)) return 0.0;
  return std::max(0.0, es.eigenvalues()[n - 2]) / l1;
}

WaveformReport evaluate_waveform(const std::optional<CVec>& x, const std::optional<CMat>& R,
                                 const model::ScenarioDraw& s, const model::SystemConfig& cfg) {
  if (!x && !R) throw InvalidArgument("evaluate_waveform: neither x nor R supplied");
  WaveformReport rep;
  CVec xv;
  CMat Rm;
  if (x) {
    xv = *x;
    Rm = R ? *R : CMat(xv * xv.adjoint());
    if (R) rep.rank_one_gap = (*R - xv * xv.adjoint()).norm();
  } else {
    Rm = *R;
    require_hermitian(Rm, "evaluate_waveform");
    xv = principal_component(Rm);
    rep.approximate = true;
  }
  rep.rank_ratio = x && !R ? 0.0 : rank_ratio(Rm);

  for (const auto& h : s.channels) rep.per_user_rate.push_back(user_rate(h, xv, cfg.noise_mw(), cfg.bandwidth_hz));
  for (double r : rep.per_user_rate) rep.sum_rate_bps += r;
  rep.margins = ci_margin(s, xv, cfg);
  rep.tx_power = x ? xv.squaredNorm() : Rm.trace().real();

  rep.beam_gains = beampattern_gain(Rm, s.grid);
  rep.eta_star = eta_star(rep.beam_gains, s.desired_gain);
  rep.mse = beampattern_mse(rep.eta_star, rep.beam_gains, s.desired_gain);
  return rep;
}

}  // namespace isac::metrics
