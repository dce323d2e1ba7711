#include "isac/harness/export.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace isac::harness {

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw InvalidArgument("format: expected csv or json, got '" + s + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.seed << ',' << format_double(r.omega1) << ',' << format_double(r.p_max_dbm) << ',' << r.n_tx << ','
       << format_double(r.sum_rate) << ',' << format_double(r.mse_relaxed) << ',' << format_double(r.mse_extracted)
       << ',' << format_double(r.min_ci_margin) << ',' << format_double(r.tx_power) << ',' << r.iters << ','
       << r.status << '\n';
  }
}

nlohmann::json records_to_json(const std::vector<TrialRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(r);
  return {{"schema", kTrialSchema}, {"records", arr}};
}

std::vector<TrialRecord> records_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("records") || !j.at("records").is_array())
    throw InvalidArgument("records JSON: expected an object with a `records` array");
  std::vector<TrialRecord> out;
  for (const auto& e : j.at("records")) out.push_back(e.get<TrialRecord>());
  return out;
}

void write_summary_csv(std::ostream& os, const Summary& s) {
  for (auto k : s.group_keys) os << to_string(k) << ',';
  os << "count,sum_rate_mean,sum_rate_std,mse_relaxed_mean,mse_relaxed_std,mse_extracted_mean,mse_extracted_std,"
        "iters_mean,iters_std\n";
  for (const auto& r : s.rows) {
    for (double k : r.keys) os << format_double(k) << ',';
    os << r.sum_rate.count << ',' << format_double(r.sum_rate.mean) << ',' << format_double(r.sum_rate.std) << ','
       << format_double(r.mse_relaxed.mean) << ',' << format_double(r.mse_relaxed.std) << ','
       << format_double(r.mse_extracted.mean) << ',' << format_double(r.mse_extracted.std) << ','
       << format_double(r.iters.mean) << ',' << format_double(r.iters.std) << '\n';
  }
}

nlohmann::json summary_to_json(const Summary& s) {
  auto stat = [](const Stat& st) { return nlohmann::json{{"mean", st.mean}, {"std", st.std}, {"count", st.count}}; };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    nlohmann::json row;
    for (std::size_t i = 0; i < r.keys.size(); ++i) row[to_string(s.group_keys[i])] = r.keys[i];
    row["sum_rate"] = stat(r.sum_rate);
    row["mse_relaxed"] = stat(r.mse_relaxed);
    row["mse_extracted"] = stat(r.mse_extracted);
    row["iters"] = stat(r.iters);
    rows.push_back(row);
  }
  return {{"rows", rows}, {"warnings", s.warnings}};
}

void write_beampattern_csv(std::ostream& os, const std::vector<double>& angles_rad, const std::vector<double>& gain) {
  if (angles_rad.size() != gain.size()) throw InvalidArgument("beampattern export: length mismatch");
  os << kBeampatternCsvHeader << '\n';
  for (std::size_t i = 0; i < gain.size(); ++i)
    os << format_double(rad_to_deg(angles_rad[i])) << ',' << format_double(gain[i]) << '\n';
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent, ec);
  if (ec) throw IoError(path + ": cannot create directory: " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing: " + std::strerror(errno));
  fn(out);
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace isac::harness
