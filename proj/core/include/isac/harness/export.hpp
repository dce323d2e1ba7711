#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/harness/aggregate.hpp"
#include "isac/harness/montecarlo.hpp"

namespace isac::harness {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kRecordCsvHeader =
    "seed,omega1,p_max_dbm,n_tx,sum_rate,mse_relaxed,mse_extracted,min_ci_margin,tx_power,iters,status";
inline constexpr const char* kBeampatternCsvHeader = "angle_deg,gain";

enum class Format { Csv, Json };
Format format_from_string(const std::string& s);

/// Shortest round-tripping decimal form.
std::string format_double(double v);

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records);
nlohmann::json records_to_json(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_json(const nlohmann::json& j);

void write_summary_csv(std::ostream& os, const Summary& s);
nlohmann::json summary_to_json(const Summary& s);

void write_beampattern_csv(std::ostream& os, const std::vector<double>& angles_rad, const std::vector<double>& gain);

/// Opens `path` for writing (creating parent directories) and runs `fn`;
/// failures raise IoError naming the path.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn);

}  // namespace isac::harness
