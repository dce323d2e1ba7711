#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isac/harness/aggregate.hpp"
#include "isac/harness/config.hpp"
#include "isac/harness/export.hpp"
#include "isac/harness/montecarlo.hpp"

using namespace isac;
using namespace isac::harness;

namespace {

RunConfig tiny_run() {
  RunConfig c;
  c.system.n_tx = 3;
  c.system.n_users = 2;
  c.system.grid_size = 60;
  c.n_trials = 2;
  c.sweep.values = {0.3, 0.7};
  return c;
}

TrialRecord record(double omega1, double rate) {
  TrialRecord r;
  r.seed = 1;
  r.omega1 = omega1;
  r.p_max_dbm = 25;
  r.n_tx = 8;
  r.sum_rate = rate;
  r.mse_relaxed = 2 * rate;
  r.mse_extracted = 3 * rate;
  r.status = "Optimal";
  return r;
}

std::string csv_of(const std::vector<TrialRecord>& recs) {
  std::ostringstream os;
  write_records_csv(os, recs);
  return os.str();
}

}  // namespace

TEST_CASE("empty config yields the reference defaults") {
  RunConfig c = nlohmann::json::object().get<RunConfig>();
  CHECK(c.system.n_tx == 8);
  CHECK(c.system.n_rx == 8);
  CHECK(c.system.p_max_dbm == 25.0);
  CHECK(c.system.noise_dbm == -60.0);
  CHECK(c.system.n_users == 3);
  CHECK(c.system.n_targets == 3);
  CHECK(c.system.delta_omega == 0.01);
  CHECK(c.system.grid_size == 180);
  CHECK(c.system.beam_width_deg == 3.0);
  CHECK(c.system.rician_factor == 1.0);
  CHECK(c.system.xi == 0.001);
  CHECK(c.system.eps1 == 1e-4);
  CHECK(c.system.eps2 == 1e-4);
  CHECK(c.system.eps3 == 1e-4);
  CHECK(c.n_trials == 1000);
  CHECK(c.weights().size() == 99);
}

TEST_CASE("config errors name the field") {
  RunConfig c = nlohmann::json({{"n_users", 0}}).get<RunConfig>();
  const auto errs = c.validate();
  REQUIRE(!errs.empty());
  CHECK(errs.front().find("n_users") != std::string::npos);
  CHECK_THROWS_WITH_AS(nlohmann::json({{"sweep", {{"axs", "omega"}}}}).get<RunConfig>(),
                       doctest::Contains("sweep.axs"), InvalidArgument);
  CHECK_THROWS_WITH_AS(nlohmann::json({{"n_trials", "many"}}).get<RunConfig>(), doctest::Contains("n_trials"),
                       InvalidArgument);
}

TEST_CASE("weight step controls the number of interior weights") {
  RunConfig c = nlohmann::json({{"delta_omega", 0.05}}).get<RunConfig>();
  CHECK(c.weights().size() == 19);
}

TEST_CASE("load_config reads files and lists failures") {
  const auto dir = std::filesystem::temp_directory_path() / "isac_unit_cfg";
  std::filesystem::create_directories(dir);
  const auto good = (dir / "good.json").string();
  std::ofstream(good) << R"({"n_tx": 4, "sweep": {"axis": "p_max_dbm", "values": [20, 30]}})";
  const auto c = load_config(good);
  CHECK(c.system.n_tx == 4);
  CHECK(c.sweep_values() == std::vector<double>{20, 30});

  const auto bad = (dir / "bad.json").string();
  std::ofstream(bad) << R"({"n_tx": 0, "n_trials": 0})";
  CHECK_THROWS_WITH_AS(load_config(bad), doctest::Contains("n_trials"), InvalidArgument);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), InvalidArgument);
}

TEST_CASE("aggregate statistics") {
  auto s = aggregate({record(0.5, 4.0)}, {GroupKey::Omega1});
  REQUIRE(s.rows.size() == 1);
  CHECK(s.rows[0].sum_rate.mean == 4.0);
  CHECK(s.rows[0].sum_rate.std == 0.0);
  CHECK(s.rows[0].sum_rate.count == 1);

  s = aggregate({record(0.5, 2.0), record(0.5, 6.0)}, {GroupKey::Omega1});
  CHECK(s.rows[0].sum_rate.mean == 4.0);
  CHECK(s.rows[0].mse_extracted.mean == 12.0);

  std::vector<TrialRecord> recs;
  for (int t = 0; t < 3; ++t)
    for (double w : {0.25, 0.5, 0.75}) recs.push_back(record(w, t + w));
  s = aggregate(recs, {GroupKey::Omega1});
  CHECK(s.rows.size() == 3);
  CHECK(s.rows[1].keys[0] == 0.5);

  auto failed = record(0.9, 1.0);
  failed.status = "NumericalFailure";
  recs.push_back(failed);
  s = aggregate(recs, {GroupKey::Omega1});
  CHECK(s.rows.size() == 3);
  CHECK(s.warnings.size() == 1);
  CHECK_THROWS_AS(aggregate({}, {GroupKey::Omega1}), InvalidArgument);
}

TEST_CASE("CSV export") {
  CHECK(csv_of({}) == std::string(kRecordCsvHeader) + "\n");
  CHECK(std::string(kRecordCsvHeader) ==
        "seed,omega1,p_max_dbm,n_tx,sum_rate,mse_relaxed,mse_extracted,min_ci_margin,tx_power,iters,status");
  const auto text = csv_of({record(0.5, 4.0)});
  const auto row = text.substr(text.find('\n') + 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
  CHECK(row.rfind("1,0.5,25,8,4,8,12,", 0) == 0);
}

TEST_CASE("JSON export round trips") {
  std::vector<TrialRecord> recs{record(0.1, 1.0 / 3.0), record(0.9, 2e-17)};
  recs[1].status = "Infeasible";
  const auto back = records_from_json(records_to_json(recs));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(back[i].same_result(recs[i]));
  CHECK_THROWS_AS(records_from_json(nlohmann::json::array()), InvalidArgument);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("write_file reports the failing path") {
  CHECK_THROWS_WITH_AS(write_file("/proc/isac/nope.csv", [](std::ostream&) {}), doctest::Contains("/proc/isac"),
                       IoError);
}

TEST_CASE("Monte-Carlo runs are reproducible and independent of the job count") {
  auto c = tiny_run();
  const auto a = run_montecarlo(c);
  const auto b = run_montecarlo(c);
  REQUIRE(a.records.size() == 4);
  CHECK(csv_of(a.records) == csv_of(b.records));
  c.jobs = 3;
  const auto p = run_montecarlo(c);
  REQUIRE(p.records.size() == a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(p.records[i].same_result(a.records[i]));
  CHECK(a.records[0].seed == model::mix_seed(c.system.rng_seed, 0));
}

TEST_CASE("infeasible trials are recorded without stopping the batch") {
  auto c = tiny_run();
  c.system.gamma_db = {80.0};
  const auto r = run_montecarlo(c);
  REQUIRE(r.records.size() == 4);
  for (const auto& rec : r.records) CHECK(rec.status == "Infeasible");
  CHECK(r.failure_fraction() == 1.0);
}
