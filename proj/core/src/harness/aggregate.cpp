#include "isac/harness/aggregate.hpp"

#include <cmath>
#include <map>

namespace isac::harness {

std::string to_string(GroupKey k) {
  switch (k) {
    case GroupKey::Omega1: return "omega1";
    case GroupKey::PMaxDbm: return "p_max_dbm";
    case GroupKey::NTx: return "n_tx";
  }
  return "omega1";
}

GroupKey group_key_from_string(const std::string& s) {
  if (s == "omega1") return GroupKey::Omega1;
  if (s == "p_max_dbm") return GroupKey::PMaxDbm;
  if (s == "n_tx") return GroupKey::NTx;
  throw InvalidArgument("group key: expected omega1, p_max_dbm or n_tx, got '" + s + "'");
}

Stat describe(const std::vector<double>& v) {
  Stat s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  double acc = 0.0;
  for (double x : v) acc += x;
  s.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

namespace {

double key_value(const TrialRecord& r, GroupKey k) {
  switch (k) {
    case GroupKey::Omega1: return r.omega1;
    case GroupKey::PMaxDbm: return r.p_max_dbm;
    case GroupKey::NTx: return r.n_tx;
  }
  return 0.0;
}

struct Bucket {
  std::vector<double> rate, mse_r, mse_x, iters;
};

}  // namespace

Summary aggregate(const std::vector<TrialRecord>& records, const std::vector<GroupKey>& keys) {
  if (records.empty()) throw InvalidArgument("aggregate: no records");
  Summary out;
  out.group_keys = keys;
  std::map<std::vector<double>, Bucket> groups;
  for (const auto& r : records) {
    std::vector<double> k;
    for (auto g : keys) k.push_back(key_value(r, g));
    auto& b = groups[k];
    if (!r.ok()) continue;
    if (!std::isfinite(r.sum_rate) || !std::isfinite(r.mse_extracted) || !std::isfinite(r.mse_relaxed)) continue;
    b.rate.push_back(r.sum_rate);
    b.mse_r.push_back(r.mse_relaxed);
    b.mse_x.push_back(r.mse_extracted);
    b.iters.push_back(r.iters);
  }
  for (const auto& [k, b] : groups) {
    if (b.rate.empty()) {
      std::string label;
      for (std::size_t i = 0; i < k.size(); ++i)
        label += (i ? ", " : "") + to_string(keys[i]) + "=" + std::to_string(k[i]);
      out.warnings.push_back("group {" + label + "} has no successful records; omitted");
      continue;
    }
    SummaryRow row;
    row.keys = k;
    row.sum_rate = describe(b.rate);
    row.mse_relaxed = describe(b.mse_r);
    row.mse_extracted = describe(b.mse_x);
    row.iters = describe(b.iters);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace isac::harness
