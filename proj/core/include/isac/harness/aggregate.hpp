#pragma once

#include <string>
#include <vector>

#include "isac/harness/montecarlo.hpp"

namespace isac::harness {

enum class GroupKey { Omega1, PMaxDbm, NTx };

std::string to_string(GroupKey k);
GroupKey group_key_from_string(const std::string& s);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  int count = 0;
};

struct SummaryRow {
  std::vector<double> keys;  // one per group key, in request order
  Stat sum_rate;
  Stat mse_relaxed;
  Stat mse_extracted;
  Stat iters;
};

struct Summary {
  std::vector<GroupKey> group_keys;
  std::vector<SummaryRow> rows;  // sorted by keys
  std::vector<std::string> warnings;
};

Stat describe(const std::vector<double>& values);

/// Mean/std/count per group over successful records with finite values.
/// Groups left without such records are dropped with a warning.
Summary aggregate(const std::vector<TrialRecord>& records, const std::vector<GroupKey>& keys);

}  // namespace isac::harness
