#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isac::harness {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  int failures() const;
};

/// Runs the invariant suite of every module on seeded random instances.
/// Each check is logged to `log` as it finishes when given.
ValidationReport run_validation(std::uint64_t seed = 1, std::ostream* log = nullptr);

}  // namespace isac::harness
