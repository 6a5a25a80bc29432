#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qntk/oracle.hpp"

namespace qntk::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed discrepancy
  double tolerance = 0.0;
  std::int64_t cases = 0;
  std::string detail;      // filled on failure
};

struct VerifyOptions {
  std::uint64_t seed = 20240901;
  oracle::OracleCaps caps = oracle::default_caps();
  // negative-control hook: corrupts one phase bit on the stabilizer side of
  // the first cross-check, which must make the suite fail
  bool inject_phase_bug = false;
};

/// Runs the oracle cross-check suite at the configured caps.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace qntk::verify
