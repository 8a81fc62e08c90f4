#pragma once

// Invariant suites run by `bqm check`.

#include <cstdint>
#include <string>
#include <vector>

namespace bqm {

struct CheckResult {
  std::string suite;
  std::string name;
  double value;
  /// Human-readable acceptance condition, e.g. "<= 1e-08" or "> 0".
  std::string condition;
  bool passed;
};

/// algebra, reduction, evolution, bundle, green.
std::vector<std::string> available_suites();

/// Runs one suite, or every suite for "all". Unknown names throw DomainError
/// listing the available suites. Tolerances are multiplied by tolerance_scale.
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed = 1, double tolerance_scale = 1.0);

}  // namespace bqm
