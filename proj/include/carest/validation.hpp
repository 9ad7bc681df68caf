#pragma once

// Named validation suites. Each suite owns its thresholds and reports every
// check with the measured value and its margin to the threshold.

#include "carest/io.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carest {

class UnknownSuite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SuiteOptions {
  std::optional<long> reps;       // overrides the suite's replication count
  std::optional<std::uint64_t> seed;
  int jobs{1};
};

struct CheckResult {
  std::string name;
  bool passed{false};
  double value{0.0};
  double threshold{0.0};
  std::string relation;  // how value compares with threshold: "<=", ">=", "=="
  double margin{0.0};    // signed, positive when passing
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  bool passed{true};
  double seconds{0.0};
  std::vector<CheckResult> checks;

  const CheckResult* find(const std::string& name) const;
};

struct Suite {
  std::string name;
  std::string description;
  std::function<SuiteReport(const SuiteOptions&)> run;
};

const std::vector<Suite>& suite_registry();
std::vector<std::string> suite_names();
bool suite_exists(const std::string& name);

/// Runs one suite, or every suite for "all". Throws UnknownSuite listing the
/// registered names.
std::vector<SuiteReport> run_suite(const std::string& name, const SuiteOptions& options = {});

Json suite_report_to_json(const SuiteReport& report);

}  // namespace carest
