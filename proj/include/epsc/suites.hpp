#pragma once

#include "epsc/io.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace epsc {

struct SuiteOptions {
  uint64_t seed = 7;
  int workers = 1;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // one line, measured values
  Json report;          // deterministic: no timings
  std::vector<std::pair<std::string, std::string>> artifacts;  // file name, bytes
  double seconds = 0.0;
};

inline constexpr int kCriteria = 13;
const char* criterion_name(int id);

// "all", a comma list of ids ("1,4,9"), or criterion names.
std::vector<int> parse_suite(const std::string& spec);

CriterionResult run_criterion(int id, const SuiteOptions& opt);
// Determinism: reruns every earlier result with the same seed at a different worker count and
// compares report and artifact bytes.
CriterionResult run_determinism(const std::vector<CriterionResult>& first, const SuiteOptions& opt);

// Runs the ids in order; 13 reuses the results of the others (running 1..12 first if needed).
std::vector<CriterionResult> run_suites(const std::vector<int>& ids, const SuiteOptions& opt,
                                        const std::function<void(const CriterionResult&)>& on_done = {});

std::string result_line(const CriterionResult& r);

}  // namespace epsc
