#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/harness.hpp"

namespace depthlab {

struct CriterionInfo {
  int id = 0;
  std::string slug;
  std::string title;
};

const std::vector<CriterionInfo>& acceptance_criteria();

struct CriterionResult {
  CriterionInfo info;
  std::vector<Assertion> assertions;
  double seconds = 0.0;
  std::string error;  // set when the criterion threw

  /// No failures, no error, at least one pass.
  bool passed() const;
  /// "PASS  3 depth-sandwich: 18/18 assertions, 41.2 s" style line.
  std::string line() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 0x5eed;
  std::function<void(const std::string&)> progress;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// Criterion ids of a suite: "acceptance" or "all" for every criterion, a
/// slug, "criterion-<k>", or a bare number. Throws Error(kInvalidArgument).
std::vector<int> suite_criteria(std::string_view suite);

/// Every criterion result as a record with a "criteria" table and all
/// assertions prefixed by the criterion slug.
RunRecord acceptance_record(const std::string& suite, const std::vector<CriterionResult>& results,
                            std::uint64_t seed);

}  // namespace depthlab
