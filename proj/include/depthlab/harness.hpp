#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "depthlab/config.hpp"

namespace depthlab {

using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct MetricTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  /// Index of a column, or -1.
  int column(const std::string& name) const;
  /// Cells compare NaN-equal to NaN, so a reloaded record equals the original.
  friend bool operator==(const MetricTable& a, const MetricTable& b);
};

enum class AssertionStatus { kPass, kFail, kSkipped };

const char* to_string(AssertionStatus status);

struct Assertion {
  std::string name;
  AssertionStatus status = AssertionStatus::kSkipped;
  double measured = kNaN;
  double bound = kNaN;
  std::string relation;  // "<=", ">=", "in", "==" or empty
  std::string detail;

  friend bool operator==(const Assertion& a, const Assertion& b);
};

/// Numeric view of a cell: doubles and integers as is, bools as 0/1, else NaN.
double cell_number(const Cell& cell);

/// measured <= bound (or >= when `at_least`), NaN measured fails.
Assertion check_bound(std::string name, double measured, double bound, bool at_least = false,
                      std::string detail = {});
Assertion skipped(std::string name, std::string reason);

struct PlotSpec {
  std::string name;  // file stem
  std::string table;
  std::string x;
  std::string y;
  std::string lo;     // CI columns, may be empty
  std::string hi;
  std::string group;  // one line per distinct value, may be empty
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  friend bool operator==(const PlotSpec&, const PlotSpec&) = default;
};

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  std::string started;   // ISO-8601 UTC
  std::string finished;
  std::deque<MetricTable> metrics;  // deque: references from table() stay valid
  std::vector<Assertion> assertions;
  std::vector<PlotSpec> plots;
  bool partial = false;
  std::string error;

  MetricTable& table(const std::string& name, std::vector<std::string> columns);
  const MetricTable* find_table(const std::string& name) const;
  bool all_passed() const;  // no failures (skips allowed)
  std::size_t count(AssertionStatus status) const;
  friend bool operator==(const RunRecord& a, const RunRecord& b) = default;
};

inline constexpr int kRecordSchemaVersion = 1;

std::string artifact_version();
std::string utc_timestamp();

/// Executes the configured experiment. Exceptions thrown part-way leave the
/// results gathered so far in the record, with partial = true.
RunRecord run(const ExperimentConfig& config);

/// Same, reporting each finished step through `progress` (may be empty).
RunRecord run(const ExperimentConfig& config, const std::function<void(const std::string&)>& progress);

/// RFC-4180 CSV with a header row; numbers in shortest round-trip form.
void write_csv(const MetricTable& table, std::ostream& out);
std::string to_csv(const MetricTable& table);

std::string to_json(const RunRecord& record);
/// Inverse of to_json; throws Error(kConfig) on malformed input.
RunRecord record_from_json(const std::string& text);

/// 800 x 600 line plot with shaded CI bands.
std::string render_svg(const RunRecord& record, const PlotSpec& plot);

/// Writes one CSV per metric table, summary.json, and one SVG per plot, for
/// the requested formats. Returns the written paths. If a write fails the
/// summary is still attempted with partial = true, then Error(kIo) is thrown.
std::vector<std::string> emit(const RunRecord& record, const std::string& directory,
                              const std::vector<std::string>& formats = {"csv", "json", "svg"});

}  // namespace depthlab
