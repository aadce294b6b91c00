#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/measure.hpp"

namespace depthlab {

enum class ExperimentKind {
  kExpectedDepth,
  kCramerSurface,
  kInclusionSuite,
  kThresholdSweep,
  kBoundSandwich,
  kDilation,
};

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

struct Budgets {
  std::size_t samples = 10000;        // outer Monte-Carlo points
  std::size_t reps = 8;               // polytope repetitions
  std::size_t test_points = 500;      // membership tests per polytope
  std::size_t net_size = 64;
  std::size_t refine_iters = 32;
  std::size_t mc_budget = 100000;     // sample pools for tails, moments, Laplace
  std::size_t directions = 200;       // directions for body checks
  std::size_t kappa_samples = 2000;
  std::size_t polytope_vertices = 30;
  std::size_t polytopes = 10;
  std::size_t max_count = std::size_t{1} << 20;
  std::optional<double> seconds_per_point;
};

struct Tolerances {
  double sigmas = 3.0;
  double identity = 0.005;
  double cramer = 1e-6;
  double grunbaum = 0.01;
  double volume = 0.02;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kExpectedDepth;
  MeasureKind measure = MeasureKind::kGaussianStandard;
  std::vector<int> dimensions{2};
  std::uint64_t seed = 0;
  std::vector<std::size_t> counts;  // polytope sizes N; empty: experiment default
  std::vector<double> orders{2.0, 4.0, 8.0};
  std::vector<double> deltas{0.1, 0.5};
  std::vector<double> radii{0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
  Budgets budgets;
  Tolerances tolerances;
  std::string output_dir;  // empty: "out/<experiment>"
  std::vector<std::string> formats{"csv", "json", "svg"};
  bool log_x = false;
};

struct ConfigError {
  std::size_t line = 0;  // 0 when the error is not tied to a line
  std::string key;       // "section.key", or empty
  std::string message;
};

std::string format_error(const ConfigError& e);

struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

/// Parses the bracketed-section key = value format documented in the README.
/// Every problem is reported, not just the first.
ConfigParseResult parse_config(std::string_view text);

/// Reads and parses a file; throws Error(kConfig) listing all errors, or
/// Error(kIo) when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Every field, defaults included, in a fixed order with shortest
/// round-trip numbers; the input to config_hash.
std::string canonical_text(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical text, as 16 lowercase hex digits.
std::string config_hash(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace depthlab
