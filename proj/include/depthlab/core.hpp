#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace depthlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Columns are points.
using PointSet = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Errc {
  kDimensionMismatch,
  kUndefinedForAtomic,
  kUnsupported,
  kSingular,
  kNotApplicable,
  kNumericalFailure,
  kInvalidArgument,
  kConfig,
  kIo,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Monte-Carlo estimate with a normal-approximation 95% interval.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool unreliable = false;
};

Estimate make_estimate(double value, double std_error, std::size_t samples,
                       std::uint64_t seed);

/// Mean and standard error of the mean, by pairwise summation so the result
/// does not depend on how the input was chunked.
Estimate mean_estimate(const double* values, std::size_t count,
                       std::uint64_t seed);

double pairwise_sum(const double* values, std::size_t count);

void require_dimension(const Vector& x, int n, const char* what);

}  // namespace depthlab
