#include "depthlab/core.hpp"

#include <cmath>
#include <vector>

namespace depthlab {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::kDimensionMismatch: return "dimension-mismatch";
    case Errc::kUndefinedForAtomic: return "density-undefined-for-atomic";
    case Errc::kUnsupported: return "unsupported";
    case Errc::kSingular: return "singular";
    case Errc::kNotApplicable: return "not-applicable";
    case Errc::kNumericalFailure: return "numerical-failure";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kConfig: return "config";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

Estimate make_estimate(double value, double std_error, std::size_t samples,
                       std::uint64_t seed) {
  Estimate e;
  e.value = value;
  e.std_error = std_error;
  e.ci_low = value - 1.959963984540054 * std_error;
  e.ci_high = value + 1.959963984540054 * std_error;
  e.samples = samples;
  e.seed = seed;
  return e;
}

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

Estimate mean_estimate(const double* values, std::size_t count,
                       std::uint64_t seed) {
  if (count == 0) return make_estimate(kNaN, kNaN, 0, seed);
  const double mean = pairwise_sum(values, count) / static_cast<double>(count);
  if (count == 1) return make_estimate(mean, 0.0, 1, seed);
  std::vector<double> sq(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq.data(), count) / static_cast<double>(count - 1);
  return make_estimate(mean, std::sqrt(var / static_cast<double>(count)), count, seed);
}

void require_dimension(const Vector& x, int n, const char* what) {
  if (x.size() != n) {
    throw Error(Errc::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(n) +
                    ", got " + std::to_string(x.size()));
  }
}

}  // namespace depthlab
