#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/core.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

enum class MeasureKind {
  kGaussianStandard,
  kUniformCube,            // [-1, 1]^n
  kUniformCubeUnitVolume,  // [-1/2, 1/2]^n
  kDiscreteCube,           // uniform atoms on {-1, 1}^n
  kUniformBall,            // unit Euclidean ball
  kUniformSimplex,         // conv{0, e_1, ..., e_n} translated to its centroid
  kProductExponentialCentered,  // density e^{-(x_i + 1)} on x_i >= -1
  kCustomDensity,
};

std::string_view kind_name(MeasureKind kind);
std::optional<MeasureKind> parse_measure_kind(std::string_view name);
/// Every catalog kind (excludes kCustomDensity).
const std::vector<MeasureKind>& catalog_kinds();

struct MeasureTraits {
  bool atomic = false;
  bool centered = false;
  bool even = false;
  bool spherically_symmetric = false;
  bool uniform_on_body = false;
  bool product = false;
};

/// Law of one coordinate of a product measure.
struct CoordinateLaw {
  double support_lo = -kInf;
  double support_hi = kInf;
  /// Open interval of u for which E e^{uX} is finite.
  double mgf_lo = -kInf;
  double mgf_hi = kInf;
  std::function<double(double)> density;  // empty for atomic laws
  std::function<double(double)> cdf;      // P(X <= y)
  std::function<double(double)> sf;       // P(X >= y)
};

using LogDensityFn = std::function<double(const Vector&)>;
using SamplerFn = std::function<Vector(Rng&)>;

namespace detail {
struct Law;
}

/// A log-concave probability law on R^n (or the atomic discrete cube).
/// Cheap to copy; immutable and safe to share across threads.
class Measure {
 public:
  static Measure make(MeasureKind kind, int dimension);

  struct CustomSpec {
    int dimension = 1;
    LogDensityFn log_density;
    SamplerFn sampler;  // optional
    bool centered = false;
    bool even = false;
    std::string name = "custom-density";
  };
  static Measure custom(CustomSpec spec);

  /// Push-forward under y = A x + b.
  Measure affine_image(const Matrix& a, const Vector& b) const;

  int dimension() const;
  MeasureKind kind() const;
  const std::string& name() const;
  const MeasureTraits& traits() const;
  bool atomic() const { return traits().atomic; }

  /// -inf outside the support.
  double log_density(const Vector& x) const;
  double density(const Vector& x) const;

  bool has_sampler() const;
  PointSet sample(RngStream stream, std::size_t count) const;
  /// Draws one point from an existing generator.
  Vector draw(Rng& rng) const;

  /// Closed-form log-Laplace transform, when known. +inf outside its domain.
  bool has_analytic_log_mgf() const;
  double analytic_log_mgf(const Vector& u) const;
  /// Empty when only the value is closed form.
  std::optional<Vector> analytic_log_mgf_gradient(const Vector& u) const;

  /// Exact mass of {z : <z, xi> >= threshold} for unit xi, when known.
  std::optional<double> exact_tail(const Vector& xi, double threshold) const;

  std::optional<double> analytic_sup_density() const;
  std::optional<Vector> analytic_mean() const;
  std::optional<Matrix> analytic_covariance() const;
  const CoordinateLaw* coordinate_law() const;

 private:
  explicit Measure(std::shared_ptr<const detail::Law> law) : law_(std::move(law)) {}
  void require_density(const char* what) const;

  std::shared_ptr<const detail::Law> law_;
};

struct MeasureStats {
  Vector mean;
  Matrix covariance;
  double sup_density = 0.0;
  double isotropic_constant = 0.0;
  /// True when sup_density came from a search rather than a formula.
  bool sup_is_lower_bound = false;
};

/// Exact for catalog kinds; custom kinds require samples.
MeasureStats stats(const Measure& m, const PointSet* samples = nullptr);

struct AffineMap {
  Matrix a;
  Vector b;
  Vector apply(const Vector& x) const { return a * x + b; }
  PointSet apply(const PointSet& points) const;
};

/// Map taking the empirical law of `samples` to mean 0 and identity
/// covariance (1/N normalization). Uses the symmetric inverse square root
/// so that isotropic input maps to approximately the identity.
AffineMap isotropize(const PointSet& samples);

Vector empirical_mean(const PointSet& samples);
Matrix empirical_covariance(const PointSet& samples);

struct FradeliziReport {
  double sup_ratio = 0.0;         // ||f||_inf / f(0)
  double sup_bound = 0.0;         // e^n
  bool sup_from_formula = false;
  double section_ratio = 0.0;     // worst max-section / central-section
  bool sections_checked = false;
  std::size_t directions = 0;
  bool passed = false;
};

struct FradeliziOptions {
  std::size_t samples = 100000;
  std::size_t directions = 100;
  std::size_t bins = 41;
};

FradeliziReport fradelizi_checks(const Measure& m, RngStream rng,
                                 const FradeliziOptions& options = {});

/// Midpoint log-concavity test on random segments between sampled points.
/// Returns the number of violations beyond `tol`.
std::size_t log_concavity_violations(const Measure& m, RngStream rng,
                                     std::size_t segments, double tol = 1e-9);

}  // namespace depthlab
