#include "depthlab/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "depthlab/numeric.hpp"

namespace depthlab {

namespace detail {

struct Law {
  MeasureKind kind = MeasureKind::kCustomDensity;
  int n = 1;
  std::string name;
  MeasureTraits traits;
  LogDensityFn log_density;
  SamplerFn sampler;
  std::function<double(const Vector&)> log_mgf;
  std::function<Vector(const Vector&)> log_mgf_gradient;
  std::function<double(const Vector&, double)> tail;
  std::optional<double> sup_density;
  std::optional<Vector> mean;
  std::optional<Matrix> covariance;
  std::optional<CoordinateLaw> coordinate;
};

}  // namespace detail

namespace {

using detail::Law;

constexpr std::array<std::pair<MeasureKind, std::string_view>, 8> kKindNames{{
    {MeasureKind::kGaussianStandard, "gaussian-standard"},
    {MeasureKind::kUniformCube, "uniform-cube"},
    {MeasureKind::kUniformCubeUnitVolume, "uniform-cube-unit-volume"},
    {MeasureKind::kDiscreteCube, "discrete-cube"},
    {MeasureKind::kUniformBall, "uniform-ball"},
    {MeasureKind::kUniformSimplex, "uniform-simplex"},
    {MeasureKind::kProductExponentialCentered, "product-exponential-centered"},
    {MeasureKind::kCustomDensity, "custom-density"},
}};

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Tail of a one-dimensional law along xi = +-1.
std::function<double(const Vector&, double)> tail_from_coordinate(const CoordinateLaw& law) {
  return [law](const Vector& xi, double s) {
    const double dir = xi[0];
    if (dir > 0) return law.sf(s / dir);
    return law.cdf(s / dir);
  };
}

CoordinateLaw uniform_coordinate(double lo, double hi) {
  CoordinateLaw law;
  law.support_lo = lo;
  law.support_hi = hi;
  const double h = 1.0 / (hi - lo);
  law.density = [lo, hi, h](double x) { return (x >= lo && x <= hi) ? h : 0.0; };
  law.cdf = [lo, hi, h](double y) { return clamp01((y - lo) * h); };
  law.sf = [lo, hi, h](double y) { return clamp01((hi - y) * h); };
  return law;
}

std::shared_ptr<Law> gaussian_law(int n) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = false, .centered = true, .even = true,
                 .spherically_symmetric = true, .uniform_on_body = false, .product = true};
  const double log_norm = -0.5 * n * std::log(2.0 * std::numbers::pi);
  law->log_density = [log_norm](const Vector& x) { return log_norm - 0.5 * x.squaredNorm(); };
  law->sampler = [n](Rng& rng) { return rng.normal_vector(n); };
  law->log_mgf = [](const Vector& u) { return 0.5 * u.squaredNorm(); };
  law->log_mgf_gradient = [](const Vector& u) { return u; };
  law->tail = [](const Vector&, double s) { return numeric::normal_sf(s); };
  law->sup_density = std::exp(log_norm);
  law->mean = Vector::Zero(n);
  law->covariance = Matrix::Identity(n, n);
  CoordinateLaw c;
  c.density = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  c.cdf = numeric::normal_cdf;
  c.sf = numeric::normal_sf;
  law->coordinate = c;
  return law;
}

std::shared_ptr<Law> cube_law(int n, double half_side) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = false, .centered = true, .even = true,
                 .spherically_symmetric = false, .uniform_on_body = true, .product = true};
  const double log_f = -n * std::log(2.0 * half_side);
  law->log_density = [log_f, half_side](const Vector& x) {
    return x.cwiseAbs().maxCoeff() <= half_side ? log_f : -kInf;
  };
  law->sampler = [n, half_side](Rng& rng) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-half_side, half_side);
    return x;
  };
  law->log_mgf = [half_side](const Vector& u) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) s += numeric::log_sinhc(half_side * u[i]);
    return s;
  };
  law->log_mgf_gradient = [half_side](const Vector& u) {
    Vector g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) g[i] = half_side * numeric::langevin(half_side * u[i]);
    return g;
  };
  law->coordinate = uniform_coordinate(-half_side, half_side);
  if (n == 1) law->tail = tail_from_coordinate(*law->coordinate);
  law->sup_density = std::exp(log_f);
  law->mean = Vector::Zero(n);
  law->covariance = Matrix::Identity(n, n) * (half_side * half_side / 3.0);
  return law;
}

std::shared_ptr<Law> discrete_cube_law(int n) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = true, .centered = true, .even = true,
                 .spherically_symmetric = false, .uniform_on_body = false, .product = true};
  law->sampler = [n](Rng& rng) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.sign();
    return x;
  };
  law->log_mgf = [](const Vector& u) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double a = std::fabs(u[i]);
      s += a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
    }
    return s;
  };
  law->log_mgf_gradient = [](const Vector& u) { return Vector(u.array().tanh()); };
  CoordinateLaw c;
  c.support_lo = -1.0;
  c.support_hi = 1.0;
  c.cdf = [](double y) { return y < -1.0 ? 0.0 : (y < 1.0 ? 0.5 : 1.0); };
  c.sf = [](double y) { return y > 1.0 ? 0.0 : (y > -1.0 ? 0.5 : 1.0); };
  law->coordinate = c;
  if (n == 1) law->tail = tail_from_coordinate(c);
  law->mean = Vector::Zero(n);
  law->covariance = Matrix::Identity(n, n);
  return law;
}

// log I_nu(r) and d/dr log I_nu(r); asymptotic series for large r.
std::pair<double, double> log_bessel_i(double nu, double r) {
  if (r < 400.0) {
    const double i0 = std::cyl_bessel_i(nu, r);
    const double i1 = std::cyl_bessel_i(nu + 1.0, r);
    return {std::log(i0), i1 / i0 + nu / r};
  }
  const double mu = 4.0 * nu * nu;
  double term = 1.0, s = 1.0, ds = 0.0;
  for (int k = 1; k <= 10; ++k) {
    term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * r);
    s += term;
    ds += -k * term / r;
  }
  return {r - 0.5 * std::log(2.0 * std::numbers::pi * r) + std::log(s),
          1.0 - 0.5 / r + ds / s};
}

std::shared_ptr<Law> ball_law(int n) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = false, .centered = true, .even = true,
                 .spherically_symmetric = true, .uniform_on_body = true, .product = n == 1};
  const double log_f = -std::log(numeric::ball_volume(n));
  law->log_density = [log_f](const Vector& x) { return x.squaredNorm() <= 1.0 ? log_f : -kInf; };
  law->sampler = [n](Rng& rng) {
    const Vector dir = rng.unit_vector(n);
    return Vector(dir * std::pow(rng.uniform(), 1.0 / n));
  };
  const double nu = 0.5 * n;
  const double log_gamma = std::lgamma(nu + 1.0);
  law->log_mgf = [nu, log_gamma, n](const Vector& u) {
    const double r = u.norm();
    if (r < 1e-3) {
      const double r2 = r * r;
      return r2 / (2.0 * (n + 2)) - r2 * r2 / (4.0 * (n + 2) * (n + 2) * (n + 4));
    }
    return log_gamma + nu * std::log(2.0 / r) + log_bessel_i(nu, r).first;
  };
  law->log_mgf_gradient = [nu, n](const Vector& u) {
    const double r = u.norm();
    if (r < 1e-3) return Vector(u * (1.0 / (n + 2) - r * r / ((n + 2.0) * (n + 2) * (n + 4))));
    const double dr = log_bessel_i(nu, r).second - nu / r;
    return Vector(u * (dr / r));
  };
  law->tail = [n](const Vector&, double s) {
    const auto upper = [n](double a) {
      if (a >= 1.0) return 0.0;
      return 0.5 * boost::math::ibeta(0.5 * (n + 1), 0.5, 1.0 - a * a);
    };
    return s >= 0.0 ? upper(s) : 1.0 - upper(-s);
  };
  law->sup_density = std::exp(log_f);
  law->mean = Vector::Zero(n);
  law->covariance = Matrix::Identity(n, n) / (n + 2.0);
  if (n == 1) law->coordinate = uniform_coordinate(-1.0, 1.0);
  return law;
}

std::shared_ptr<Law> simplex_law(int n) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = false, .centered = true, .even = n == 1,
                 .spherically_symmetric = false, .uniform_on_body = true, .product = n == 1};
  const double shift = 1.0 / (n + 1);
  const double log_f = std::lgamma(n + 1.0);
  law->log_density = [log_f, shift](const Vector& x) {
    const Vector y = x.array() + shift;
    if (y.minCoeff() < 0.0 || y.sum() > 1.0) return -kInf;
    return log_f;
  };
  law->sampler = [n, shift](Rng& rng) {
    Vector e(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = rng.exponential();
    const double total = e.sum();
    return Vector(e.tail(n).array() / total - shift);
  };
  // E e^{<u,X>} = n! * exp[a_0, ..., a_n] (divided difference at the vertex
  // values), read off the exponential of a bidiagonal matrix.
  law->log_mgf = [n, shift, log_f](const Vector& u) {
    const double offset = -shift * u.sum();
    Vector a(n + 1);
    a[0] = offset;
    a.tail(n) = u.array() + offset;
    const double top = a.maxCoeff();
    Matrix m = Matrix::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
      m(i, i) = a[i] - top;
      if (i < n) m(i, i + 1) = 1.0;
    }
    const Matrix e = m.exp();
    const double dd = e(0, n);
    if (!(dd > 0.0)) return -kInf;
    return top + log_f + std::log(dd);
  };
  law->sup_density = std::exp(log_f);
  law->mean = Vector::Zero(n);
  const double denom = (n + 1.0) * (n + 1.0) * (n + 2.0);
  Matrix cov = Matrix::Constant(n, n, -1.0 / denom);
  cov.diagonal().setConstant(n / denom);
  law->covariance = cov;
  if (n == 1) {
    law->coordinate = uniform_coordinate(-0.5, 0.5);
    law->tail = tail_from_coordinate(*law->coordinate);
  }
  return law;
}

std::shared_ptr<Law> exponential_law(int n) {
  auto law = std::make_shared<Law>();
  law->traits = {.atomic = false, .centered = true, .even = false,
                 .spherically_symmetric = false, .uniform_on_body = false, .product = true};
  law->log_density = [](const Vector& x) {
    if (x.minCoeff() < -1.0) return -kInf;
    return -(x.array() + 1.0).sum();
  };
  law->sampler = [n](Rng& rng) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.exponential() - 1.0;
    return x;
  };
  law->log_mgf = [](const Vector& u) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u[i] >= 1.0) return kInf;
      s += -u[i] - std::log1p(-u[i]);
    }
    return s;
  };
  law->log_mgf_gradient = [](const Vector& u) {
    Vector g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) g[i] = -1.0 + 1.0 / (1.0 - u[i]);
    return g;
  };
  CoordinateLaw c;
  c.support_lo = -1.0;
  c.mgf_hi = 1.0;
  c.density = [](double x) { return x >= -1.0 ? std::exp(-(x + 1.0)) : 0.0; };
  c.cdf = [](double y) { return y <= -1.0 ? 0.0 : -std::expm1(-(y + 1.0)); };
  c.sf = [](double y) { return y <= -1.0 ? 1.0 : std::exp(-(y + 1.0)); };
  law->coordinate = c;
  if (n == 1) law->tail = tail_from_coordinate(c);
  law->sup_density = 1.0;
  law->mean = Vector::Zero(n);
  law->covariance = Matrix::Identity(n, n);
  return law;
}

}  // namespace

std::string_view kind_name(MeasureKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<MeasureKind> parse_measure_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<MeasureKind>& catalog_kinds() {
  static const std::vector<MeasureKind> kinds{
      MeasureKind::kGaussianStandard,  MeasureKind::kUniformCube,
      MeasureKind::kUniformCubeUnitVolume, MeasureKind::kDiscreteCube,
      MeasureKind::kUniformBall,       MeasureKind::kUniformSimplex,
      MeasureKind::kProductExponentialCentered};
  return kinds;
}

Measure Measure::make(MeasureKind kind, int dimension) {
  if (dimension < 1) throw Error(Errc::kInvalidArgument, "dimension must be positive");
  std::shared_ptr<Law> law;
  switch (kind) {
    case MeasureKind::kGaussianStandard: law = gaussian_law(dimension); break;
    case MeasureKind::kUniformCube: law = cube_law(dimension, 1.0); break;
    case MeasureKind::kUniformCubeUnitVolume: law = cube_law(dimension, 0.5); break;
    case MeasureKind::kDiscreteCube: law = discrete_cube_law(dimension); break;
    case MeasureKind::kUniformBall: law = ball_law(dimension); break;
    case MeasureKind::kUniformSimplex: law = simplex_law(dimension); break;
    case MeasureKind::kProductExponentialCentered: law = exponential_law(dimension); break;
    case MeasureKind::kCustomDensity:
      throw Error(Errc::kInvalidArgument, "custom-density measures are built with Measure::custom");
  }
  law->kind = kind;
  law->n = dimension;
  law->name = std::string(kind_name(kind));
  return Measure(std::move(law));
}

Measure Measure::custom(CustomSpec spec) {
  if (spec.dimension < 1) throw Error(Errc::kInvalidArgument, "dimension must be positive");
  if (!spec.log_density) throw Error(Errc::kInvalidArgument, "custom measure needs a log-density");
  auto law = std::make_shared<Law>();
  law->kind = MeasureKind::kCustomDensity;
  law->n = spec.dimension;
  law->name = spec.name;
  law->traits.centered = spec.centered;
  law->traits.even = spec.even;
  law->log_density = std::move(spec.log_density);
  law->sampler = std::move(spec.sampler);
  return Measure(std::move(law));
}

Measure Measure::affine_image(const Matrix& a, const Vector& b) const {
  const int n = dimension();
  if (a.rows() != n || a.cols() != n || b.size() != n) {
    throw Error(Errc::kDimensionMismatch, "affine_image: shapes do not match the measure");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double det = lu.determinant();
  if (!(std::fabs(det) > 1e-300)) throw Error(Errc::kSingular, "affine_image: singular matrix");
  const Matrix a_inv = lu.inverse();
  const double log_det = std::log(std::fabs(det));
  auto base = law_;
  auto law = std::make_shared<Law>();
  law->kind = MeasureKind::kCustomDensity;
  law->n = n;
  law->name = "affine(" + base->name + ")";
  law->traits = base->traits;
  law->traits.spherically_symmetric = false;
  law->traits.product = false;
  const bool at_origin = b.cwiseAbs().maxCoeff() == 0.0;
  law->traits.centered = base->traits.centered && at_origin;
  law->traits.even = base->traits.even && at_origin;
  if (base->log_density) {
    law->log_density = [base, a_inv, b, log_det](const Vector& y) {
      return base->log_density(a_inv * (y - b)) - log_det;
    };
  }
  if (base->sampler) {
    law->sampler = [base, a, b](Rng& rng) { return Vector(a * base->sampler(rng) + b); };
  }
  if (base->log_mgf) {
    law->log_mgf = [base, a, b](const Vector& u) {
      return u.dot(b) + base->log_mgf(a.transpose() * u);
    };
  }
  if (base->log_mgf_gradient) {
    law->log_mgf_gradient = [base, a, b](const Vector& u) {
      return Vector(b + a * base->log_mgf_gradient(a.transpose() * u));
    };
  }
  if (base->tail) {
    law->tail = [base, a, b](const Vector& xi, double s) {
      const Vector w = a.transpose() * xi;
      const double norm = w.norm();
      const double shifted = s - b.dot(xi);
      if (norm == 0.0) return shifted <= 0.0 ? 1.0 : 0.0;
      return base->tail(w / norm, shifted / norm);
    };
  }
  if (base->sup_density) law->sup_density = *base->sup_density / std::fabs(det);
  if (base->mean) law->mean = Vector(a * *base->mean + b);
  if (base->covariance) law->covariance = Matrix(a * *base->covariance * a.transpose());
  return Measure(std::move(law));
}

int Measure::dimension() const { return law_->n; }
MeasureKind Measure::kind() const { return law_->kind; }
const std::string& Measure::name() const { return law_->name; }
const MeasureTraits& Measure::traits() const { return law_->traits; }

void Measure::require_density(const char* what) const {
  if (law_->traits.atomic || !law_->log_density) {
    throw Error(Errc::kUndefinedForAtomic,
                std::string(what) + ": " + law_->name + " has no density");
  }
}

double Measure::log_density(const Vector& x) const {
  require_density("log_density");
  require_dimension(x, law_->n, "log_density");
  return law_->log_density(x);
}

double Measure::density(const Vector& x) const {
  const double l = log_density(x);
  return l == -kInf ? 0.0 : std::exp(l);
}

bool Measure::has_sampler() const { return static_cast<bool>(law_->sampler); }

Vector Measure::draw(Rng& rng) const {
  if (!law_->sampler) {
    throw Error(Errc::kUnsupported, "sample: " + law_->name + " has no sampler");
  }
  return law_->sampler(rng);
}

PointSet Measure::sample(RngStream stream, std::size_t count) const {
  if (count < 1) throw Error(Errc::kInvalidArgument, "sample: count must be >= 1");
  if (!law_->sampler) {
    throw Error(Errc::kUnsupported, "sample: " + law_->name + " has no sampler");
  }
  Rng rng(stream);
  PointSet points(law_->n, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) points.col(static_cast<Eigen::Index>(j)) = law_->sampler(rng);
  return points;
}

bool Measure::has_analytic_log_mgf() const { return static_cast<bool>(law_->log_mgf); }

double Measure::analytic_log_mgf(const Vector& u) const {
  if (!law_->log_mgf) throw Error(Errc::kUnsupported, "no closed-form log-Laplace transform");
  require_dimension(u, law_->n, "log_mgf");
  return law_->log_mgf(u);
}

std::optional<Vector> Measure::analytic_log_mgf_gradient(const Vector& u) const {
  if (!law_->log_mgf_gradient) return std::nullopt;
  return law_->log_mgf_gradient(u);
}

std::optional<double> Measure::exact_tail(const Vector& xi, double threshold) const {
  if (!law_->tail) return std::nullopt;
  require_dimension(xi, law_->n, "tail");
  return clamp01(law_->tail(xi, threshold));
}

std::optional<double> Measure::analytic_sup_density() const { return law_->sup_density; }
std::optional<Vector> Measure::analytic_mean() const { return law_->mean; }
std::optional<Matrix> Measure::analytic_covariance() const { return law_->covariance; }
const CoordinateLaw* Measure::coordinate_law() const {
  return law_->coordinate ? &*law_->coordinate : nullptr;
}

Vector empirical_mean(const PointSet& samples) { return samples.rowwise().mean(); }

Matrix empirical_covariance(const PointSet& samples) {
  const Vector mean = empirical_mean(samples);
  const Matrix centered = samples.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(samples.cols());
}

namespace {

void require_nonsingular(const Matrix& cov, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1e-300))) {
    throw Error(Errc::kSingular, std::string(what) + ": covariance is singular");
  }
}

// Local ascent on the log-density by compass search; returns the best value.
double ascend_log_density(const Measure& m, Vector x, double log_value) {
  double step = 0.25;
  const int n = m.dimension();
  for (int iter = 0; iter < 2000 && step > 1e-10; ++iter) {
    bool improved = false;
    for (int i = 0; i < n && !improved; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vector y = x;
        y[i] += sgn * step;
        const double v = m.log_density(y);
        if (v > log_value) {
          x = y;
          log_value = v;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return log_value;
}

}  // namespace

MeasureStats stats(const Measure& m, const PointSet* samples) {
  if (m.atomic()) throw Error(Errc::kUndefinedForAtomic, "stats: " + m.name() + " has no density");
  MeasureStats s;
  const int n = m.dimension();
  if (m.analytic_mean() && m.analytic_covariance() && m.analytic_sup_density()) {
    s.mean = *m.analytic_mean();
    s.covariance = *m.analytic_covariance();
    s.sup_density = *m.analytic_sup_density();
  } else {
    if (!samples || samples->cols() <= n) {
      throw Error(Errc::kInvalidArgument, "stats: " + m.name() + " needs more than n samples");
    }
    s.mean = empirical_mean(*samples);
    s.covariance = empirical_covariance(*samples);
    double best = -kInf;
    Eigen::Index best_col = 0;
    for (Eigen::Index j = 0; j < samples->cols(); ++j) {
      const double v = m.log_density(samples->col(j));
      if (v > best) {
        best = v;
        best_col = j;
      }
    }
    best = ascend_log_density(m, samples->col(best_col), best);
    s.sup_density = std::exp(best);
    s.sup_is_lower_bound = true;
  }
  require_nonsingular(s.covariance, "stats");
  const double log_det = Eigen::LDLT<Matrix>(s.covariance).vectorD().array().log().sum();
  s.isotropic_constant = std::pow(s.sup_density, 1.0 / n) * std::exp(log_det / (2.0 * n));
  return s;
}

PointSet AffineMap::apply(const PointSet& points) const {
  return (a * points).colwise() + b;
}

AffineMap isotropize(const PointSet& samples) {
  const auto n = samples.rows();
  if (samples.cols() <= n) {
    throw Error(Errc::kInvalidArgument, "isotropize: need more samples than the dimension");
  }
  const Vector mean = empirical_mean(samples);
  const Matrix cov = empirical_covariance(samples);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1e-300))) {
    throw Error(Errc::kSingular, "isotropize: covariance is singular");
  }
  AffineMap map;
  map.a = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
          eig.eigenvectors().transpose();
  map.b = -map.a * mean;
  return map;
}

FradeliziReport fradelizi_checks(const Measure& m, RngStream rng, const FradeliziOptions& options) {
  const int n = m.dimension();
  FradeliziReport report;
  report.sup_bound = std::exp(static_cast<double>(n));
  const double f0 = m.density(Vector::Zero(n));
  const PointSet points = m.sample(rng.child(0), options.samples);
  double sup = 0.0;
  if (auto formula = m.analytic_sup_density()) {
    sup = *formula;
    report.sup_from_formula = true;
  } else {
    sup = stats(m, &points).sup_density;
  }
  report.sup_ratio = sup / f0;
  bool ok = report.sup_ratio <= report.sup_bound * (1.0 + 1e-12);

  if (m.traits().uniform_on_body && n >= 2) {
    // Section volumes are proportional to the marginal density of <X, xi>,
    // estimated here from a histogram whose central bin straddles 0.
    Rng dir_rng(rng.child(1));
    const std::size_t bins = options.bins | 1;
    double worst = 0.0;
    std::vector<double> proj(options.samples);
    for (std::size_t d = 0; d < options.directions; ++d) {
      const Vector xi = dir_rng.unit_vector(n);
      const Eigen::VectorXd p = points.transpose() * xi;
      const double lo = p.minCoeff(), hi = p.maxCoeff();
      const double reach = std::max(-lo, hi);
      const double width = 2.0 * reach / static_cast<double>(bins);
      std::vector<double> counts(bins, 0.0);
      const auto center = static_cast<long>(bins / 2);
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        const long k = center + std::lround(p[j] / width);
        if (k >= 0 && k < static_cast<long>(bins)) counts[static_cast<std::size_t>(k)] += 1.0;
      }
      const double central = counts[static_cast<std::size_t>(center)];
      const double peak = *std::max_element(counts.begin(), counts.end());
      if (central > 0.0) worst = std::max(worst, peak / central);
    }
    report.section_ratio = worst;
    report.sections_checked = true;
    report.directions = options.directions;
    ok = ok && worst <= std::numbers::e;
  }
  report.passed = ok;
  return report;
}

std::size_t log_concavity_violations(const Measure& m, RngStream rng, std::size_t segments,
                                     double tol) {
  const PointSet points = m.sample(rng, 2 * segments);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < segments; ++k) {
    const Vector a = points.col(static_cast<Eigen::Index>(2 * k));
    const Vector b = points.col(static_cast<Eigen::Index>(2 * k + 1));
    const double lhs = m.log_density(0.5 * (a + b));
    const double rhs = 0.5 * (m.log_density(a) + m.log_density(b));
    if (lhs < rhs - tol) ++violations;
  }
  return violations;
}

}  // namespace depthlab
