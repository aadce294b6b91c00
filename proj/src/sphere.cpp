#include "depthlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace depthlab {

DirectionNet fibonacci_sphere(std::size_t size) {
  DirectionNet net;
  net.reserve(size);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < size; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(size);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    Vector v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    net.push_back(v);
  }
  return net;
}

DirectionNet random_directions(int n, std::size_t size, RngStream rng) {
  Rng gen(rng);
  DirectionNet net;
  net.reserve(size);
  for (std::size_t i = 0; i < size; ++i) net.push_back(gen.unit_vector(n));
  return net;
}

DirectionNet direction_net(int n, std::size_t size, RngStream rng) {
  size = std::max<std::size_t>(size, 2);
  if (n == 1) return {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  if (n == 2) {
    DirectionNet net;
    net.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(size);
      Vector v(2);
      v << std::cos(a), std::sin(a);
      net.push_back(v);
    }
    return net;
  }
  if (n == 3) return fibonacci_sphere(size);
  return random_directions(n, size, rng);
}

SupportTable SupportTable::build(const DirectionNet& net,
                                 const std::function<double(const Vector&)>& h) {
  SupportTable table;
  table.directions = net;
  table.values.reserve(net.size());
  for (const auto& y : net) table.values.push_back(h(y));
  return table;
}

double SupportTable::gauge(const Vector& x) const {
  double best = 0.0;
  for (std::size_t j = 0; j < directions.size(); ++j) {
    best = std::max(best, x.dot(directions[j]) / values[j]);
  }
  return best;
}

double SupportTable::radial(const Vector& xi) const {
  double best = kInf;
  for (std::size_t j = 0; j < directions.size(); ++j) {
    const double c = xi.dot(directions[j]);
    if (c > 0.0) best = std::min(best, values[j] / c);
  }
  return best;
}

double gauge_from_support(const std::function<double(const Vector&)>& h, const Vector& x,
                          const DirectionNet& net, int refine_iters) {
  const auto ratio = [&](const Vector& y) {
    const double hy = h(y);
    return hy > 0.0 ? x.dot(y) / hy : (x.dot(y) > 0.0 ? kInf : 0.0);
  };
  Vector best_y = net.front();
  double best = -kInf;
  for (const auto& y : net) {
    const double r = ratio(y);
    if (r > best) {
      best = r;
      best_y = y;
    }
  }
  if (x.size() == 1) return std::max(best, 0.0);
  // Deterministic walk: perturb along coordinate pairs with shrinking steps.
  double step = 0.2;
  const auto n = x.size();
  for (int it = 0; it < refine_iters && step > 1e-6; ++it) {
    bool improved = false;
    for (Eigen::Index i = 0; i < n && !improved; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Vector y = best_y;
        y[i] += sgn * step;
        y.normalize();
        const double r = ratio(y);
        if (r > best) {
          best = r;
          best_y = y;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return std::max(best, 0.0);
}

}  // namespace depthlab
