#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "depthlab/core.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

using DirectionNet = std::vector<Vector>;

/// {+1, -1} for n = 1, equally spaced angles for n = 2, a Fibonacci net for
/// n = 3 and uniform random directions otherwise. Sizes below 2 are raised to 2.
DirectionNet direction_net(int n, std::size_t size, RngStream rng);
DirectionNet fibonacci_sphere(std::size_t size);
DirectionNet random_directions(int n, std::size_t size, RngStream rng);

/// Support function sampled on a fixed net, reusable for many gauge queries.
struct SupportTable {
  DirectionNet directions;
  std::vector<double> values;

  static SupportTable build(const DirectionNet& net, const std::function<double(const Vector&)>& h);

  /// sup over the net of <x, y> / h(y): the Minkowski gauge of x with respect
  /// to the body, from below (exact in the limit of a dense net).
  double gauge(const Vector& x) const;
  /// Radial function of the circumscribed polytope {x : <x, y> <= h(y)}.
  double radial(const Vector& xi) const;
};

/// Gauge of x from a support function, with sphere-walk refinement of the
/// best net direction.
double gauge_from_support(const std::function<double(const Vector&)>& h, const Vector& x,
                          const DirectionNet& net, int refine_iters = 60);

}  // namespace depthlab
