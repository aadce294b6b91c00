#pragma once

#include <cstddef>

#include "depthlab/core.hpp"

namespace depthlab {

struct HullLpResult {
  bool inside = false;
  double infeasibility = 0.0;  // phase-1 optimum: sum of artificials
  int pivots = 0;
  bool bland = false;          // anti-cycling rule was needed
  Vector weights;              // convex weights when inside
  Vector normal;               // separating functional when outside:
  double offset = 0.0;         //   <normal, v> + offset <= 0 < <normal, x> + offset
};

/// Phase-1 simplex for x = sum_i w_i v_i, w >= 0, sum w = 1, with v_i the
/// columns of `vertices`. Dantzig pricing, switching to Bland's rule after a
/// run of degenerate pivots. The answer is verified against the returned
/// weights or separating functional; inconsistency throws kNumericalFailure.
HullLpResult hull_feasibility(const PointSet& vertices, const Vector& x, double tol = 1e-9);

}  // namespace depthlab
