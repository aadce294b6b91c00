#pragma once

namespace depthlab::detail {

/// E Phi(-R) with R ~ chi_n: the expected half-space depth of the standard
/// Gaussian, by one-dimensional quadrature of the chi density.
double gaussian_expected_depth(int n);

}  // namespace depthlab::detail
