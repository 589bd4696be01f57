#pragma once

#include <vector>

namespace herglotz {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// n-point Gauss rule on [-1, 1] for the weight (1 - t^2)^exponent,
/// exponent > -1 (Golub–Welsch on the symmetric Jacobi recurrence).
QuadratureRule gauss_gegenbauer(int n, double exponent);

/// Composite Gauss–Legendre on [a, b] with `total_points` nodes split into
/// panels of `panel_order` points (a single panel when total < panel_order).
QuadratureRule composite_gauss_legendre(int total_points, double a, double b, int panel_order = 16);

}  // namespace herglotz
