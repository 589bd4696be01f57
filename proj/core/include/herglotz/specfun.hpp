#pragma once

#include <vector>

#include "herglotz/errors.hpp"

namespace herglotz {

/// Bessel order restricted to the family m + (d - 2)/2: integers and
/// nonnegative half-integers. Stored as twice the order so comparisons and
/// parity checks are exact.
class BesselOrder {
 public:
  /// Rejects anything that is not an integer or a nonnegative half-integer.
  static BesselOrder from_value(double nu);
  static BesselOrder from_twice(int twice_nu);
  /// nu(m) = m + (d - 2)/2.
  static BesselOrder for_degree(int m, int d);

  double value() const noexcept { return 0.5 * twice_; }
  int twice() const noexcept { return twice_; }
  bool is_integer() const noexcept { return twice_ % 2 == 0; }
  bool is_negative() const noexcept { return twice_ < 0; }

  friend bool operator==(BesselOrder, BesselOrder) = default;

 private:
  explicit BesselOrder(int twice) : twice_(twice) {}
  int twice_;
};

struct SeriesBudget {
  double rel_tol = 1e-14;
  int max_terms = 256;

  /// Throws DomainError unless rel_tol > 0 and max_terms >= 1.
  void validate() const;
};

/// Gamma function. Integer and half-integer arguments use exact products
/// (factorial, double factorial times sqrt(pi)); other reals use a Lanczos
/// approximation, relative accuracy better than 1e-13 on (0, 40].
double gamma_fn(double x);

/// J_nu(r) from its power series, r >= 0. Negative integer orders use
/// J_{-n} = (-1)^n J_n on the same series.
double bessel_j(BesselOrder nu, double r, const SeriesBudget& budget = {});

/// Pointwise bound: 1 for nu = 0, otherwise
/// 2 / (sqrt(pi) Gamma(nu + 1/2)) (r/2)^nu  (valid for nu > -1/2).
double bessel_bound(BesselOrder nu, double r);

/// Gegenbauer polynomial C_m^lambda(z) from its finite sum. Works for any
/// field-like scalar (double, exact rationals).
template <class T>
T gegenbauer(int m, const T& lambda, const T& z) {
  if (m < 0) throw DomainError("gegenbauer: negative degree");
  // sum_k (-1)^k (lambda)_{m-k} / (k! (m-2k)!) (2z)^{m-2k}
  T total = T(0);
  const T two_z = T(2) * z;
  for (int k = 0; 2 * k <= m; ++k) {
    T term = T(1);
    for (int i = 0; i < m - k; ++i) term *= (lambda + T(i));
    for (int i = 2; i <= k; ++i) term /= T(i);
    for (int i = 2; i <= m - 2 * k; ++i) term /= T(i);
    for (int i = 0; i < m - 2 * k; ++i) term *= two_z;
    if (k % 2 == 1) term = -term;
    total += term;
  }
  return total;
}

/// Coefficients c_k with J_{n+alpha}(r) J_{m+alpha}(r) = r^{n+m+2 alpha} sum_k c_k r^{2k}
/// (product series, k = 0 .. count-1).
std::vector<double> bessel_product_coefficients(int n, int m, double alpha, int count);

/// J_{n+alpha}(r) J_{m+alpha}(r) from the product series.
double bessel_product_series(int n, int m, double alpha, double r, const SeriesBudget& budget = {});

/// (2/pi) int_0^{pi/2} J_{n+m+2 alpha}(2 r cos t) cos((n-m) t) dt by composite
/// Gauss–Legendre; an independent route to J_{n+alpha} J_{m+alpha}.
/// alpha must be a nonnegative multiple of 1/2.
double bessel_product_integral(int n, int m, double alpha, double r, int quad_points = 512);

}  // namespace herglotz
