#include "herglotz/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "herglotz/quadrature.hpp"

namespace herglotz {

namespace {

using Real = long double;

constexpr Real kSqrtPi = 1.772453850905516027298167483341145183L;

bool is_half_integer_multiple(double x) {
  const double twice = 2.0 * x;
  return std::isfinite(twice) && twice == std::nearbyint(twice) && std::abs(twice) < 1e6;
}

/// Gamma at an argument of the form twice/2 with twice > 0.
Real gamma_half_integer(int twice) {
  if (twice % 2 == 0) {
    Real value = 1.0L;
    for (int i = 2; i < twice / 2; ++i) value *= i;
    return value;
  }
  // Gamma(n + 1/2) = sqrt(pi) prod_{i=1}^{n} (i - 1/2)
  const int n = (twice - 1) / 2;
  Real value = kSqrtPi;
  for (int i = 1; i <= n; ++i) value *= (i - 0.5L);
  return value;
}

double gamma_lanczos(double x) {
  static constexpr std::array<double, 9> kCoeffs = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_lanczos(1.0 - x));
  }
  x -= 1.0;
  double acc = kCoeffs[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) acc += kCoeffs[i] / (x + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

Real gamma_long(double x) {
  if (x > 0.0 && is_half_integer_multiple(x)) return gamma_half_integer(static_cast<int>(std::lround(2.0 * x)));
  return gamma_lanczos(x);
}

struct SeriesResult {
  Real value;
  int terms;
  bool converged;
};

/// Sums first + first*ratio(0) + ... where ratio(k) = t_{k+1}/t_k, stopping once
/// the terms decrease and the next term is below rel_tol times the partial sum.
template <class Ratio>
SeriesResult sum_series(Real first, Ratio ratio, const SeriesBudget& budget) {
  Real sum = first;
  Real term = first;
  for (int k = 0; k + 1 < budget.max_terms; ++k) {
    const Real next = term * ratio(k);
    sum += next;
    const bool decreasing = std::abs(next) < std::abs(term);
    term = next;
    if (decreasing && std::abs(next) <= static_cast<Real>(budget.rel_tol) * std::abs(sum)) {
      return {sum, k + 2, true};
    }
    if (next == 0.0L) return {sum, k + 2, true};
  }
  return {sum, budget.max_terms, false};
}

}  // namespace

BesselOrder BesselOrder::from_value(double nu) {
  if (!is_half_integer_multiple(nu)) {
    throw DomainError("BesselOrder: order " + std::to_string(nu) + " is not an integer or half-integer");
  }
  return from_twice(static_cast<int>(std::lround(2.0 * nu)));
}

BesselOrder BesselOrder::from_twice(int twice_nu) {
  if (twice_nu < 0 && twice_nu % 2 != 0) {
    throw DomainError("BesselOrder: negative half-integer orders are not supported");
  }
  return BesselOrder(twice_nu);
}

BesselOrder BesselOrder::for_degree(int m, int d) {
  if (m < 0 || d < 2) throw DomainError("BesselOrder::for_degree: need m >= 0 and d >= 2");
  return BesselOrder(2 * m + d - 2);
}

void SeriesBudget::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("SeriesBudget: rel_tol must be positive");
  if (max_terms < 1) throw DomainError("SeriesBudget: max_terms must be at least 1");
}

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::nearbyint(x)) throw DomainError("gamma_fn: pole at nonpositive integer");
  return static_cast<double>(gamma_long(x));
}

double bessel_j(BesselOrder nu, double r, const SeriesBudget& budget) {
  budget.validate();
  if (!(r >= 0.0)) throw DomainError("bessel_j: r must be nonnegative");
  if (nu.is_negative()) {
    const int n = -nu.twice() / 2;
    const double value = bessel_j(BesselOrder::from_twice(2 * n), r, budget);
    return (n % 2 == 0) ? value : -value;
  }
  if (r == 0.0) return nu.twice() == 0 ? 1.0 : 0.0;

  const Real order = static_cast<Real>(nu.value());
  const Real half_r = static_cast<Real>(r) / 2.0L;
  const Real first = std::pow(half_r, order) / gamma_half_integer(nu.twice() + 2);
  const Real q = -half_r * half_r;
  const SeriesResult res = sum_series(first, [&](int k) { return q / ((k + 1.0L) * (order + k + 1.0L)); }, budget);
  if (!res.converged) {
    throw ConvergenceError("bessel_j: series budget exhausted at nu=" + std::to_string(nu.value()) +
                               ", r=" + std::to_string(r),
                           static_cast<double>(res.value), res.terms);
  }
  return static_cast<double>(res.value);
}

double bessel_bound(BesselOrder nu, double r) {
  if (!(r >= 0.0)) throw DomainError("bessel_bound: r must be nonnegative");
  if (nu.twice() == 0) return 1.0;
  const double order = std::abs(nu.value());
  return 2.0 / (std::sqrt(std::numbers::pi) * gamma_fn(order + 0.5)) * std::pow(r / 2.0, order);
}

namespace {

Real product_first_coefficient(Real mu, Real nu) {
  return std::pow(0.5L, mu + nu) / (gamma_long(static_cast<double>(mu) + 1.0) * gamma_long(static_cast<double>(nu) + 1.0));
}

Real product_ratio(Real mu, Real nu, int k) {
  const Real s = mu + nu;
  return -0.25L * (s + 2.0L * k + 2.0L) * (s + 2.0L * k + 1.0L) /
         ((k + 1.0L) * (mu + k + 1.0L) * (nu + k + 1.0L) * (s + k + 1.0L));
}

void check_product_args(int n, int m, double alpha) {
  if (n < 0 || m < 0) throw DomainError("bessel product: degrees must be nonnegative");
  if (!(alpha >= 0.0)) throw DomainError("bessel product: alpha must be nonnegative");
}

}  // namespace

std::vector<double> bessel_product_coefficients(int n, int m, double alpha, int count) {
  check_product_args(n, m, alpha);
  std::vector<double> coeffs;
  coeffs.reserve(count > 0 ? count : 0);
  const Real mu = n + static_cast<Real>(alpha);
  const Real nu = m + static_cast<Real>(alpha);
  Real c = product_first_coefficient(mu, nu);
  for (int k = 0; k < count; ++k) {
    coeffs.push_back(static_cast<double>(c));
    c *= product_ratio(mu, nu, k);
  }
  return coeffs;
}

double bessel_product_series(int n, int m, double alpha, double r, const SeriesBudget& budget) {
  check_product_args(n, m, alpha);
  budget.validate();
  if (!(r >= 0.0)) throw DomainError("bessel_product_series: r must be nonnegative");
  const Real mu = n + static_cast<Real>(alpha);
  const Real nu = m + static_cast<Real>(alpha);
  if (r == 0.0) return (mu + nu == 0.0L) ? 1.0 : 0.0;

  const Real rr = static_cast<Real>(r);
  const Real first = product_first_coefficient(mu, nu) * std::pow(rr, mu + nu);
  const Real r2 = rr * rr;
  const SeriesResult res = sum_series(first, [&](int k) { return product_ratio(mu, nu, k) * r2; }, budget);
  if (!res.converged) {
    throw ConvergenceError("bessel_product_series: series budget exhausted", static_cast<double>(res.value),
                           res.terms);
  }
  return static_cast<double>(res.value);
}

double bessel_product_integral(int n, int m, double alpha, double r, int quad_points) {
  check_product_args(n, m, alpha);
  if (!is_half_integer_multiple(alpha)) {
    throw DomainError("bessel_product_integral: alpha must be a multiple of 1/2");
  }
  const BesselOrder order = BesselOrder::from_twice(2 * (n + m) + static_cast<int>(std::lround(4.0 * alpha)));
  const QuadratureRule rule = composite_gauss_legendre(quad_points, 0.0, std::numbers::pi / 2.0);
  Real acc = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    acc += static_cast<Real>(rule.weights[i]) * bessel_j(order, 2.0 * r * std::cos(t)) * std::cos((n - m) * t);
  }
  return static_cast<double>(2.0L / std::numbers::pi_v<Real> * acc);
}

}  // namespace herglotz
