#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "herglotz/field.hpp"
#include "herglotz/specfun.hpp"
#include "support.hpp"

using namespace herglotz;
using herglotz::testing::random_fourier;
using herglotz::testing::random_in;

namespace {

const double kSqrt2Pi = std::sqrt(2 * std::numbers::pi);

double J(double nu, double r) { return bessel_j(BesselOrder::from_value(nu), r); }

HerglotzField single(int k, Complex value, int M) {
  HerglotzField u(BasisSpec::fourier2d(), M);
  u.set_fourier(k, value);
  return u;
}

Point unit3(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p / p.norm();
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("eval_field examples") {
  const HerglotzField zero(BasisSpec::fourier2d(), 3);
  CHECK(eval_field(zero, 0.7, circle_point(1.0)) == Complex(0.0));

  const HerglotzField mean = single(0, 1.0, 2);
  for (double t : {0.0, 1.1, 4.0}) {
    CHECK(std::abs(eval_field(mean, 0.6, circle_point(t)) - kSqrt2Pi * J(0, 0.6)) < 1e-14);
  }

  HerglotzField u3(BasisSpec::zonal(3, 2), 2);
  u3.set(0, 1, 1.0);
  // sqrt(2 pi) / (sqrt(2) Gamma(3/2)) = 2
  CHECK(std::abs(eval_field(u3, 0.0, unit3(0.1, 0.2, 0.3)) - 2.0) < 1e-14);
}

TEST_CASE("eval_field is continuous at the origin") {
  std::mt19937_64 rng(11);
  const BasisSpec basis = BasisSpec::palpha(3, 3);
  const HerglotzField u = random_in(rng, basis, 3);
  const Point theta = unit3(0.3, -0.2, 0.9);
  const Complex at0 = eval_field(u, 0.0, theta);
  double previous = std::abs(eval_field(u, 1e-2, theta) - at0);
  for (double eps : {1e-4, 1e-6}) {
    const double gap = std::abs(eval_field(u, eps, theta) - at0);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("magnitude_sq examples") {
  const HerglotzField zero(BasisSpec::fourier2d(), 2);
  CHECK(magnitude_sq(zero, 0.5, circle_point(0.3)) == 0.0);
  const HerglotzField one = single(1, 1.0, 1);
  CHECK(magnitude_sq(one, 0.8, circle_point(2.0)) ==
        doctest::Approx(2 * std::numbers::pi * J(1, 0.8) * J(1, 0.8)).epsilon(1e-13));
  std::mt19937_64 rng(3);
  const HerglotzField u = random_fourier(rng, 4);
  const HerglotzField iu = Complex(0, 1) * u;
  CHECK(magnitude_sq(u, 0.9, circle_point(0.4)) == doctest::Approx(magnitude_sq(iu, 0.9, circle_point(0.4))));
}

TEST_CASE("direct and expansion magnitudes agree") {
  std::mt19937_64 rng(5);
  for (int M = 1; M <= 8; ++M) {
    const HerglotzField u = random_fourier(rng, M);
    for (double r : {0.05, 0.3, 0.77, 1.0}) {
      for (double t = 0.0; t < 6.28; t += 0.9) {
        const double direct = magnitude_sq(u, r, circle_point(t));
        CHECK(std::abs(magnitude_sq_expansion(u, r, circle_point(t)) - direct) <= 1e-10 * std::max(1.0, direct));
        CHECK(std::abs(synthesize_magnitude(magnitude_coeffs(u), r, t) - direct) <= 1e-9 * std::max(1.0, direct));
      }
    }
  }
  for (const BasisSpec& basis : {BasisSpec::zonal(3, 3), BasisSpec::palpha(4, 2)}) {
    const HerglotzField u = random_in(rng, basis, basis.max_degree());
    Point theta = Point::Constant(basis.dim(), 1.0);
    theta(0) = -0.4;
    theta /= theta.norm();
    const double direct = magnitude_sq(u, 0.65, theta);
    CHECK(magnitude_sq_expansion(u, 0.65, theta) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("magnitude_coeffs examples") {
  const MagnitudeData d = magnitude_coeffs(single(1, 1.0, 1));
  const TrigPoly& c11 = d.pair(1, 1).trig;
  for (double t : {0.0, 1.0, 2.5}) CHECK(eval_trig(c11, t) == doctest::Approx(1.0));
  CHECK(magnitude_coeffs(HerglotzField(BasisSpec::fourier2d(), 3)).max_abs() == 0.0);

  std::mt19937_64 rng(8);
  const BasisSpec basis = BasisSpec::zonal(3, 3);
  const HerglotzField u = random_in(rng, basis, 3);
  const MagnitudeData d3 = magnitude_coeffs(u);
  for (int m = 0; m <= 3; ++m) {
    for (double s : d3.pair(m, m).samples) CHECK(s >= -1e-12);
  }
  CHECK(d3.grid_resolution == magnitude_grid_resolution(3));
}

TEST_CASE("equal_magnitude examples") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const HerglotzField u = random_fourier(rng, 1 + trial % 6);
    const Complex c = std::polar(1.0, 0.37 * trial);
    CHECK(equal_magnitude(u, c * u));
    CHECK(equal_magnitude(u, conjugate_field(u)));
  }
  const HerglotzField u = random_fourier(rng, 4);
  HerglotzField v = u;
  v.set_fourier(2, v.fourier(2) + 1e-3);
  const EqualMagnitudeReport report = equal_magnitude_report(u, v);
  CHECK_FALSE(report.equal);
  CHECK(report.consistent());

  const HerglotzField w = random_in(rng, BasisSpec::palpha(3, 2, true), 2);
  CHECK(equal_magnitude(w, conjugate_field(w)));
}

TEST_CASE("conjugate_field") {
  const HerglotzField u = HerglotzField::from_fourier(std::vector<Complex>{{1, 2}, {3, 4}, {5, 6}});
  const HerglotzField v = conjugate_field(u);
  CHECK(v.fourier(1) == Complex(1, -2));
  CHECK(v.fourier(-1) == Complex(5, -6));
  CHECK(v.fourier(0) == Complex(3, -4));
}

TEST_CASE("trivially_equivalent examples") {
  std::mt19937_64 rng(4);
  const HerglotzField u = random_fourier(rng, 3);
  const TrivialEquivalence a = trivially_equivalent(u, Complex(0, 1) * u);
  CHECK(a.verdict == Verdict::Identity);
  CHECK(std::abs(*a.c - Complex(0, 1)) < 1e-12);
  const TrivialEquivalence b = trivially_equivalent(u, conjugate_field(u));
  CHECK(b.verdict == Verdict::Conjugate);
  CHECK(std::abs(*b.c - 1.0) < 1e-12);
  int inequivalent = 0;
  for (int t = 0; t < 20; ++t) {
    inequivalent += trivially_equivalent(random_fourier(rng, 3), random_fourier(rng, 3)).verdict == Verdict::Inequivalent;
  }
  CHECK(inequivalent == 20);
  const HerglotzField zero(BasisSpec::fourier2d(), 2);
  const TrivialEquivalence z = trivially_equivalent(zero, zero);
  CHECK(z.verdict == Verdict::Both);
  CHECK(*z.c == Complex(1.0));
  // real fields are their own conjugate
  const HerglotzField r = HerglotzField::from_fourier(std::vector<Complex>{{1, -1}, {2, 0}, {1, 1}});
  CHECK(trivially_equivalent(r, Complex(0, 1) * r).verdict == Verdict::Both);
}

TEST_CASE("degree_power") {
  const HerglotzField zero(BasisSpec::fourier2d(), 3);
  for (int m = 0; m <= 3; ++m) CHECK(degree_power(zero, m) == 0.0);
  CHECK(degree_power(single(1, Complex(0, 3), 1), 1) == doctest::Approx(9.0));

  // the Gram route and the orthonormalized coordinates agree
  std::mt19937_64 rng(2);
  const BasisSpec raw = BasisSpec::zonal(3, 2);
  const HerglotzField u = random_in(rng, raw, 2);
  const SphereGrid grid = sphere_grid(3, 8);
  for (int m = 0; m <= 2; ++m) {
    double l2 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) l2 += grid.weights[k] * std::norm(angular_part(u, m, grid.nodes[k]));
    CHECK(degree_power(u, m) == doctest::Approx(l2 / sphere_area(3)).epsilon(1e-12));
  }
}

TEST_CASE("equal magnitudes give equal degree powers") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const HerglotzField u = random_fourier(rng, 5);
    for (const HerglotzField& v : {std::polar(1.0, 0.3 * t) * u, conjugate_field(u)}) {
      REQUIRE(equal_magnitude(u, v));
      for (int m = 0; m <= 5; ++m) CHECK(std::abs(degree_power(u, m) - degree_power(v, m)) <= 1e-9);
    }
  }
}

TEST_CASE("mean_coefficient") {
  HerglotzField u(BasisSpec::zonal(3, 3), 3);
  u.set(0, 1, 1.0);
  CHECK(std::abs(mean_coefficient(u) - 1.0) < 1e-9);
  std::mt19937_64 rng(6);
  HerglotzField w = random_in(rng, BasisSpec::zonal(3, 3), 3);
  w.set(0, 1, 0.0);
  CHECK(std::abs(mean_coefficient(w)) < 1e-9);
  const HerglotzField s = u + w;
  CHECK(std::abs(mean_coefficient(s) - mean_coefficient(u) - mean_coefficient(w)) < 1e-12);

  const HerglotzField f = random_fourier(rng, 4);
  CHECK(std::abs(mean_coefficient(f) - f.fourier(0)) < 1e-9);
  CHECK(std::abs(mean_coefficient(f, 0.5) - f.fourier(0)) < 1e-9);
  // first zero of J_0
  CHECK_THROWS_AS(mean_coefficient(f, 2.404825557695773), DomainError);
}

}  // TEST_SUITE
