#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <numbers>

#include "herglotz/harmonics.hpp"

using namespace herglotz;

namespace {

Point unit(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p / p.norm();
}

std::vector<Exponent> monomials(int d, int m) {
  std::vector<Exponent> out;
  Exponent e(d, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == d - 1) {
      e[i] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[i] = k;
      self(self, i + 1, left - k);
    }
  };
  rec(rec, 0, m);
  return out;
}

// dim of the kernel of the Laplacian on homogeneous degree-m polynomials,
// by rank of its matrix in the monomial bases.
std::int64_t brute_force_harmonic_dim(int d, int m) {
  const auto from = monomials(d, m);
  if (m < 2) return static_cast<std::int64_t>(from.size());
  const auto to = monomials(d, m - 2);
  std::map<Exponent, int> row;
  for (std::size_t i = 0; i < to.size(); ++i) row[to[i]] = static_cast<int>(i);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
  for (std::size_t c = 0; c < from.size(); ++c) {
    const auto lap = laplacian(RationalPolynomial::monomial(from[c]));
    for (const auto& [e, coef] : lap.terms()) A(row.at(e), static_cast<Eigen::Index>(c)) = static_cast<double>(coef);
  }
  return static_cast<std::int64_t>(from.size()) - Eigen::FullPivLU<Eigen::MatrixXd>(A).rank();
}

double grid_inner(const SphereGrid& g, const std::function<double(const Point&)>& f,
                  const std::function<double(const Point&)>& h) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g.weights[k] * f(g.nodes[k]) * h(g.nodes[k]);
  return s;
}

}  // namespace

TEST_SUITE("harmonics") {

TEST_CASE("harmonic_dim") {
  for (int m = 0; m <= 8; ++m) CHECK(harmonic_dim(3, m) == 2 * m + 1);
  for (int m = 1; m <= 8; ++m) CHECK(harmonic_dim(2, m) == 2);
  for (int d = 2; d <= 7; ++d) CHECK(harmonic_dim(d, 0) == 1);
  for (int d = 2; d <= 4; ++d) {
    for (int m = 0; m <= 5; ++m) {
      CAPTURE(d);
      CAPTURE(m);
      CHECK(harmonic_dim(d, m) == brute_force_harmonic_dim(d, m));
    }
  }
}

TEST_CASE("zonal_eval") {
  const Point zeta = unit({0, 0, 1});
  CHECK(zonal_eval(0, 3, zeta, unit({1, 2, 3})) == 1.0);
  const Point z4 = unit({1, 1, 0, 1});
  CHECK(zonal_eval(1, 4, z4, z4) == doctest::Approx(2.0));
  CHECK(zonal_eval(2, 3, zeta, unit({1, 0, 0})) == doctest::Approx(-0.5));
  Point bad(3);
  bad << 1, 1, 0;
  CHECK_THROWS_AS(zonal_eval(1, 3, zeta, bad), DomainError);
}

TEST_CASE("p_alpha examples") {
  CHECK(p_alpha({1, 0, 0}, 3) == RationalPolynomial::variable(3, 0));
  CHECK(p_alpha({0, 0, 0}, 3) == RationalPolynomial::constant(3, 1));
  CHECK(p_alpha({1, 1, 0}, 3) == RationalPolynomial::variable(3, 0) * RationalPolynomial::variable(3, 1));
  CHECK_THROWS_AS(p_alpha({1, 0}, 2), DomainError);
}

TEST_CASE("laplacian examples") {
  const auto x1 = RationalPolynomial::variable(3, 0);
  CHECK(laplacian(x1 * x1) == RationalPolynomial::constant(3, 2));
  CHECK(laplacian(RationalPolynomial::constant(3, 5)).is_zero());
  CHECK(laplacian(p_alpha({2, 1, 1}, 3)).is_zero());
}

TEST_CASE("p_alpha is harmonic, homogeneous and x^alpha mod |x|^2") {
  for (int d : {3, 4}) {
    for (int m = 0; m <= 4; ++m) {
      for (const Exponent& alpha : p_basis_indices(d, m)) {
        const RationalPolynomial p = p_alpha(alpha, d);
        CHECK(laplacian(p).is_zero());
        CHECK(p.homogeneous_degree() == m);
        const auto rest = p - RationalPolynomial::monomial(alpha);
        if (!rest.is_zero()) {
          CHECK(rest.divide(RationalPolynomial::norm_squared(d)).second.is_zero());
        }
      }
    }
  }
}

TEST_CASE("p_basis_indices have alpha_d in {0,1} and count N(m)") {
  for (int d : {3, 4, 5}) {
    for (int m = 0; m <= 5; ++m) {
      const auto idx = p_basis_indices(d, m);
      CHECK(static_cast<std::int64_t>(idx.size()) == harmonic_dim(d, m));
      for (const auto& a : idx) {
        CHECK(a.back() <= 1);
        int total = 0;
        for (int k : a) total += k;
        CHECK(total == m);
      }
    }
  }
}

TEST_CASE("basis evaluation") {
  const BasisSpec f = BasisSpec::fourier2d();
  CHECK(f.eval(0, 1, circle_point(0.7)) == Complex(1.0));
  CHECK(std::abs(f.eval(3, 1, circle_point(0.7)) - std::polar(1.0, 2.1)) < 1e-15);
  CHECK(std::abs(f.eval(3, 2, circle_point(0.7)) - std::polar(1.0, -2.1)) < 1e-15);
  CHECK_THROWS_AS(f.eval(3, 3, circle_point(0.7)), DomainError);

  const BasisSpec z = BasisSpec::zonal(3, 3);
  const Point theta = unit({0.3, -0.4, 0.8});
  for (int m = 0; m <= 3; ++m) {
    for (int j = 1; j <= z.size(m); ++j) {
      CHECK(z.eval(m, j, theta).real() == doctest::Approx(zonal_eval(m, 3, z.poles(m)[j - 1], theta)));
    }
  }

  const BasisSpec p = BasisSpec::palpha(4, 3);
  const Point t4 = unit({0.3, -0.4, 0.8, 0.1});
  const std::vector<double> x(t4.data(), t4.data() + 4);
  for (int m = 0; m <= 3; ++m) {
    for (int j = 1; j <= p.size(m); ++j) {
      const double expected = to_real(p_alpha(p.indices(m)[j - 1], 4)).evaluate(std::span<const double>(x));
      CHECK(p.eval(m, j, t4).real() == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("zonal default poles") {
  const BasisSpec z = BasisSpec::zonal(3, 4);
  for (int m = 0; m <= 4; ++m) {
    CHECK(z.poles(m).size() == static_cast<std::size_t>(2 * m + 1));
    CHECK((z.poles(m)[0] - unit({0, 0, 1})).norm() == 0.0);
    for (const Point& p : z.poles(m)) CHECK(std::abs(p.norm() - 1.0) < 1e-12);
  }
  CHECK(z.same_functions(BasisSpec::zonal(3, 4)));
}

TEST_CASE("sphere_grid") {
  const SphereGrid g2 = sphere_grid(2, 8);
  CHECK(g2.size() == 8);
  for (double w : g2.weights) CHECK(w == doctest::Approx(2 * std::numbers::pi / 8));
  for (int n : {3, 6, 11}) {
    const SphereGrid g3 = sphere_grid(3, n);
    double total = 0.0;
    for (double w : g3.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(std::abs(total - 4 * std::numbers::pi) < 1e-12);
    double first = 0.0;
    for (std::size_t k = 0; k < g3.size(); ++k) first += g3.weights[k] * g3.nodes[k](2);
    CHECK(std::abs(first) < 1e-12);
  }
  double total4 = 0.0;
  for (double w : sphere_grid(4, 6).weights) total4 += w;
  CHECK(std::abs(total4 - sphere_area(4)) < 1e-12);
  CHECK_THROWS_AS(sphere_grid(1, 4), DomainError);
}

TEST_CASE("different degrees are orthogonal on the sphere") {
  for (const BasisSpec& basis : {BasisSpec::zonal(3, 4), BasisSpec::palpha(4, 3)}) {
    const int top = basis.max_degree();
    const SphereGrid grid = sphere_grid(basis.dim(), 2 * top + 2);
    for (int m = 0; m <= top; ++m) {
      for (int n = m + 1; n <= top; ++n) {
        for (int j = 1; j <= basis.size(m); ++j) {
          for (int k = 1; k <= basis.size(n); ++k) {
            const double ip = grid_inner(
                grid, [&](const Point& x) { return basis.eval(m, j, x).real(); },
                [&](const Point& x) { return basis.eval(n, k, x).real(); });
            CHECK(std::abs(ip) <= 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("orthonormalized bases have identity Gram matrices") {
  for (const BasisSpec& basis : {BasisSpec::zonal(3, 3, {}, true), BasisSpec::palpha(3, 3, true)}) {
    const SphereGrid grid = sphere_grid(3, 10);
    const double area = sphere_area(3);
    for (int m = 0; m <= 3; ++m) {
      CHECK(basis.gram(m).isIdentity(1e-12));
      for (int j = 1; j <= basis.size(m); ++j) {
        for (int k = 1; k <= basis.size(m); ++k) {
          const double ip = grid_inner(
              grid, [&](const Point& x) { return basis.eval(m, j, x).real(); },
              [&](const Point& x) { return basis.eval(m, k, x).real(); });
          CHECK(ip / area == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("gram_rank examples") {
  const SphereGrid grid = sphere_grid(3, 16);
  const BasisSpec p = BasisSpec::palpha(3, 3);
  std::vector<SphereFunction> squares;
  for (int j = 1; j <= p.size(3); ++j) {
    squares.push_back([&p, j](const Point& x) {
      const double y = p.eval(3, j, x).real();
      return y * y;
    });
  }
  CHECK(gram_rank(squares, grid).rank == 7);

  const Point z1 = unit({0.2, 0.5, 0.7});
  const Point z2 = -z1;
  auto zonal_square = [](int m, Point z) {
    return SphereFunction([m, z](const Point& x) {
      const double y = zonal_eval(m, 3, z, x);
      return y * y;
    });
  };
  const std::vector<SphereFunction> antipodal{zonal_square(2, z1), zonal_square(2, z2)};
  CHECK(gram_rank(antipodal, grid).rank == 1);
  const std::vector<SphereFunction> generic{zonal_square(2, z1), zonal_square(2, unit({-0.6, 0.1, 0.3}))};
  const GramRank g = gram_rank(generic, grid);
  CHECK(g.rank == 2);
  CHECK(g.min_singular_value > 1e-8);
}

}  // TEST_SUITE
