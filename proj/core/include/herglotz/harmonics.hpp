#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "herglotz/polynomial.hpp"

namespace herglotz {

/// A point of R^d; points on S^{d-1} are unit vectors.
using Point = Eigen::VectorXd;
using Complex = std::complex<double>;

/// dim H_m^d = C(m+d-1, m) - C(m+d-3, m-2), second term dropped for m < 2.
std::int64_t harmonic_dim(int d, int m);

/// sigma(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// Throws DomainError unless |x| = 1 within 1e-12.
void require_unit(const Point& x, std::string_view what);

/// Point (cos t, sin t) of S^1.
Point circle_point(double t);

/// Multi-indices alpha with |alpha| = m and alpha_d in {0, 1}, in a fixed
/// order (lexicographically decreasing). Their count is harmonic_dim(d, m).
std::vector<Exponent> p_basis_indices(int d, int m);

/// p_alpha(x) = (-1)^m / (2^m ((d-2)/2)_m) |x|^{d-2+2m} d^alpha |x|^{2-d},
/// computed exactly. d >= 3.
RationalPolynomial p_alpha(const Exponent& alpha, int d);

/// C_m^{d/2-1}(<theta, zeta>) for unit vectors; d >= 3.
double zonal_eval(int m, int d, const Point& zeta, const Point& theta);

struct SphereGrid {
  int dim = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;
  /// Spherical angles per node: (theta) for d = 2, (polar, azimuth) for d = 3.
  std::vector<std::vector<double>> angles;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// d = 2: `resolution` equally spaced nodes. d >= 3: Gauss nodes in x_d for the
/// weight (1-t^2)^{(d-3)/2} times the S^{d-2} grid (uniform azimuth for d = 3).
/// Integrates polynomials of degree < resolution exactly.
SphereGrid sphere_grid(int d, int resolution);

enum class BasisKind { Fourier2D, Zonal, PAlpha };

std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

/// Which spherical-harmonic basis is in force. Zonal and PAlpha bases cover
/// degrees 0..max_degree; evaluation tables are built once at construction and
/// shared read-only between copies.
class BasisSpec {
 public:
  /// e^{i m t}, e^{-i m t} on S^1 (j = 1, 2); degree 0 is the constant 1.
  static BasisSpec fourier2d();
  /// C_m^{d/2-1}(<theta, zeta_m^j>). With no poles supplied, generates a
  /// deterministic generic pole system with zeta_m^1 = e_d.
  static BasisSpec zonal(int d, int max_degree, std::vector<std::vector<Point>> poles = {},
                         bool orthonormalize = false);
  static BasisSpec palpha(int d, int max_degree, bool orthonormalize = false);

  BasisKind kind() const noexcept;
  int dim() const noexcept;
  /// Largest covered degree; -1 means unbounded (Fourier2D).
  int max_degree() const noexcept;
  bool orthonormalized() const noexcept;
  /// Zonal and PAlpha functions are real valued.
  bool is_real() const noexcept { return kind() != BasisKind::Fourier2D; }

  std::int64_t size(int m) const { return harmonic_dim(dim(), m); }

  /// j-th (1-based) degree-m basis function at a unit vector.
  Complex eval(int m, int j, const Point& theta) const;
  /// All degree-m functions at theta; out.size() == size(m).
  void eval_degree(int m, const Point& theta, std::span<Complex> out) const;
  /// Real-valued bases only.
  void eval_degree_real(int m, const Point& theta, std::span<double> out) const;

  /// Gram matrix of the degree-m functions for the normalized measure
  /// d sigma / sigma(S^{d-1}); the identity for Fourier2D and for
  /// orthonormalized bases.
  const Eigen::MatrixXd& gram(int m) const;

  /// Zonal poles of degree m (empty for other kinds).
  const std::vector<Point>& poles(int m) const;
  /// Multi-indices of degree m (PAlpha only).
  const std::vector<Exponent>& indices(int m) const;
  /// Exact p_alpha polynomials of degree m (PAlpha only).
  const std::vector<RationalPolynomial>& polynomials(int m) const;

  /// Same kind, dimension, normalization and (for Zonal) poles; degree
  /// coverage may differ.
  bool same_functions(const BasisSpec& other) const;

  struct Impl;

 private:
  explicit BasisSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  void check_degree(int m) const;
  std::shared_ptr<const Impl> impl_;
};

/// Deterministic generic pole system: zeta_m^1 = e_d, the rest from a Halton
/// sequence mapped to the sphere. `shift` offsets the sequence.
std::vector<std::vector<Point>> default_zonal_poles(int d, int max_degree, int shift = 0);

struct GramRank {
  int rank = 0;
  /// Smallest singular value of the Gram matrix after scaling every function
  /// to unit grid norm.
  double min_singular_value = 0.0;
  std::vector<double> singular_values;
};

using SphereFunction = std::function<double(const Point&)>;

/// Numerical rank of the Gram matrix of `functions` under grid quadrature.
/// Singular values below rank_tol (relative to the largest) do not count.
GramRank gram_rank(std::span<const SphereFunction> functions, const SphereGrid& grid, double rank_tol = 1e-11);

}  // namespace herglotz
