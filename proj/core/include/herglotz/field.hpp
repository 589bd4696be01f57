#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "herglotz/harmonics.hpp"

namespace herglotz {

/// Truncated coefficient table a_{m,j}, 0 <= m <= M, 1 <= j <= N(m), in a
/// given basis. Wavelength is normalized to 1.
///
/// Fourier2D layout: degree m > 0 stores (u^(m), u^(-m)), degree 0 stores u^(0).
class HerglotzField {
 public:
  /// Zero field of truncation degree max_degree.
  HerglotzField(BasisSpec basis, int max_degree);
  HerglotzField(BasisSpec basis, std::vector<Eigen::VectorXcd> coeffs);

  /// d = 2 field from u^(k), -M <= k <= M (index k + M).
  static HerglotzField from_fourier(std::span<const Complex> coeffs);

  int dim() const noexcept { return basis_.dim(); }
  int max_degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const BasisSpec& basis() const noexcept { return basis_; }
  const std::vector<Eigen::VectorXcd>& coefficients() const noexcept { return coeffs_; }

  /// Degree-m coefficient vector; zero vector above the truncation.
  Eigen::VectorXcd degree(int m) const;
  /// a_{m,j}, j 1-based; zero above the truncation.
  Complex coeff(int m, int j) const;
  void set(int m, int j, Complex value);

  /// u^(k) of a Fourier2D field, any integer k.
  Complex fourier(int k) const;
  void set_fourier(int k, Complex value);

  /// Same field with truncation raised (or lowered, dropping degrees) to M.
  HerglotzField padded(int max_degree) const;
  /// Highest degree with a nonzero coefficient, -1 for the zero field.
  int effective_degree() const;
  bool is_zero() const;
  double max_abs() const;

  HerglotzField& operator*=(Complex c);
  friend HerglotzField operator*(Complex c, HerglotzField u) { return u *= c; }
  friend HerglotzField operator+(const HerglotzField& u, const HerglotzField& v);
  friend HerglotzField operator-(const HerglotzField& u, const HerglotzField& v);

 private:
  BasisSpec basis_;
  std::vector<Eigen::VectorXcd> coeffs_;
};

/// r^{-(d-2)/2} J_{nu(m)}(r), with its finite limit at r = 0.
double radial_factor(int m, int d, double r);

/// U_m(theta) = sum_j a_{m,j} Y_m^j(theta).
Complex angular_part(const HerglotzField& u, int m, const Point& theta);

/// u(r theta) = sqrt(2 pi) sum_m radial_factor(m, d, r) U_m(theta).
Complex eval_field(const HerglotzField& u, double r, const Point& theta);

/// |u(r theta)|^2 from the field value.
double magnitude_sq(const HerglotzField& u, double r, const Point& theta);
/// |u(r theta)|^2 through 2 pi sum_{m,n} Re c_{m,n}(theta) f_m(r) f_n(r).
double magnitude_sq_expansion(const HerglotzField& u, double r, const Point& theta);

/// Coefficient transform giving the field conj(u): Fourier2D swaps the +-m
/// slots and conjugates, real bases conjugate entrywise.
HerglotzField conjugate_field(const HerglotzField& u);

/// Real trigonometric polynomial sum_k c_k e^{i k theta}, with c_{-k} = conj(c_k).
using TrigPoly = std::map<int, Complex>;

double eval_trig(const TrigPoly& p, double theta);

/// Re c_{m,n} for one pair m <= n.
struct PairData {
  int m = 0;
  int n = 0;
  /// d = 2 exact form, frequencies +-(m+n), +-(n-m).
  TrigPoly trig;
  /// Samples on sphere_grid(dim, grid_resolution) (d >= 3).
  std::vector<double> samples;
};

/// Frequencies carried by Re c_{m,n} for d = 2, ascending.
std::vector<int> pair_frequencies(int m, int n);

/// Re c_{m,n}, 0 <= m <= n <= M: exact trigonometric coefficients for d = 2,
/// sphere-grid samples for d >= 3.
struct MagnitudeData {
  int dim = 2;
  int max_degree = 0;
  int grid_resolution = 0;
  /// Ordered (0,0), (0,1), ..., (0,M), (1,1), ...
  std::vector<PairData> pairs;

  static std::size_t pair_index(int m, int n, int max_degree);
  const PairData& pair(int m, int n) const;
  PairData& pair(int m, int n);
  SphereGrid grid() const;
  /// Empty data of the right shape.
  static MagnitudeData zero(int dim, int max_degree);
  /// Largest absolute value over all stored coefficients / samples.
  double max_abs() const;
};

/// Angular resolution used for d >= 3 magnitude samples: 4M + 2.
int magnitude_grid_resolution(int max_degree);

/// Re c_{m,n}(theta) = Re(U_m(theta) conj(U_n(theta))) for all pairs.
MagnitudeData magnitude_coeffs(const HerglotzField& u);
MagnitudeData magnitude_coeffs(const HerglotzField& u, int grid_resolution);

/// Re c_{m,n} of one d = 2 pair as an exact trigonometric polynomial.
TrigPoly pair_trig(const Eigen::VectorXcd& am, int m, const Eigen::VectorXcd& an, int n);

/// |u(r theta)|^2 re-synthesized from d = 2 magnitude data.
double synthesize_magnitude(const MagnitudeData& data, double r, double theta);
/// Same from d >= 3 samples, at node `node` of the data grid.
double synthesize_magnitude_node(const MagnitudeData& data, double r, std::size_t node);

/// max |data_a - data_b| over all pairs and coefficients / samples; d = 2
/// compares the trigonometric polynomials on a 4M+2 point circle grid.
double data_deviation(const MagnitudeData& a, const MagnitudeData& b);

struct EqualMagnitudeReport {
  bool equal = false;
  /// Deviation of Re c_{m,n} data, and the threshold it was compared with.
  double data_deviation = 0.0;
  double data_threshold = 0.0;
  /// Direct comparison of |u|^2 and |v|^2 on a polar/spherical grid in (0, 1].
  bool grid_equal = false;
  double grid_deviation = 0.0;
  double grid_threshold = 0.0;
  bool consistent() const noexcept { return equal == grid_equal; }
};

/// Compares Re c_{m,n}(u) and Re c_{m,n}(v); tolerances scale with
/// max(1, largest magnitude).
EqualMagnitudeReport equal_magnitude_report(const HerglotzField& u, const HerglotzField& v, double tol = 1e-9);
bool equal_magnitude(const HerglotzField& u, const HerglotzField& v, double tol = 1e-9);

enum class Verdict { Identity, Conjugate, Both, Inequivalent };
std::string_view to_string(Verdict verdict);

struct TrivialEquivalence {
  Verdict verdict = Verdict::Inequivalent;
  /// v = c u (Identity) or v = c conj(u) (Conjugate); for Both, the Identity constant.
  std::optional<Complex> c;
  std::optional<Complex> c_conjugate;
  /// Max coefficient deviation of the better relation.
  double residual = 0.0;
};

TrivialEquivalence trivially_equivalent(const HerglotzField& u, const HerglotzField& v, double tol = 1e-9);

/// sum_k |a_{m,k}|^2 in orthonormalized coordinates (a^* G a with the
/// normalized-measure Gram matrix).
double degree_power(const HerglotzField& u, int m);

/// a_{0,1} recovered from the mean of u over eta S^{d-1}.
double mean_bessel_factor(int d, double eta);
Complex mean_coefficient(const HerglotzField& u, double eta = 1.0);

}  // namespace herglotz
