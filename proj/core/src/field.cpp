#include "herglotz/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "herglotz/specfun.hpp"

namespace herglotz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_coefficients(const BasisSpec& basis, const std::vector<Eigen::VectorXcd>& coeffs) {
  if (coeffs.empty()) throw DomainError("HerglotzField: need at least degree 0");
  const int top = static_cast<int>(coeffs.size()) - 1;
  if (basis.max_degree() >= 0 && top > basis.max_degree()) {
    throw DomainError("HerglotzField: truncation " + std::to_string(top) + " exceeds the basis coverage " +
                      std::to_string(basis.max_degree()));
  }
  for (int m = 0; m <= top; ++m) {
    if (coeffs[m].size() != basis.size(m)) {
      throw DomainError("HerglotzField: degree " + std::to_string(m) + " needs " + std::to_string(basis.size(m)) +
                        " coefficients, got " + std::to_string(coeffs[m].size()));
    }
  }
}

Eigen::VectorXcd flatten(const HerglotzField& u) {
  Eigen::Index total = 0;
  for (const auto& a : u.coefficients()) total += a.size();
  Eigen::VectorXcd out(total);
  Eigen::Index pos = 0;
  for (const auto& a : u.coefficients()) {
    out.segment(pos, a.size()) = a;
    pos += a.size();
  }
  return out;
}

void require_same_dim(const HerglotzField& u, const HerglotzField& v) {
  if (u.dim() != v.dim()) throw DomainError("fields have different dimensions");
  if (!u.basis().same_functions(v.basis())) throw DomainError("fields use different bases");
}

}  // namespace

HerglotzField::HerglotzField(BasisSpec basis, int max_degree) : basis_(std::move(basis)) {
  if (max_degree < 0) throw DomainError("HerglotzField: negative truncation degree");
  for (int m = 0; m <= max_degree; ++m) coeffs_.push_back(Eigen::VectorXcd::Zero(basis_.size(m)));
  check_coefficients(basis_, coeffs_);
}

HerglotzField::HerglotzField(BasisSpec basis, std::vector<Eigen::VectorXcd> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  check_coefficients(basis_, coeffs_);
}

HerglotzField HerglotzField::from_fourier(std::span<const Complex> coeffs) {
  if (coeffs.size() % 2 != 1) throw DomainError("from_fourier: expected 2M+1 coefficients");
  const int top = static_cast<int>(coeffs.size() / 2);
  HerglotzField u(BasisSpec::fourier2d(), top);
  for (int k = -top; k <= top; ++k) u.set_fourier(k, coeffs[k + top]);
  return u;
}

Eigen::VectorXcd HerglotzField::degree(int m) const {
  if (m < 0) throw DomainError("HerglotzField::degree: negative degree");
  if (m > max_degree()) return Eigen::VectorXcd::Zero(basis_.size(m));
  return coeffs_[m];
}

Complex HerglotzField::coeff(int m, int j) const {
  if (m < 0 || j < 1 || j > basis_.size(m)) throw DomainError("HerglotzField::coeff: index out of range");
  if (m > max_degree()) return 0.0;
  return coeffs_[m](j - 1);
}

void HerglotzField::set(int m, int j, Complex value) {
  if (m < 0 || m > max_degree() || j < 1 || j > basis_.size(m)) {
    throw DomainError("HerglotzField::set: index (" + std::to_string(m) + ", " + std::to_string(j) + ") out of range");
  }
  coeffs_[m](j - 1) = value;
}

Complex HerglotzField::fourier(int k) const {
  if (basis_.kind() != BasisKind::Fourier2D) throw DomainError("HerglotzField::fourier: not a Fourier2D field");
  const int m = std::abs(k);
  if (m > max_degree()) return 0.0;
  return coeffs_[m](k >= 0 ? 0 : 1);
}

void HerglotzField::set_fourier(int k, Complex value) {
  if (basis_.kind() != BasisKind::Fourier2D) throw DomainError("HerglotzField::set_fourier: not a Fourier2D field");
  set(std::abs(k), k >= 0 ? 1 : 2, value);
}

HerglotzField HerglotzField::padded(int max_degree) const {
  HerglotzField out(basis_, max_degree);
  for (int m = 0; m <= std::min(max_degree, this->max_degree()); ++m) out.coeffs_[m] = coeffs_[m];
  return out;
}

int HerglotzField::effective_degree() const {
  for (int m = max_degree(); m >= 0; --m) {
    if (coeffs_[m].cwiseAbs().maxCoeff() > 0.0) return m;
  }
  return -1;
}

bool HerglotzField::is_zero() const { return effective_degree() < 0; }

double HerglotzField::max_abs() const {
  double best = 0.0;
  for (const auto& a : coeffs_) best = std::max(best, a.cwiseAbs().maxCoeff());
  return best;
}

HerglotzField& HerglotzField::operator*=(Complex c) {
  for (auto& a : coeffs_) a *= c;
  return *this;
}

HerglotzField operator+(const HerglotzField& u, const HerglotzField& v) {
  require_same_dim(u, v);
  const int top = std::max(u.max_degree(), v.max_degree());
  HerglotzField out = u.padded(top);
  for (int m = 0; m <= top; ++m) out.coeffs_[m] += v.degree(m);
  return out;
}

HerglotzField operator-(const HerglotzField& u, const HerglotzField& v) { return u + Complex(-1.0) * v; }

double radial_factor(int m, int d, double r) {
  const BesselOrder nu = BesselOrder::for_degree(m, d);
  if (r == 0.0) {
    // r^{-(d-2)/2} J_{(d-2)/2}(r) -> 2^{-(d-2)/2} / Gamma(d/2); higher m vanish.
    return m == 0 ? std::pow(0.5, 0.5 * (d - 2)) / gamma_fn(0.5 * d) : 0.0;
  }
  const double j = bessel_j(nu, r);
  return d == 2 ? j : j * std::pow(r, -0.5 * (d - 2));
}

Complex angular_part(const HerglotzField& u, int m, const Point& theta) {
  if (m > u.max_degree()) return 0.0;
  std::vector<Complex> y(static_cast<std::size_t>(u.basis().size(m)));
  u.basis().eval_degree(m, theta, y);
  const Eigen::VectorXcd& a = u.coefficients()[m];
  Complex total = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) total += a(static_cast<Eigen::Index>(j)) * y[j];
  return total;
}

Complex eval_field(const HerglotzField& u, double r, const Point& theta) {
  if (!(r >= 0.0)) throw DomainError("eval_field: r must be nonnegative");
  if (theta.size() != u.dim()) throw DomainError("eval_field: point dimension mismatch");
  require_unit(theta, "eval_field");
  Complex total = 0.0;
  for (int m = 0; m <= u.max_degree(); ++m) {
    if (u.coefficients()[m].cwiseAbs().maxCoeff() == 0.0) continue;
    total += radial_factor(m, u.dim(), r) * angular_part(u, m, theta);
  }
  return std::sqrt(kTwoPi) * total;
}

double magnitude_sq(const HerglotzField& u, double r, const Point& theta) { return std::norm(eval_field(u, r, theta)); }

double magnitude_sq_expansion(const HerglotzField& u, double r, const Point& theta) {
  if (!(r >= 0.0)) throw DomainError("magnitude_sq_expansion: r must be nonnegative");
  require_unit(theta, "magnitude_sq_expansion");
  const int top = u.max_degree();
  std::vector<Complex> parts(top + 1);
  std::vector<double> radial(top + 1);
  for (int m = 0; m <= top; ++m) {
    parts[m] = angular_part(u, m, theta);
    radial[m] = radial_factor(m, u.dim(), r);
  }
  double total = 0.0;
  for (int m = 0; m <= top; ++m) {
    for (int n = 0; n <= top; ++n) total += (parts[m] * std::conj(parts[n])).real() * radial[m] * radial[n];
  }
  return kTwoPi * total;
}

HerglotzField conjugate_field(const HerglotzField& u) {
  std::vector<Eigen::VectorXcd> coeffs = u.coefficients();
  for (int m = 0; m <= u.max_degree(); ++m) {
    coeffs[m] = coeffs[m].conjugate();
    if (u.basis().kind() == BasisKind::Fourier2D && m > 0) std::swap(coeffs[m](0), coeffs[m](1));
  }
  return HerglotzField(u.basis(), std::move(coeffs));
}

double eval_trig(const TrigPoly& p, double theta) {
  double total = 0.0;
  for (const auto& [k, c] : p) total += (c * std::polar(1.0, k * theta)).real();
  return total;
}

std::vector<int> pair_frequencies(int m, int n) {
  std::vector<int> f = {m + n, -(m + n), n - m, m - n};
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

TrigPoly pair_trig(const Eigen::VectorXcd& am, int m, const Eigen::VectorXcd& an, int n) {
  // U_m conj(U_n) as a trigonometric polynomial, then its real part.
  auto terms = [](const Eigen::VectorXcd& a, int deg) {
    std::vector<std::pair<int, Complex>> t{{deg, a(0)}};
    if (deg > 0) t.emplace_back(-deg, a(1));
    return t;
  };
  TrigPoly product;
  for (const auto& [fm, cm] : terms(am, m)) {
    for (const auto& [fn, cn] : terms(an, n)) product[fm - fn] += cm * std::conj(cn);
  }
  TrigPoly re;
  for (int k : pair_frequencies(m, n)) {
    const auto plus = product.find(k);
    const auto minus = product.find(-k);
    const Complex a = plus == product.end() ? Complex(0.0) : plus->second;
    const Complex b = minus == product.end() ? Complex(0.0) : minus->second;
    re[k] = 0.5 * (a + std::conj(b));
  }
  return re;
}

std::size_t MagnitudeData::pair_index(int m, int n, int max_degree) {
  if (m < 0 || m > n || n > max_degree) throw DomainError("MagnitudeData: pair index out of range");
  // Rows m' < m contribute (M+1-m') pairs each.
  const std::size_t before = static_cast<std::size_t>(m) * (2 * (max_degree + 1) - m + 1) / 2;
  return before + static_cast<std::size_t>(n - m);
}

const PairData& MagnitudeData::pair(int m, int n) const { return pairs.at(pair_index(m, n, max_degree)); }
PairData& MagnitudeData::pair(int m, int n) { return pairs.at(pair_index(m, n, max_degree)); }

SphereGrid MagnitudeData::grid() const {
  if (dim == 2 && grid_resolution == 0) return sphere_grid(2, magnitude_grid_resolution(max_degree));
  return sphere_grid(dim, grid_resolution);
}

MagnitudeData MagnitudeData::zero(int dim, int max_degree) {
  if (dim < 2 || max_degree < 0) throw DomainError("MagnitudeData: invalid shape");
  MagnitudeData data;
  data.dim = dim;
  data.max_degree = max_degree;
  data.grid_resolution = dim == 2 ? 0 : magnitude_grid_resolution(max_degree);
  const std::size_t nodes = dim == 2 ? 0 : sphere_grid(dim, data.grid_resolution).size();
  for (int m = 0; m <= max_degree; ++m) {
    for (int n = m; n <= max_degree; ++n) {
      PairData p;
      p.m = m;
      p.n = n;
      if (dim == 2) {
        for (int k : pair_frequencies(m, n)) p.trig[k] = 0.0;
      } else {
        p.samples.assign(nodes, 0.0);
      }
      data.pairs.push_back(std::move(p));
    }
  }
  return data;
}

double MagnitudeData::max_abs() const {
  double best = 0.0;
  for (const auto& p : pairs) {
    for (const auto& [k, c] : p.trig) best = std::max(best, std::abs(c));
    for (double s : p.samples) best = std::max(best, std::abs(s));
  }
  return best;
}

int magnitude_grid_resolution(int max_degree) { return 4 * max_degree + 2; }

MagnitudeData magnitude_coeffs(const HerglotzField& u) {
  return magnitude_coeffs(u, u.dim() == 2 ? 0 : magnitude_grid_resolution(u.max_degree()));
}

MagnitudeData magnitude_coeffs(const HerglotzField& u, int grid_resolution) {
  const int top = u.max_degree();
  MagnitudeData data;
  data.dim = u.dim();
  data.max_degree = top;
  data.grid_resolution = grid_resolution;
  if (u.dim() == 2) {
    if (u.basis().kind() != BasisKind::Fourier2D) throw DomainError("magnitude_coeffs: d = 2 needs the Fourier2D basis");
    data.grid_resolution = 0;
    for (int m = 0; m <= top; ++m) {
      for (int n = m; n <= top; ++n) {
        data.pairs.push_back(PairData{m, n, pair_trig(u.coefficients()[m], m, u.coefficients()[n], n), {}});
      }
    }
    return data;
  }
  if (grid_resolution < 2 * top + 1) {
    throw DomainError("magnitude_coeffs: grid resolution " + std::to_string(grid_resolution) +
                      " cannot resolve degree " + std::to_string(2 * top));
  }
  const SphereGrid grid = sphere_grid(u.dim(), grid_resolution);
  for (int m = 0; m <= top; ++m) {
    for (int n = m; n <= top; ++n) data.pairs.push_back(PairData{m, n, {}, std::vector<double>(grid.size())});
  }
  std::vector<Complex> parts(top + 1);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    for (int m = 0; m <= top; ++m) parts[m] = angular_part(u, m, grid.nodes[q]);
    std::size_t idx = 0;
    for (int m = 0; m <= top; ++m) {
      for (int n = m; n <= top; ++n) data.pairs[idx++].samples[q] = (parts[m] * std::conj(parts[n])).real();
    }
  }
  return data;
}

double synthesize_magnitude(const MagnitudeData& data, double r, double theta) {
  if (data.dim != 2) throw DomainError("synthesize_magnitude: d = 2 data expected");
  std::vector<double> j(data.max_degree + 1);
  for (int m = 0; m <= data.max_degree; ++m) j[m] = radial_factor(m, 2, r);
  double total = 0.0;
  for (const auto& p : data.pairs) {
    const double w = p.m == p.n ? 1.0 : 2.0;
    total += w * eval_trig(p.trig, theta) * j[p.m] * j[p.n];
  }
  return kTwoPi * total;
}

double synthesize_magnitude_node(const MagnitudeData& data, double r, std::size_t node) {
  std::vector<double> f(data.max_degree + 1);
  for (int m = 0; m <= data.max_degree; ++m) f[m] = radial_factor(m, data.dim, r);
  double total = 0.0;
  for (const auto& p : data.pairs) {
    const double w = p.m == p.n ? 1.0 : 2.0;
    total += w * p.samples.at(node) * f[p.m] * f[p.n];
  }
  return kTwoPi * total;
}

double data_deviation(const MagnitudeData& a, const MagnitudeData& b) {
  if (a.dim != b.dim) throw DomainError("data_deviation: dimension mismatch");
  const int top = std::max(a.max_degree, b.max_degree);
  if (a.dim == 2) {
    const int nodes = magnitude_grid_resolution(top);
    double worst = 0.0;
    for (int m = 0; m <= top; ++m) {
      for (int n = m; n <= top; ++n) {
        const TrigPoly empty;
        const TrigPoly& pa = n <= a.max_degree ? a.pair(m, n).trig : empty;
        const TrigPoly& pb = n <= b.max_degree ? b.pair(m, n).trig : empty;
        for (int k = 0; k < nodes; ++k) {
          const double t = kTwoPi * k / nodes;
          worst = std::max(worst, std::abs(eval_trig(pa, t) - eval_trig(pb, t)));
        }
      }
    }
    return worst;
  }
  if (a.max_degree != b.max_degree || a.grid_resolution != b.grid_resolution) {
    throw DomainError("data_deviation: d >= 3 data must share degree and grid");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    const auto& sa = a.pairs[i].samples;
    const auto& sb = b.pairs[i].samples;
    if (sa.size() != sb.size()) throw DomainError("data_deviation: sample count mismatch");
    for (std::size_t q = 0; q < sa.size(); ++q) worst = std::max(worst, std::abs(sa[q] - sb[q]));
  }
  return worst;
}

EqualMagnitudeReport equal_magnitude_report(const HerglotzField& u, const HerglotzField& v, double tol) {
  if (u.dim() != v.dim()) throw DomainError("equal_magnitude: fields have different dimensions");
  if (!(tol > 0.0)) throw DomainError("equal_magnitude: tolerance must be positive");
  const int top = std::max(u.max_degree(), v.max_degree());
  const HerglotzField up = u.padded(top);
  const HerglotzField vp = v.padded(top);
  EqualMagnitudeReport rep;

  const MagnitudeData du = magnitude_coeffs(up);
  const MagnitudeData dv = magnitude_coeffs(vp);
  rep.data_deviation = data_deviation(du, dv);
  rep.data_threshold = tol * std::max({1.0, du.max_abs(), dv.max_abs()});
  rep.equal = rep.data_deviation <= rep.data_threshold;

  // Independent check on |u|^2 itself, radii in (0, 1].
  const SphereGrid angular = u.dim() == 2 ? sphere_grid(2, 4 * top + 2) : sphere_grid(u.dim(), 2 * top + 2);
  constexpr int kRadii = 6;
  double scale = 1.0;
  for (int i = 1; i <= kRadii; ++i) {
    const double r = static_cast<double>(i) / kRadii;
    for (const Point& theta : angular.nodes) {
      const double a = magnitude_sq(up, r, theta);
      const double b = magnitude_sq(vp, r, theta);
      scale = std::max({scale, a, b});
      rep.grid_deviation = std::max(rep.grid_deviation, std::abs(a - b));
    }
  }
  rep.grid_threshold = tol * scale;
  rep.grid_equal = rep.grid_deviation <= rep.grid_threshold;
  return rep;
}

bool equal_magnitude(const HerglotzField& u, const HerglotzField& v, double tol) {
  return equal_magnitude_report(u, v, tol).equal;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Identity: return "Identity";
    case Verdict::Conjugate: return "Conjugate";
    case Verdict::Both: return "Both";
    case Verdict::Inequivalent: return "Inequivalent";
  }
  return "unknown";
}

TrivialEquivalence trivially_equivalent(const HerglotzField& u, const HerglotzField& v, double tol) {
  require_same_dim(u, v);
  const int top = std::max(u.max_degree(), v.max_degree());
  const Eigen::VectorXcd x = flatten(u.padded(top));
  const Eigen::VectorXcd xc = flatten(conjugate_field(u.padded(top)));
  const Eigen::VectorXcd y = flatten(v.padded(top));
  const double threshold = tol * std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});

  // Best unimodular c for y ~ c x in the 2-norm is the phase of <x, y>.
  auto fit = [&](const Eigen::VectorXcd& base) {
    const Complex inner = base.dot(y);
    const Complex c = std::abs(inner) > 0.0 ? inner / std::abs(inner) : Complex(1.0);
    return std::pair{c, (y - c * base).cwiseAbs().maxCoeff()};
  };
  const auto [ci, ri] = fit(x);
  const auto [cc, rc] = fit(xc);

  TrivialEquivalence out;
  const bool identity = ri <= threshold;
  const bool conjugate = rc <= threshold;
  if (identity) out.c = ci;
  if (conjugate) out.c_conjugate = cc;
  if (identity && conjugate) {
    out.verdict = Verdict::Both;
    out.residual = std::min(ri, rc);
  } else if (identity) {
    out.verdict = Verdict::Identity;
    out.residual = ri;
  } else if (conjugate) {
    out.verdict = Verdict::Conjugate;
    out.c = cc;
    out.residual = rc;
  } else {
    out.residual = std::min(ri, rc);
  }
  return out;
}

double degree_power(const HerglotzField& u, int m) {
  if (m < 0) throw DomainError("degree_power: negative degree");
  if (m > u.max_degree()) return 0.0;
  const Eigen::VectorXcd& a = u.coefficients()[m];
  const Eigen::MatrixXcd g = u.basis().gram(m).cast<Complex>();
  return std::max(0.0, a.dot(g * a).real());
}

double mean_bessel_factor(int d, double eta) {
  if (!(eta > 0.0)) throw DomainError("mean_coefficient: eta must be positive");
  const double j = bessel_j(BesselOrder::for_degree(0, d), eta);
  if (std::abs(j) < 1e-10) {
    throw DomainError("mean_coefficient: eta = " + std::to_string(eta) + " is a zero of J_{d/2-1}");
  }
  return std::sqrt(kTwoPi) * radial_factor(0, d, eta);
}

Complex mean_coefficient(const HerglotzField& u, double eta) {
  const double factor = mean_bessel_factor(u.dim(), eta);
  const SphereGrid grid = sphere_grid(u.dim(), u.max_degree() + 2);
  Complex integral = 0.0;
  double area = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    integral += grid.weights[q] * eval_field(u, eta, grid.nodes[q]);
    area += grid.weights[q];
  }
  // Y_0 is constant; divide its value out so any normalization works.
  std::vector<Complex> y0(1);
  u.basis().eval_degree(0, grid.nodes[0], y0);
  return integral / area / (factor * y0[0]);
}

}  // namespace herglotz
