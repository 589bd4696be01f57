#include "herglotz/harmonics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "herglotz/quadrature.hpp"
#include "herglotz/specfun.hpp"

namespace herglotz {

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

void compositions(int total, int parts, Exponent& current, int pos, std::vector<Exponent>& out) {
  if (pos == parts - 1) {
    current[pos] = total;
    out.push_back(current);
    return;
  }
  for (int k = total; k >= 0; --k) {
    current[pos] = k;
    compositions(total - k, parts, current, pos + 1, out);
  }
}

/// Sum_k P_k(x) |x|^{2(s0 - k)}: a rational function of the kind produced by
/// differentiating |x|^{2 s0}. Keys are k, values P_k.
struct RadialPowerSum {
  Rational s0;
  std::map<int, RationalPolynomial> parts;
};

RadialPowerSum differentiate(const RadialPowerSum& f, int i, int nvars) {
  RadialPowerSum out{f.s0, {}};
  const RationalPolynomial xi = RationalPolynomial::variable(nvars, i);
  auto accumulate = [&](int k, const RationalPolynomial& p) {
    if (p.is_zero()) return;
    auto [it, inserted] = out.parts.try_emplace(k, p);
    if (!inserted) it->second += p;
  };
  for (const auto& [k, p] : f.parts) {
    // d_i (P |x|^{2s}) = (d_i P) |x|^{2s} + 2 s x_i P |x|^{2s-2},  s = s0 - k
    accumulate(k, p.derivative(i));
    const Rational s = f.s0 - k;
    accumulate(k + 1, (xi * p) * (Rational(2) * s));
  }
  return out;
}

/// Radical-inverse Halton coordinate.
double halton(std::uint64_t index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr std::array<int, 8> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

std::int64_t harmonic_dim(int d, int m) {
  if (d < 2 || m < 0) throw DomainError("harmonic_dim: need d >= 2 and m >= 0");
  const std::int64_t first = binomial(m + d - 1, m);
  const std::int64_t second = (m >= 2) ? binomial(m + d - 3, m - 2) : 0;
  return first - second;
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma_fn(0.5 * d);
}

void require_unit(const Point& x, std::string_view what) {
  if (std::abs(x.norm() - 1.0) > 1e-12) {
    throw DomainError(std::string(what) + ": expected a unit vector, got norm " + std::to_string(x.norm()));
  }
}

Point circle_point(double t) {
  Point p(2);
  p << std::cos(t), std::sin(t);
  return p;
}

std::vector<Exponent> p_basis_indices(int d, int m) {
  if (d < 3) throw DomainError("p_basis_indices: the p_alpha basis needs d >= 3");
  if (m < 0) throw DomainError("p_basis_indices: negative degree");
  std::vector<Exponent> out;
  for (int last : {0, 1}) {
    if (m - last < 0) continue;
    std::vector<Exponent> head;
    Exponent current(d - 1, 0);
    compositions(m - last, d - 1, current, 0, head);
    for (auto& e : head) {
      e.push_back(last);
      out.push_back(std::move(e));
    }
  }
  return out;
}

RationalPolynomial p_alpha(const Exponent& alpha, int d) {
  if (d < 3) throw DomainError("p_alpha: unsupported basis for d = " + std::to_string(d));
  if (static_cast<int>(alpha.size()) != d) throw DomainError("p_alpha: multi-index arity must equal d");
  int m = 0;
  for (int a : alpha) {
    if (a < 0) throw DomainError("p_alpha: negative multi-index entry");
    m += a;
  }

  RadialPowerSum f{Rational(2 - d, 2), {}};
  f.parts.emplace(0, RationalPolynomial::constant(d, Rational(1)));
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < alpha[i]; ++k) f = differentiate(f, i, d);
  }

  // Multiplying by |x|^{d-2+2m} turns P_k |x|^{2(s0-k)} into P_k |x|^{2(m-k)}.
  const RationalPolynomial r2 = RationalPolynomial::norm_squared(d);
  RationalPolynomial result(d);
  for (const auto& [k, p] : f.parts) {
    RationalPolynomial term = p;
    for (int i = 0; i < m - k; ++i) term = term * r2;
    result += term;
  }

  // (-1)^m / (2^m ((d-2)/2)_m)
  Rational pochhammer(1);
  for (int i = 0; i < m; ++i) pochhammer *= Rational(d - 2, 2) + i;
  Rational scale = Rational(1) / (pochhammer * Rational(std::int64_t{1} << m));
  if (m % 2 == 1) scale = -scale;
  return result * scale;
}

double zonal_eval(int m, int d, const Point& zeta, const Point& theta) {
  if (d < 3) throw DomainError("zonal_eval: zonal bases need d >= 3");
  if (zeta.size() != d || theta.size() != d) throw DomainError("zonal_eval: vector dimension mismatch");
  require_unit(zeta, "zonal_eval(zeta)");
  require_unit(theta, "zonal_eval(theta)");
  return gegenbauer(m, 0.5 * d - 1.0, theta.dot(zeta));
}

SphereGrid sphere_grid(int d, int resolution) {
  if (d < 2) throw DomainError("sphere_grid: unsupported dimension " + std::to_string(d));
  if (resolution < 1) throw DomainError("sphere_grid: resolution must be positive");
  SphereGrid grid;
  grid.dim = d;
  if (d == 2) {
    const double w = 2.0 * std::numbers::pi / resolution;
    for (int k = 0; k < resolution; ++k) {
      const double t = w * k;
      grid.nodes.push_back(circle_point(t));
      grid.weights.push_back(w);
      grid.angles.push_back({t});
    }
    return grid;
  }
  const QuadratureRule rule = gauss_gegenbauer(resolution, 0.5 * (d - 3));
  const SphereGrid sub = sphere_grid(d - 1, resolution);
  for (int i = 0; i < resolution; ++i) {
    const double t = rule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t k = 0; k < sub.size(); ++k) {
      Point p(d);
      p.head(d - 1) = s * sub.nodes[k];
      p(d - 1) = t;
      grid.nodes.push_back(std::move(p));
      grid.weights.push_back(rule.weights[i] * sub.weights[k]);
      if (d == 3) {
        grid.angles.push_back({std::acos(std::clamp(t, -1.0, 1.0)), sub.angles[k][0]});
      }
    }
  }
  return grid;
}

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Fourier2D: return "fourier2d";
    case BasisKind::Zonal: return "zonal";
    case BasisKind::PAlpha: return "palpha";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(std::string_view name) {
  if (name == "fourier2d") return BasisKind::Fourier2D;
  if (name == "zonal") return BasisKind::Zonal;
  if (name == "palpha") return BasisKind::PAlpha;
  throw DomainError("unknown basis kind '" + std::string(name) + "'");
}

std::vector<std::vector<Point>> default_zonal_poles(int d, int max_degree, int shift) {
  if (d < 3) throw DomainError("default_zonal_poles: zonal bases need d >= 3");
  if (d > 2 * static_cast<int>(kPrimes.size())) throw DomainError("default_zonal_poles: dimension too large");
  Point pole0 = Point::Zero(d);
  pole0(d - 1) = 1.0;
  std::vector<std::vector<Point>> poles;
  std::uint64_t counter = 1 + 997ULL * static_cast<std::uint64_t>(shift);
  for (int m = 0; m <= max_degree; ++m) {
    std::vector<Point> level{pole0};
    const std::int64_t count = harmonic_dim(d, m);
    while (static_cast<std::int64_t>(level.size()) < count) {
      // Box–Muller on consecutive Halton coordinates gives a Gaussian vector.
      Point g(d);
      for (int i = 0; i < d; i += 2) {
        const double u1 = std::max(halton(counter, kPrimes[i]), 1e-12);
        const double u2 = halton(counter, kPrimes[i + 1]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        g(i) = rad * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < d) g(i + 1) = rad * std::sin(2.0 * std::numbers::pi * u2);
      }
      ++counter;
      const double n = g.norm();
      if (n < 1e-8) continue;
      level.push_back(g / n);
    }
    poles.push_back(std::move(level));
  }
  return poles;
}

struct BasisSpec::Impl {
  BasisKind kind = BasisKind::Fourier2D;
  int dim = 2;
  int max_degree = -1;
  bool orthonormalized = false;
  std::vector<std::vector<Point>> poles;
  std::vector<std::vector<Exponent>> indices;
  std::vector<std::vector<RationalPolynomial>> exact;
  std::vector<std::vector<RealPolynomial>> real;
  /// Lower-triangular T with orthonormal functions T * raw (identity when raw).
  std::vector<Eigen::MatrixXd> transform;
  std::vector<Eigen::MatrixXd> gram;

  void eval_raw(int m, const Point& theta, std::span<double> out) const {
    if (kind == BasisKind::Zonal) {
      const double lambda = 0.5 * dim - 1.0;
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = gegenbauer(m, lambda, theta.dot(poles[m][j]));
    } else {
      const std::span<const double> x(theta.data(), static_cast<std::size_t>(theta.size()));
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = real[m][j].evaluate(x);
    }
  }

  Eigen::MatrixXd raw_gram(int m) const {
    const SphereGrid grid = sphere_grid(dim, 2 * m + 2);
    const int n = static_cast<int>(harmonic_dim(dim, m));
    const double area = sphere_area(dim);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> values(n);
    for (std::size_t q = 0; q < grid.size(); ++q) {
      eval_raw(m, grid.nodes[q], values);
      const Eigen::Map<const Eigen::VectorXd> v(values.data(), n);
      g.noalias() += (grid.weights[q] / area) * v * v.transpose();
    }
    return g;
  }

  void finalize(bool orthonormalize) {
    orthonormalized = orthonormalize;
    for (int m = 0; m <= max_degree; ++m) {
      const Eigen::MatrixXd g = raw_gram(m);
      const int n = static_cast<int>(g.rows());
      if (!orthonormalize) {
        transform.push_back(Eigen::MatrixXd::Identity(n, n));
        gram.push_back(g);
        continue;
      }
      Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success) {
        throw RankDeficientError("BasisSpec: degree " + std::to_string(m) + " functions are not independent");
      }
      const Eigen::MatrixXd lower = llt.matrixL();
      transform.push_back(lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n)));
      gram.push_back(Eigen::MatrixXd::Identity(n, n));
    }
  }
};

namespace {

/// Rank of the degree-m basis and of its squares on an exact grid.
bool zonal_level_is_generic(int d, int m, const std::vector<Point>& poles) {
  if (m == 0) return true;
  const double lambda = 0.5 * d - 1.0;
  const SphereGrid grid = sphere_grid(d, 4 * m + 2);
  std::vector<SphereFunction> plain;
  std::vector<SphereFunction> squares;
  for (const Point& zeta : poles) {
    plain.push_back([=](const Point& x) { return gegenbauer(m, lambda, x.dot(zeta)); });
    squares.push_back([=](const Point& x) {
      const double v = gegenbauer(m, lambda, x.dot(zeta));
      return v * v;
    });
  }
  const auto n = static_cast<int>(poles.size());
  return gram_rank(plain, grid).rank == n && gram_rank(squares, grid).rank == n;
}

}  // namespace

BasisSpec BasisSpec::fourier2d() {
  auto impl = std::make_shared<Impl>();
  impl->kind = BasisKind::Fourier2D;
  impl->dim = 2;
  impl->max_degree = -1;
  return BasisSpec(std::move(impl));
}

BasisSpec BasisSpec::zonal(int d, int max_degree, std::vector<std::vector<Point>> poles, bool orthonormalize) {
  if (d < 3) throw DomainError("BasisSpec::zonal: zonal bases need d >= 3");
  if (max_degree < 0) throw DomainError("BasisSpec::zonal: negative max_degree");
  auto impl = std::make_shared<Impl>();
  impl->kind = BasisKind::Zonal;
  impl->dim = d;
  impl->max_degree = max_degree;
  if (poles.empty()) {
    // Regenerate level by level until every degree is a generic system.
    for (int m = 0; m <= max_degree; ++m) {
      for (int shift = 0;; ++shift) {
        auto candidate = default_zonal_poles(d, max_degree, shift);
        if (zonal_level_is_generic(d, m, candidate[m])) {
          poles.push_back(std::move(candidate[m]));
          break;
        }
        if (shift > 16) throw RankDeficientError("BasisSpec::zonal: could not find generic poles");
      }
    }
  }
  if (static_cast<int>(poles.size()) < max_degree + 1) {
    throw DomainError("BasisSpec::zonal: pole table covers fewer degrees than max_degree");
  }
  poles.resize(max_degree + 1);
  for (int m = 0; m <= max_degree; ++m) {
    if (static_cast<std::int64_t>(poles[m].size()) != harmonic_dim(d, m)) {
      throw DomainError("BasisSpec::zonal: degree " + std::to_string(m) + " needs " +
                        std::to_string(harmonic_dim(d, m)) + " poles");
    }
    for (const Point& p : poles[m]) {
      if (p.size() != d) throw DomainError("BasisSpec::zonal: pole dimension mismatch");
      require_unit(p, "BasisSpec::zonal pole");
    }
    if ((poles[m][0] - poles[0][0]).norm() > 1e-12) {
      throw DomainError("BasisSpec::zonal: the first pole must be the same for every degree");
    }
  }
  impl->poles = std::move(poles);
  impl->finalize(orthonormalize);
  return BasisSpec(std::move(impl));
}

BasisSpec BasisSpec::palpha(int d, int max_degree, bool orthonormalize) {
  if (d < 3) throw DomainError("BasisSpec::palpha: unsupported basis for d = " + std::to_string(d));
  if (max_degree < 0) throw DomainError("BasisSpec::palpha: negative max_degree");
  auto impl = std::make_shared<Impl>();
  impl->kind = BasisKind::PAlpha;
  impl->dim = d;
  impl->max_degree = max_degree;
  for (int m = 0; m <= max_degree; ++m) {
    impl->indices.push_back(p_basis_indices(d, m));
    std::vector<RationalPolynomial> exact;
    std::vector<RealPolynomial> real;
    for (const Exponent& alpha : impl->indices.back()) {
      exact.push_back(p_alpha(alpha, d));
      real.push_back(to_real(exact.back()));
    }
    impl->exact.push_back(std::move(exact));
    impl->real.push_back(std::move(real));
  }
  impl->finalize(orthonormalize);
  return BasisSpec(std::move(impl));
}

BasisKind BasisSpec::kind() const noexcept { return impl_->kind; }
int BasisSpec::dim() const noexcept { return impl_->dim; }
int BasisSpec::max_degree() const noexcept { return impl_->max_degree; }
bool BasisSpec::orthonormalized() const noexcept { return impl_->orthonormalized; }

void BasisSpec::check_degree(int m) const {
  if (m < 0) throw DomainError("BasisSpec: negative degree");
  if (impl_->max_degree >= 0 && m > impl_->max_degree) {
    throw DomainError("BasisSpec: degree " + std::to_string(m) + " exceeds the basis coverage " +
                      std::to_string(impl_->max_degree));
  }
}

void BasisSpec::eval_degree_real(int m, const Point& theta, std::span<double> out) const {
  if (!is_real()) throw DomainError("BasisSpec::eval_degree_real: basis is complex valued");
  check_degree(m);
  const auto n = static_cast<std::size_t>(size(m));
  if (out.size() != n) throw DomainError("BasisSpec::eval_degree_real: output size mismatch");
  if (theta.size() != dim()) throw DomainError("BasisSpec: point dimension mismatch");
  if (!impl_->orthonormalized) {
    impl_->eval_raw(m, theta, out);
    return;
  }
  std::vector<double> raw(n);
  impl_->eval_raw(m, theta, raw);
  const Eigen::Map<const Eigen::VectorXd> r(raw.data(), static_cast<Eigen::Index>(n));
  Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n)) = impl_->transform[m] * r;
}

void BasisSpec::eval_degree(int m, const Point& theta, std::span<Complex> out) const {
  check_degree(m);
  if (impl_->kind == BasisKind::Fourier2D) {
    if (theta.size() != 2) throw DomainError("BasisSpec: point dimension mismatch");
    if (out.size() != static_cast<std::size_t>(size(m))) throw DomainError("BasisSpec::eval_degree: size mismatch");
    if (m == 0) {
      out[0] = 1.0;
      return;
    }
    const double t = std::atan2(theta(1), theta(0));
    out[0] = std::polar(1.0, m * t);
    out[1] = std::polar(1.0, -m * t);
    return;
  }
  std::vector<double> values(out.size());
  eval_degree_real(m, theta, values);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = values[j];
}

Complex BasisSpec::eval(int m, int j, const Point& theta) const {
  check_degree(m);
  const std::int64_t n = size(m);
  if (j < 1 || j > n) {
    throw DomainError("BasisSpec::eval: index " + std::to_string(j) + " out of range 1.." + std::to_string(n));
  }
  std::vector<Complex> values(static_cast<std::size_t>(n));
  eval_degree(m, theta, values);
  return values[static_cast<std::size_t>(j - 1)];
}

const Eigen::MatrixXd& BasisSpec::gram(int m) const {
  check_degree(m);
  if (impl_->kind == BasisKind::Fourier2D) {
    static const Eigen::MatrixXd kOne = Eigen::MatrixXd::Identity(1, 1);
    static const Eigen::MatrixXd kTwo = Eigen::MatrixXd::Identity(2, 2);
    return m == 0 ? kOne : kTwo;
  }
  return impl_->gram[m];
}

const std::vector<Point>& BasisSpec::poles(int m) const {
  static const std::vector<Point> kNone;
  if (impl_->kind != BasisKind::Zonal) return kNone;
  check_degree(m);
  return impl_->poles[m];
}

const std::vector<Exponent>& BasisSpec::indices(int m) const {
  if (impl_->kind != BasisKind::PAlpha) throw DomainError("BasisSpec::indices: not a p_alpha basis");
  check_degree(m);
  return impl_->indices[m];
}

const std::vector<RationalPolynomial>& BasisSpec::polynomials(int m) const {
  if (impl_->kind != BasisKind::PAlpha) throw DomainError("BasisSpec::polynomials: not a p_alpha basis");
  check_degree(m);
  return impl_->exact[m];
}

bool BasisSpec::same_functions(const BasisSpec& other) const {
  if (impl_ == other.impl_) return true;
  if (kind() != other.kind() || dim() != other.dim() || orthonormalized() != other.orthonormalized()) return false;
  if (kind() != BasisKind::Zonal) return true;
  const int common = std::min(max_degree(), other.max_degree());
  for (int m = 0; m <= common; ++m) {
    for (std::size_t j = 0; j < impl_->poles[m].size(); ++j) {
      if ((impl_->poles[m][j] - other.impl_->poles[m][j]).norm() > 1e-12) return false;
    }
  }
  return true;
}

GramRank gram_rank(std::span<const SphereFunction> functions, const SphereGrid& grid, double rank_tol) {
  const auto rows = static_cast<Eigen::Index>(grid.size());
  const auto cols = static_cast<Eigen::Index>(functions.size());
  GramRank result;
  if (cols == 0) return result;
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index q = 0; q < rows; ++q) {
    const double sw = std::sqrt(grid.weights[q]);
    for (Eigen::Index i = 0; i < cols; ++i) a(q, i) = sw * functions[i](grid.nodes[q]);
  }
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double n = a.col(i).norm();
    if (n > 0.0) a.col(i) /= n;
  }
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double g = s(i) * s(i);
    result.singular_values.push_back(g);
    if (g > rank_tol * top) ++result.rank;
  }
  result.min_singular_value = result.singular_values.empty() ? 0.0 : result.singular_values.back();
  return result;
}

}  // namespace herglotz
