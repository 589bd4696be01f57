#include "herglotz/extract.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "herglotz/quadrature.hpp"
#include "herglotz/specfun.hpp"

namespace herglotz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Chebyshev degree (in s = r^2) of the profile fit used by Taylor matching.
constexpr int kTaylorDegree = 12;
/// Terms of the product series summed when re-expanding a pair.
constexpr int kProductTerms = 96;

double legendre(int m, double t) { return gegenbauer(m, 0.5, t); }

/// (2l+1)/2 int_{-1}^{1} P_m P_n P_l dt.
double legendre_linearization(int m, int n, int l) {
  const QuadratureRule rule = gauss_legendre((m + n + l) / 2 + 2);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    total += rule.weights[i] * legendre(m, t) * legendre(n, t) * legendre(l, t);
  }
  return 0.5 * (2 * l + 1) * total;
}

double pair_weight(int m, int n, int order, int d) {
  const double w = m == n ? 1.0 : 2.0;
  return d == 2 ? w : w * legendre_linearization(m, n, order);
}

struct Solved {
  Eigen::MatrixXd x;  // columns: right-hand sides
  double condition = 0.0;
  int rank = 0;
  Eigen::VectorXd null_direction;
};

/// Column-normalized QR least squares plus an SVD condition estimate.
Solved solve_normalized(const Eigen::MatrixXd& a, const Eigen::MatrixXd& rhs) {
  Solved out;
  Eigen::VectorXd scale(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double n = a.col(j).norm();
    scale(j) = n > 0.0 ? n : 1.0;
  }
  const Eigen::MatrixXd an = a * scale.cwiseInverse().asDiagonal();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(an, Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  out.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  out.rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-13 * s(0)) ++out.rank;
  }
  out.null_direction = svd.matrixV().col(s.size() - 1);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(an);
  out.x = scale.cwiseInverse().asDiagonal() * qr.solve(rhs);
  return out;
}

std::string describe_pairs(const std::vector<std::pair<int, int>>& pairs, const Eigen::VectorXd& null_direction) {
  std::ostringstream os;
  const double top = null_direction.cwiseAbs().maxCoeff();
  bool first = true;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (std::abs(null_direction(static_cast<Eigen::Index>(p))) < 0.1 * top) continue;
    os << (first ? "" : ", ") << "(" << pairs[p].first << "," << pairs[p].second << ")";
    first = false;
  }
  return os.str();
}

Eigen::MatrixXd split(const std::vector<Complex>& v) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = v[i].real();
    out(static_cast<Eigen::Index>(i), 1) = v[i].imag();
  }
  return out;
}

/// Chebyshev interpolation coefficients of f on [-1, 1] at degree k.
Eigen::VectorXd chebyshev_interpolant(int degree, const std::function<double(double)>& f) {
  const int n = degree + 1;
  std::vector<double> x(n);
  std::vector<double> fx(n);
  for (int i = 0; i < n; ++i) {
    x[i] = std::cos(std::numbers::pi * (i + 0.5) / n);
    fx[i] = f(x[i]);
  }
  Eigen::VectorXd c(n);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += fx[i] * std::cos(j * std::numbers::pi * (i + 0.5) / n);
    c(j) = 2.0 * acc / n;
  }
  c(0) *= 0.5;
  return c;
}

void chebyshev_row(double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = t;
  for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

void check_profile(const RadialProfile& profile) {
  if (profile.radii.size() != profile.values.size()) throw DomainError("radial_unmix: radii/value count mismatch");
  for (std::size_t i = 0; i < profile.radii.size(); ++i) {
    if (!(profile.radii[i] > 0.0)) throw DomainError("radial_unmix: radii must be positive (no r = 0 node)");
    if (i > 0 && !(profile.radii[i] > profile.radii[i - 1])) {
      throw DomainError("radial_unmix: radii must be strictly increasing");
    }
  }
}

}  // namespace

Point MagnitudeGrid::node(std::size_t k) const {
  const auto& a = angles.at(k);
  if (dim == 2) return circle_point(a.at(0));
  Point p(3);
  const double s = std::sin(a.at(0));
  p << s * std::cos(a.at(1)), s * std::sin(a.at(1)), std::cos(a.at(0));
  return p;
}

std::vector<double> chebyshev_radii(int count, double radius) {
  if (count < 1) throw DomainError("chebyshev_radii: need at least one node");
  if (!(radius > 0.0)) throw DomainError("chebyshev_radii: radius must be positive");
  const double lo = 0.05 * radius;
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) {
    const double x = std::cos(std::numbers::pi * (count - i - 0.5) / count);
    r[i] = lo + (radius - lo) * 0.5 * (x + 1.0);
  }
  return r;
}

MagnitudeGrid sample_magnitude(const HerglotzField& u, int radial_nodes, int angular_nodes, double radius) {
  if (u.dim() != 2 && u.dim() != 3) throw DomainError("sample_magnitude: grids are available for d = 2, 3");
  if (angular_nodes < 1) throw DomainError("sample_magnitude: need angular nodes");
  MagnitudeGrid grid;
  grid.dim = u.dim();
  grid.radii = chebyshev_radii(radial_nodes, radius);
  const SphereGrid sphere = sphere_grid(u.dim(), angular_nodes);
  grid.angles = sphere.angles;

  const int top = u.max_degree();
  std::vector<std::vector<Complex>> parts(sphere.size(), std::vector<Complex>(top + 1));
  for (std::size_t k = 0; k < sphere.size(); ++k) {
    for (int m = 0; m <= top; ++m) parts[k][m] = angular_part(u, m, sphere.nodes[k]);
  }
  grid.values.reserve(grid.radii.size() * sphere.size());
  for (double r : grid.radii) {
    std::vector<double> f(top + 1);
    for (int m = 0; m <= top; ++m) f[m] = radial_factor(m, u.dim(), r);
    for (std::size_t k = 0; k < sphere.size(); ++k) {
      Complex value = 0.0;
      for (int m = 0; m <= top; ++m) value += f[m] * parts[k][m];
      grid.values.push_back(kTwoPi * std::norm(value));
    }
  }
  return grid;
}

namespace {

std::vector<RadialProfile> decompose_circle(const MagnitudeGrid& grid) {
  const std::size_t n = grid.angular_count();
  if (n == 0) throw DomainError("angular_decompose: empty grid");
  const double t0 = grid.angles[0].at(0);
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = t0 + kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    if (std::abs(grid.angles[k].at(0) - expected) > 1e-9) {
      throw DomainError("angular_decompose: angular grid is not uniform (node " + std::to_string(k) + ")");
    }
  }
  std::vector<RadialProfile> profiles;
  for (std::size_t q = 0; q <= n / 2; ++q) {
    RadialProfile p;
    p.dim = 2;
    p.order = static_cast<int>(q);
    p.radii = grid.radii;
    for (std::size_t i = 0; i < grid.radii.size(); ++i) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += grid.at(i, k) * std::polar(1.0, -static_cast<double>(q) * grid.angles[k][0]);
      }
      p.values.push_back(acc / static_cast<double>(n));
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

struct Rings {
  std::vector<double> t;
  std::vector<double> weights;
  /// values[i][j]: radius i, ring j (azimuthal mean)
  std::vector<std::vector<double>> values;
};

/// Groups a d = 3 grid by polar angle and checks the data is zonal.
Rings zonal_rings(const MagnitudeGrid& grid) {
  std::vector<double> polar;
  for (const auto& a : grid.angles) polar.push_back(a.at(0));
  std::vector<double> distinct = polar;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 distinct.end());
  const int rings = static_cast<int>(distinct.size());
  const QuadratureRule rule = gauss_legendre(rings);
  Rings out;
  for (int j = 0; j < rings; ++j) {
    // Gauss nodes ascend in t, so polar angles descend.
    const double t = std::cos(distinct[rings - 1 - j]);
    if (std::abs(t - rule.nodes[j]) > 1e-9) {
      throw DomainError("angular_decompose: polar nodes are not Gauss–Legendre nodes");
    }
    out.t.push_back(rule.nodes[j]);
    out.weights.push_back(rule.weights[j]);
  }
  double scale = 0.0;
  for (double v : grid.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < grid.radii.size(); ++i) {
    std::vector<double> lo(rings, std::numeric_limits<double>::infinity());
    std::vector<double> hi(rings, -std::numeric_limits<double>::infinity());
    std::vector<double> sum(rings, 0.0);
    std::vector<int> count(rings, 0);
    for (std::size_t k = 0; k < grid.angular_count(); ++k) {
      const auto it = std::lower_bound(distinct.begin(), distinct.end(), polar[k] - 1e-12);
      const int j = rings - 1 - static_cast<int>(it - distinct.begin());
      const double v = grid.at(i, k);
      lo[j] = std::min(lo[j], v);
      hi[j] = std::max(hi[j], v);
      sum[j] += v;
      ++count[j];
    }
    std::vector<double> row(rings);
    for (int j = 0; j < rings; ++j) {
      if (hi[j] - lo[j] > 1e-9 * std::max(1.0, scale)) {
        throw DomainError("angular_decompose: d = 3 data is not zonal (varies with azimuth)");
      }
      row[j] = sum[j] / count[j];
    }
    out.values.push_back(std::move(row));
  }
  return out;
}

std::vector<RadialProfile> decompose_zonal(const MagnitudeGrid& grid) {
  const Rings rings = zonal_rings(grid);
  std::vector<RadialProfile> profiles;
  for (std::size_t l = 0; l < rings.t.size(); ++l) {
    RadialProfile p;
    p.dim = 3;
    p.order = static_cast<int>(l);
    p.radii = grid.radii;
    for (const auto& row : rings.values) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rings.t.size(); ++j) acc += rings.weights[j] * row[j] * legendre(p.order, rings.t[j]);
      p.values.emplace_back(0.5 * (2 * p.order + 1) * acc);
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

}  // namespace

std::vector<RadialProfile> angular_decompose(const MagnitudeGrid& grid) {
  if (grid.values.size() != grid.radii.size() * grid.angular_count()) {
    throw DomainError("angular_decompose: value count does not match the grid");
  }
  if (grid.dim == 2) return decompose_circle(grid);
  if (grid.dim == 3) return decompose_zonal(grid);
  throw DomainError("angular_decompose: unsupported dimension");
}

std::string_view to_string(UnmixMethod method) {
  return method == UnmixMethod::LeastSquares ? "lsq" : "taylor";
}

std::vector<std::pair<int, int>> compatible_pairs(int order, int max_degree, int d) {
  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m <= max_degree; ++m) {
    for (int n = m; n <= max_degree; ++n) {
      const bool ok = d == 2 ? (m + n == order || n - m == order)
                             : (n - m <= order && order <= m + n && (m + n - order) % 2 == 0);
      if (ok) pairs.emplace_back(m, n);
    }
  }
  return pairs;
}

UnmixReport radial_unmix(const RadialProfile& profile, int max_degree, UnmixMethod method) {
  check_profile(profile);
  if (profile.dim != 2 && profile.dim != 3) throw DomainError("radial_unmix: unsupported dimension");
  const int d = profile.dim;
  const int q = profile.order;
  UnmixReport rep;
  rep.order = q;
  rep.pairs = compatible_pairs(q, max_degree, d);
  const auto rows = static_cast<Eigen::Index>(profile.radii.size());
  const auto cols = static_cast<Eigen::Index>(rep.pairs.size());
  if (cols == 0) {
    for (const Complex& v : profile.values) rep.residual = std::max(rep.residual, std::abs(v));
    rep.condition = 1.0;
    return rep;
  }
  if (rows < cols) {
    throw RankDeficientError("radial_unmix: " + std::to_string(rows) + " radial nodes cannot separate " +
                             std::to_string(cols) + " pairs at order " + std::to_string(q));
  }

  Eigen::MatrixXd design(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double r = profile.radii[i];
    for (Eigen::Index p = 0; p < cols; ++p) {
      const auto [m, n] = rep.pairs[p];
      design(i, p) = kTwoPi * pair_weight(m, n, q, d) * radial_factor(m, d, r) * radial_factor(n, d, r);
    }
  }
  const Eigen::MatrixXd rhs = split(profile.values);
  const Solved ls = solve_normalized(design, rhs);
  rep.condition = ls.condition;
  if (ls.rank < cols) {
    throw RankDeficientError("radial_unmix: order " + std::to_string(q) + " design is rank deficient (condition " +
                             std::to_string(ls.condition) + "); colliding pairs " +
                             describe_pairs(rep.pairs, ls.null_direction));
  }
  if (ls.condition > kConditionWarning) {
    rep.warnings.push_back("order " + std::to_string(q) + ": condition estimate " + std::to_string(ls.condition));
  }

  Eigen::MatrixXd x = ls.x;
  if (method == UnmixMethod::Taylor) {
    // Profile ~ r^q sum_k d_k T_k(2 s / L - 1), s = r^2, fitted by least squares.
    const double span = profile.radii.back() * profile.radii.back();
    const int degree = std::min<int>(kTaylorDegree, static_cast<int>(rows) - 1);
    Eigen::MatrixXd vander(rows, degree + 1);
    std::vector<double> row(degree + 1);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double r = profile.radii[i];
      chebyshev_row(2.0 * r * r / span - 1.0, row);
      for (int k = 0; k <= degree; ++k) vander(i, k) = std::pow(r, q) * row[k];
    }
    const Eigen::MatrixXd fitted = solve_normalized(vander, rhs).x;

    // Each pair: f_m f_n = r^{m+n} sum_k c_k s^k = r^q s^{(m+n-q)/2} sum_k c_k s^k.
    const double alpha = 0.5 * (d - 2);
    Eigen::MatrixXd series(degree + 1, cols);
    for (Eigen::Index p = 0; p < cols; ++p) {
      const auto [m, n] = rep.pairs[p];
      const int offset = (m + n - q) / 2;
      const std::vector<double> c = bessel_product_coefficients(m, n, alpha, kProductTerms);
      const double w = kTwoPi * pair_weight(m, n, q, d);
      series.col(p) = chebyshev_interpolant(degree, [&](double t) {
        const double s = 0.5 * (t + 1.0) * span;
        long double acc = 0.0L;
        long double power = 1.0L;
        for (int k = 0; k < kProductTerms; ++k) {
          acc += c[k] * power;
          power *= s;
        }
        return static_cast<double>(w * acc * std::pow(static_cast<long double>(s), offset));
      });
    }
    x = solve_normalized(series, fitted).x;
  }

  const Eigen::MatrixXd resid = design * x - rhs;
  for (Eigen::Index i = 0; i < rows; ++i) rep.residual = std::max(rep.residual, std::hypot(resid(i, 0), resid(i, 1)));
  for (Eigen::Index p = 0; p < cols; ++p) rep.coefficients.emplace_back(x(p, 0), x(p, 1));
  return rep;
}

namespace {

MagnitudeData extract_circle(const MagnitudeGrid& grid, int max_degree, UnmixMethod method, ExtractReport& rep) {
  if (grid.angular_count() < static_cast<std::size_t>(4 * max_degree + 1)) {
    throw DomainError("extract: need at least 4M+1 angular nodes, got " + std::to_string(grid.angular_count()));
  }
  const std::vector<RadialProfile> profiles = angular_decompose(grid);
  MagnitudeData data = MagnitudeData::zero(2, max_degree);
  double worst = 0.0;
  for (const RadialProfile& profile : profiles) {
    if (profile.order > 2 * max_degree) {
      for (const Complex& v : profile.values) worst = std::max(worst, std::abs(v));
      continue;
    }
    const UnmixReport u = radial_unmix(profile, max_degree, method);
    worst = std::max(worst, u.residual);
    rep.max_condition = std::max(rep.max_condition, u.condition);
    rep.warnings.insert(rep.warnings.end(), u.warnings.begin(), u.warnings.end());
    for (std::size_t p = 0; p < u.pairs.size(); ++p) {
      const auto [m, n] = u.pairs[p];
      TrigPoly& trig = data.pair(m, n).trig;
      const int q = profile.order;
      if (q == 0) {
        trig[0] = u.coefficients[p].real();
      } else {
        trig[q] = u.coefficients[p];
        trig[-q] = std::conj(u.coefficients[p]);
      }
    }
  }
  double scale = 0.0;
  for (double v : grid.values) scale = std::max(scale, std::abs(v));
  rep.relative_residual = scale > 0.0 ? worst / scale : worst;
  return data;
}

MagnitudeData extract_zonal(const MagnitudeGrid& grid, int max_degree, ExtractReport& rep) {
  const Rings rings = zonal_rings(grid);
  if (rings.t.size() < static_cast<std::size_t>(max_degree + 1)) {
    throw DomainError("extract: need at least M+1 polar rings for d = 3");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m <= max_degree; ++m) {
    for (int n = m; n <= max_degree; ++n) pairs.emplace_back(m, n);
  }
  const auto nr = static_cast<Eigen::Index>(grid.radii.size());
  const auto nt = static_cast<Eigen::Index>(rings.t.size());
  const auto cols = static_cast<Eigen::Index>(pairs.size());
  if (nr * nt < cols) throw DomainError("extract: too few samples for the pair count");

  Eigen::MatrixXd design(nr * nt, cols);
  Eigen::MatrixXd rhs(nr * nt, 1);
  for (Eigen::Index i = 0; i < nr; ++i) {
    std::vector<double> f(max_degree + 1);
    for (int m = 0; m <= max_degree; ++m) f[m] = radial_factor(m, 3, grid.radii[i]);
    for (Eigen::Index j = 0; j < nt; ++j) {
      const double t = rings.t[j];
      for (Eigen::Index p = 0; p < cols; ++p) {
        const auto [m, n] = pairs[p];
        const double w = m == n ? 1.0 : 2.0;
        design(i * nt + j, p) = kTwoPi * w * legendre(m, t) * legendre(n, t) * f[m] * f[n];
      }
      rhs(i * nt + j, 0) = rings.values[i][j];
    }
  }
  const Solved ls = solve_normalized(design, rhs);
  rep.max_condition = ls.condition;
  if (ls.rank < cols) {
    throw RankDeficientError("extract: joint d = 3 design is rank deficient; colliding pairs " +
                             describe_pairs(pairs, ls.null_direction));
  }
  if (ls.condition > kConditionWarning) rep.warnings.push_back("joint condition estimate " + std::to_string(ls.condition));
  const double scale = rhs.cwiseAbs().maxCoeff();
  const double worst = (design * ls.x - rhs).cwiseAbs().maxCoeff();
  rep.relative_residual = scale > 0.0 ? worst / scale : worst;

  MagnitudeData data = MagnitudeData::zero(3, max_degree);
  const SphereGrid target = data.grid();
  for (Eigen::Index p = 0; p < cols; ++p) {
    const auto [m, n] = pairs[p];
    auto& samples = data.pair(m, n).samples;
    for (std::size_t k = 0; k < target.size(); ++k) {
      const double t = target.nodes[k](2);
      samples[k] = ls.x(p, 0) * legendre(m, t) * legendre(n, t);
    }
  }
  return data;
}

}  // namespace

MagnitudeData extract_magnitude_data(const MagnitudeGrid& grid, int max_degree, UnmixMethod method,
                                     ExtractReport* report) {
  if (max_degree < 0) throw DomainError("extract: negative max_degree");
  if (grid.values.size() != grid.radii.size() * grid.angular_count()) {
    throw DomainError("extract: value count does not match the grid");
  }
  ExtractReport local;
  ExtractReport& rep = report ? *report : local;
  rep = ExtractReport{};
  if (grid.dim == 2) return extract_circle(grid, max_degree, method, rep);
  if (grid.dim == 3) {
    if (method == UnmixMethod::Taylor) throw DomainError("extract: Taylor matching is implemented for d = 2 only");
    return extract_zonal(grid, max_degree, rep);
  }
  throw DomainError("extract: unsupported dimension");
}

}  // namespace herglotz
