#include "herglotz/retrieve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace herglotz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kBeamWidth = 8;

double data_scale(const MagnitudeData& data) { return std::max(1.0, data.max_abs()); }

/// Full product U_m conj(U_n) for Fourier2D degree vectors.
TrigPoly product_trig(const Eigen::VectorXcd& am, int m, const Eigen::VectorXcd& an, int n) {
  auto terms = [](const Eigen::VectorXcd& a, int deg) {
    std::vector<std::pair<int, Complex>> t{{deg, a(0)}};
    if (deg > 0) t.emplace_back(-deg, a(1));
    return t;
  };
  TrigPoly out;
  for (const auto& [fm, cm] : terms(am, m)) {
    for (const auto& [fn, cn] : terms(an, n)) out[fm - fn] += cm * std::conj(cn);
  }
  return out;
}

Complex lookup(const TrigPoly& p, int k) {
  const auto it = p.find(k);
  return it == p.end() ? Complex(0.0) : it->second;
}

double trig_deviation(const TrigPoly& a, const TrigPoly& b) {
  double worst = 0.0;
  for (const auto& [k, c] : a) worst = std::max(worst, std::abs(c - lookup(b, k)));
  for (const auto& [k, c] : b) worst = std::max(worst, std::abs(c - lookup(a, k)));
  return worst;
}

Eigen::VectorXcd mode_vector(int m, Complex plus, Complex minus) {
  Eigen::VectorXcd v(m == 0 ? 1 : 2);
  v(0) = plus;
  if (m > 0) v(1) = minus;
  return v;
}

SolutionClass classify_solution(const HerglotzField& u) {
  const Verdict v = trivially_equivalent(u, conjugate_field(u)).verdict;
  return (v == Verdict::Identity || v == Verdict::Both) ? SolutionClass::Coincide : SolutionClass::Distinct;
}

double forward_residual(const HerglotzField& u, const MagnitudeData& data) {
  const HerglotzField padded = u.padded(data.max_degree);
  return data_deviation(magnitude_coeffs(padded, data.dim == 2 ? 0 : data.grid_resolution), data);
}

void accept_or_throw(RetrievalResult& result, const MagnitudeData& data) {
  result.forward_residual = forward_residual(result.field, data);
  const double threshold = kAcceptTolerance * data_scale(data);
  if (result.forward_residual > threshold) {
    throw InconsistentDataError("inconsistent magnitude data: forward residual " +
                                    std::to_string(result.forward_residual) + " exceeds " + std::to_string(threshold),
                                result.forward_residual);
  }
}

// ---------------------------------------------------------------------------
// Nonvanishing mean, shared by d = 2 (real trigonometric basis) and d >= 3.

struct SampledProblem {
  int max_degree = 0;
  /// phi[n]: nodes x N_n real basis samples.
  std::vector<Eigen::MatrixXd> phi;
  /// Re c_{m,n} samples, index by MagnitudeData::pair_index.
  std::vector<Eigen::VectorXd> pairs;
  const Eigen::VectorXd& pair(int m, int n) const {
    return pairs[MagnitudeData::pair_index(std::min(m, n), std::max(m, n), max_degree)];
  }
};

struct RealImag {
  std::vector<Eigen::VectorXd> re;
  std::vector<Eigen::VectorXd> im;
};

Eigen::VectorXd lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.completeOrthogonalDecomposition().solve(b);
}

/// Rank-one symmetric fit: find b with (Phi b)^2 ~ target.
Eigen::VectorXd rank_one_fit(const Eigen::MatrixXd& phi, const Eigen::VectorXd& target) {
  const Eigen::Index k = phi.cols();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> index;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) index.emplace_back(i, j);
  }
  Eigen::MatrixXd products(phi.rows(), static_cast<Eigen::Index>(index.size()));
  for (std::size_t c = 0; c < index.size(); ++c) {
    const auto [i, j] = index[c];
    products.col(static_cast<Eigen::Index>(c)) = phi.col(i).cwiseProduct(phi.col(j));
  }
  const Eigen::VectorXd sym = lsq(products, target);
  Eigen::MatrixXd b_mat = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t c = 0; c < index.size(); ++c) {
    const auto [i, j] = index[c];
    const double v = sym(static_cast<Eigen::Index>(c));
    if (i == j) {
      b_mat(i, i) = v;
    } else {
      b_mat(i, j) = 0.5 * v;
      b_mat(j, i) = 0.5 * v;
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b_mat);
  const Eigen::Index top = k - 1;
  Eigen::VectorXd b = std::sqrt(std::max(0.0, eig.eigenvalues()(top))) * eig.eigenvectors().col(top);

  // Gauss–Newton on (Phi b)^2 = target.
  for (int iter = 0; iter < 30; ++iter) {
    const Eigen::VectorXd y = phi * b;
    const Eigen::VectorXd r = y.cwiseProduct(y) - target;
    const Eigen::MatrixXd jac = 2.0 * y.asDiagonal() * phi;
    const Eigen::VectorXd step = lsq(jac, r);
    b -= step;
    if (step.norm() <= 1e-15 * std::max(1.0, b.norm())) break;
  }
  // Either sign is valid (u versus its conjugate); pick the first significant entry positive.
  const double big = b.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (std::abs(b(i)) > 1e-6 * big) {
      if (b(i) < 0.0) b = -b;
      break;
    }
  }
  return b;
}

RealImag solve_mean(const SampledProblem& prob, double scale) {
  const int top = prob.max_degree;
  const double active = kActiveThreshold * scale;
  const Eigen::VectorXd& d00 = prob.pair(0, 0);
  const double phi0 = prob.phi[0](0, 0);
  const double s00 = d00.mean();
  if (!(s00 > active)) {
    throw BranchNotApplicableError("mean branch: Re c_{0,0} vanishes (mean is zero); use the zero-mean or sparse solver");
  }
  const double rho = std::sqrt(s00) / std::abs(phi0);

  RealImag out;
  out.re.resize(top + 1);
  out.im.resize(top + 1);
  out.re[0] = Eigen::VectorXd::Constant(1, rho * (phi0 > 0 ? 1.0 : -1.0));
  out.im[0] = Eigen::VectorXd::Zero(1);
  std::vector<Eigen::VectorXd> x(top + 1);
  x[0] = prob.phi[0] * out.re[0];
  for (int n = 1; n <= top; ++n) {
    out.re[n] = lsq(prob.phi[n], prob.pair(0, n) / (rho * std::abs(phi0)));
    x[n] = prob.phi[n] * out.re[n];
    out.im[n] = Eigen::VectorXd::Zero(prob.phi[n].cols());
  }

  // Y_m Y_n = Re c_{m,n} - X_m X_n.
  auto excess = [&](int m, int n) -> Eigen::VectorXd { return prob.pair(m, n) - x[m].cwiseProduct(x[n]); };
  int m1 = -1;
  for (int n = 1; n <= top; ++n) {
    if (excess(n, n).cwiseAbs().maxCoeff() > active) {
      m1 = n;
      break;
    }
  }
  if (m1 < 0) return out;
  out.im[m1] = rank_one_fit(prob.phi[m1], excess(m1, m1));
  const Eigen::VectorXd y1 = prob.phi[m1] * out.im[m1];
  for (int n = m1 + 1; n <= top; ++n) {
    const Eigen::MatrixXd cols = y1.asDiagonal() * prob.phi[n];
    out.im[n] = lsq(cols, excess(m1, n));
  }
  return out;
}

SampledProblem circle_problem(const MagnitudeData& data) {
  SampledProblem prob;
  prob.max_degree = data.max_degree;
  const int nodes = magnitude_grid_resolution(data.max_degree);
  std::vector<double> theta(nodes);
  for (int k = 0; k < nodes; ++k) theta[k] = kTwoPi * k / nodes;
  for (int n = 0; n <= data.max_degree; ++n) {
    Eigen::MatrixXd phi(nodes, n == 0 ? 1 : 2);
    for (int k = 0; k < nodes; ++k) {
      if (n == 0) {
        phi(k, 0) = 1.0;
      } else {
        phi(k, 0) = std::cos(n * theta[k]);
        phi(k, 1) = std::sin(n * theta[k]);
      }
    }
    prob.phi.push_back(std::move(phi));
  }
  for (const PairData& p : data.pairs) {
    Eigen::VectorXd v(nodes);
    for (int k = 0; k < nodes; ++k) v(k) = eval_trig(p.trig, theta[k]);
    prob.pairs.push_back(std::move(v));
  }
  return prob;
}

SampledProblem sphere_problem(const MagnitudeData& data, const BasisSpec& basis) {
  SampledProblem prob;
  prob.max_degree = data.max_degree;
  const SphereGrid grid = data.grid();
  const auto nodes = static_cast<Eigen::Index>(grid.size());
  for (int n = 0; n <= data.max_degree; ++n) {
    const auto count = static_cast<Eigen::Index>(basis.size(n));
    Eigen::MatrixXd phi(nodes, count);
    std::vector<double> row(static_cast<std::size_t>(count));
    for (Eigen::Index q = 0; q < nodes; ++q) {
      basis.eval_degree_real(n, grid.nodes[q], row);
      for (Eigen::Index j = 0; j < count; ++j) phi(q, j) = row[j];
    }
    prob.phi.push_back(std::move(phi));
  }
  for (const PairData& p : data.pairs) {
    if (static_cast<Eigen::Index>(p.samples.size()) != nodes) throw DomainError("retrieve: sample count mismatch");
    prob.pairs.push_back(Eigen::Map<const Eigen::VectorXd>(p.samples.data(), nodes));
  }
  return prob;
}

void check_3d(const MagnitudeData& data, const BasisSpec& basis) {
  if (data.dim < 3) throw DomainError("retrieve_3d: data must have d >= 3");
  if (basis.dim() != data.dim) throw DomainError("retrieve_3d: basis dimension mismatch");
  if (!basis.is_real()) throw DomainError("retrieve_3d: a real basis is required");
  if (basis.max_degree() < data.max_degree) throw DomainError("retrieve_3d: basis does not cover the data degree");
  if (data.grid_resolution < 2 * data.max_degree + 1) throw DomainError("retrieve_3d: data grid too coarse");
}

// ---------------------------------------------------------------------------
// Zero-mean d = 2 propagation.

struct Candidate {
  std::vector<Eigen::VectorXcd> modes;
  double residual = 0.0;
};

/// Unit z with Re(U_anchor conj(z V0)) matching data at every frequency.
std::vector<Complex> phase_solutions(const TrigPoly& w, const TrigPoly& target, int m, int n) {
  const std::vector<int> freqs = pair_frequencies(m, n);
  Eigen::MatrixXd a(2 * static_cast<Eigen::Index>(freqs.size()), 2);
  Eigen::VectorXd rhs(a.rows());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const int f = freqs[i];
    const Complex wf = lookup(w, f);
    const Complex wm = std::conj(lookup(w, -f));
    const Complex cx = 0.5 * (wf + wm);
    const Complex cy = 0.5 * Complex(0.0, 1.0) * (wm - wf);
    const Complex r = lookup(target, f);
    const auto row = static_cast<Eigen::Index>(2 * i);
    a(row, 0) = cx.real();
    a(row, 1) = cy.real();
    a(row + 1, 0) = cx.imag();
    a(row + 1, 1) = cy.imag();
    rhs(row) = r.real();
    rhs(row + 1) = r.imag();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector2d s = svd.singularValues();
  if (!(s(0) > 0.0)) return {};
  std::vector<Complex> out;
  if (s(1) > 1e-6 * s(0)) {
    const Eigen::Vector2d xy = svd.solve(rhs);
    const double len = xy.norm();
    if (std::abs(len - 1.0) < 1e-3) out.emplace_back(xy(0) / len, xy(1) / len);
    return out;
  }
  // Rank one: a line of solutions, cut with the unit circle.
  const Eigen::Vector2d u0 = svd.matrixU().col(0).dot(rhs) / s(0) * svd.matrixV().col(0);
  const Eigen::Vector2d v = svd.matrixV().col(1);
  const double b = u0.dot(v);
  const double disc = b * b - u0.squaredNorm() + 1.0;
  if (disc < -1e-6) return out;
  const double root = std::sqrt(std::max(0.0, disc));
  for (double t : {-b + root, -b - root}) {
    const Eigen::Vector2d xy = u0 + t * v;
    const double len = xy.norm();
    out.emplace_back(xy(0) / len, xy(1) / len);
    if (root == 0.0) break;
  }
  // Near tangency the square root amplifies rounding; the foot point is exact.
  if (disc < 1e-6) {
    const Eigen::Vector2d foot = u0 - b * v;
    out.emplace_back(foot(0) / foot.norm(), foot(1) / foot.norm());
  }
  return out;
}

/// Least-squares phase from the cross terms with several fixed modes; empty
/// when they do not pin it down.
std::optional<Complex> joint_phase(const std::vector<Eigen::VectorXcd>& fixed, const std::vector<int>& others,
                                   const Eigen::VectorXcd& v0, int n, const MagnitudeData& data) {
  std::vector<std::array<double, 3>> rows;
  for (int m : others) {
    const TrigPoly w = product_trig(fixed[m], m, v0, n);
    const TrigPoly& target = data.pair(m, n).trig;
    for (int f : pair_frequencies(m, n)) {
      const Complex wf = lookup(w, f);
      const Complex wm = std::conj(lookup(w, -f));
      const Complex cx = 0.5 * (wf + wm);
      const Complex cy = 0.5 * Complex(0.0, 1.0) * (wm - wf);
      const Complex r = lookup(target, f);
      rows.push_back({cx.real(), cy.real(), r.real()});
      rows.push_back({cx.imag(), cy.imag(), r.imag()});
    }
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::VectorXd rhs(a.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    a(static_cast<Eigen::Index>(i), 1) = rows[i][1];
    rhs(static_cast<Eigen::Index>(i)) = rows[i][2];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Vector2d s = svd.singularValues();
  if (!(s(1) > 1e-6 * s(0))) return std::nullopt;
  const Eigen::Vector2d xy = svd.solve(rhs);
  if (std::abs(xy.norm() - 1.0) > 1e-3) return std::nullopt;
  return Complex(xy(0), xy(1)) / xy.norm();
}

HerglotzField zero_mean_2d(const MagnitudeData& data) {
  const int top = data.max_degree;
  const double scale = data_scale(data);
  const double active = kActiveThreshold * scale;
  const double verify = kAcceptTolerance * scale;

  std::vector<int> modes;
  std::vector<PairSolutionSet> sets(top + 1);
  for (int m = 1; m <= top; ++m) {
    const TrigPoly& diag = data.pair(m, m).trig;
    const double s = lookup(diag, 0).real();
    if (!(s > active)) continue;
    sets[m] = solve_pair(s, lookup(diag, 2 * m), kAcceptTolerance);
    if (!sets[m].zero()) modes.push_back(m);
  }
  HerglotzField out(BasisSpec::fourier2d(), top);
  if (modes.empty()) return out;

  // Anchor: larger modulus on +m, real positive (fixes the phase and the
  // choice between u and its conjugate).
  const int m0 = modes.front();
  Candidate seed;
  seed.modes.assign(top + 1, Eigen::VectorXcd());
  const PairSolution& first = sets[m0].assignments.front();
  seed.modes[m0] = mode_vector(m0, first.a, first.b);
  std::vector<Candidate> beam{seed};

  for (std::size_t idx = 1; idx < modes.size(); ++idx) {
    const int n = modes[idx];
    std::vector<Candidate> next;
    for (const Candidate& cand : beam) {
      for (const PairSolution& ps : sets[n].assignments) {
        const Eigen::VectorXcd v0 = mode_vector(n, ps.a, ps.b);
        const TrigPoly w = product_trig(cand.modes[m0], m0, v0, n);
        for (const Complex z : phase_solutions(w, data.pair(m0, n).trig, m0, n)) {
          Candidate grown = cand;
          const std::vector<int> fixed(modes.begin(), modes.begin() + static_cast<long>(idx));
          auto misfit = [&](const Eigen::VectorXcd& vn) {
            double worst = 0.0;
            for (int m : fixed) worst = std::max(worst, trig_deviation(pair_trig(cand.modes[m], m, vn, n), data.pair(m, n).trig));
            return worst;
          };
          grown.modes[n] = z * v0;
          double worst = misfit(grown.modes[n]);
          if (const auto joint = joint_phase(cand.modes, fixed, v0, n, data)) {
            const double alt = misfit(*joint * v0);
            if (alt < worst) {
              grown.modes[n] = *joint * v0;
              worst = alt;
            }
          }
          if (worst > verify) continue;
          grown.residual = std::max(cand.residual, worst);
          bool duplicate = false;
          for (const Candidate& other : next) {
            double gap = (other.modes[n] - grown.modes[n]).cwiseAbs().maxCoeff();
            for (std::size_t j = 0; j < idx; ++j) {
              gap = std::max(gap, (other.modes[modes[j]] - grown.modes[modes[j]]).cwiseAbs().maxCoeff());
            }
            duplicate = duplicate || gap < 1e-9 * scale;
          }
          if (!duplicate) next.push_back(std::move(grown));
        }
      }
    }
    if (next.empty()) {
      throw InconsistentDataError("inconsistent magnitude data: no phase for mode " + std::to_string(n) +
                                      " matches the cross terms",
                                  std::numeric_limits<double>::infinity());
    }
    std::sort(next.begin(), next.end(), [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    if (next.size() > kBeamWidth) next.resize(kBeamWidth);
    beam = std::move(next);
  }

  for (int m : modes) {
    const Eigen::VectorXcd& v = beam.front().modes[m];
    out.set_fourier(m, v(0));
    out.set_fourier(-m, v(1));
  }
  return out;
}

/// Real fields sit where the classes {c u} and {c conj(u)} meet; there the
/// data is only quadratically sensitive to imaginary perturbations, so a
/// retrieved field can be ~1e-8 away from real without changing the data.
/// Among fields that reproduce the data equally well, prefer the real one.
HerglotzField prefer_self_conjugate(const HerglotzField& u, const MagnitudeData& data) {
  const HerglotzField w = conjugate_field(u);
  Complex inner = 0.0;
  for (int m = 0; m <= u.max_degree(); ++m) inner += u.coefficients()[m].dot(w.coefficients()[m]);
  if (std::abs(inner) == 0.0) return u;
  const Complex c = std::sqrt(inner / std::abs(inner));
  const HerglotzField rotated = c * u;
  const HerglotzField real = Complex(0.5) * (rotated + conjugate_field(rotated));
  const double scale = data_scale(data);
  if ((real - rotated).max_abs() > 1e-6 * scale) return u;
  const double before = forward_residual(u, data);
  const double after = forward_residual(real, data);
  return after <= 2.0 * before + 1e-13 * scale ? real : u;
}

HerglotzField mean_2d(const MagnitudeData& data) {
  const RealImag ri = solve_mean(circle_problem(data), data_scale(data));
  HerglotzField out(BasisSpec::fourier2d(), data.max_degree);
  out.set_fourier(0, Complex(ri.re[0](0), ri.im[0](0)));
  for (int n = 1; n <= data.max_degree; ++n) {
    // cos/sin coefficients alpha, beta: u^(n) = (alpha - i beta)/2, u^(-n) = (alpha + i beta)/2.
    const Complex alpha(ri.re[n](0), ri.im[n](0));
    const Complex beta(ri.re[n](1), ri.im[n](1));
    const Complex i(0.0, 1.0);
    out.set_fourier(n, 0.5 * (alpha - i * beta));
    out.set_fourier(-n, 0.5 * (alpha + i * beta));
  }
  return out;
}

RetrievalResult finish(HerglotzField field, const MagnitudeData& data, std::string branch) {
  RetrievalResult result{canonicalize(field), SolutionClass::Distinct, std::move(branch), {}, 0.0};
  accept_or_throw(result, data);
  result.solution_class = classify_solution(result.field);
  if (data.dim == 2) result.modes = classify_modes(result.field, conjugate_field(result.field));
  return result;
}

}  // namespace

PairSolutionSet solve_pair(double s, Complex p, double tol) {
  if (!(s >= 0.0)) throw DomainError("solve_pair: s must be nonnegative");
  const double ap = std::abs(p);
  const double slack = tol * std::max(1.0, s);
  if (s < 2.0 * ap - slack) {
    throw InconsistentDataError("solve_pair: s = " + std::to_string(s) + " < 2|p| = " + std::to_string(2.0 * ap),
                                2.0 * ap - s);
  }
  PairSolutionSet out;
  if (s <= 0.0 && ap <= 0.0) return out;
  // |a|^2, |b|^2 are the roots of x^2 - s x + |p|^2; small root by Vieta.
  // A discriminant at rounding level means |a| = |b|: its square root would
  // turn 1e-16 noise into 1e-8 modulus errors.
  const double raw = s * s - 4.0 * ap * ap;
  const double disc = raw <= 1e-12 * s * s ? 0.0 : std::sqrt(raw);
  const double big = 0.5 * (s + disc);
  const double small = big > 0.0 ? ap * ap / big : 0.0;
  auto particular = [&](double xa, double xb) {
    PairSolution sol;
    if (xa > 0.0) {
      sol.a = std::sqrt(xa);
      sol.b = ap > 0.0 ? std::conj(p) / sol.a : Complex(std::sqrt(xb));
    } else {
      sol.a = 0.0;
      sol.b = std::sqrt(xb);
    }
    return sol;
  };
  out.assignments.push_back(particular(big, small));
  if (big - small > slack) out.assignments.push_back(particular(small, big));
  return out;
}

std::vector<ModeType> classify_modes(const HerglotzField& reference, const HerglotzField& candidate, double tol) {
  if (reference.basis().kind() != BasisKind::Fourier2D || candidate.basis().kind() != BasisKind::Fourier2D) {
    throw DomainError("classify_modes: d = 2 Fourier fields expected");
  }
  const int top = std::max(reference.max_degree(), candidate.max_degree());
  std::vector<ModeType> out;
  for (int m = 1; m <= top; ++m) {
    ModeType t;
    t.m = m;
    const Eigen::Vector2cd x(reference.fourier(m), reference.fourier(-m));
    const Eigen::Vector2cd xc(std::conj(reference.fourier(-m)), std::conj(reference.fourier(m)));
    const Eigen::Vector2cd y(candidate.fourier(m), candidate.fourier(-m));
    const double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
    t.active = x.cwiseAbs().maxCoeff() > tol * scale;
    if (t.active) {
      auto fit = [&](const Eigen::Vector2cd& base) -> std::optional<Complex> {
        const Complex inner = base.dot(y);
        if (std::abs(inner) == 0.0) return std::nullopt;
        const Complex k = inner / std::abs(inner);
        if ((y - k * base).cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;
        return k;
      };
      t.kappa_identity = fit(x);
      t.kappa_conjugate = fit(xc);
      t.identity = t.kappa_identity.has_value();
      t.conjugate = t.kappa_conjugate.has_value();
      const double a = std::abs(x(0));
      const double b = std::abs(x(1));
      t.real_form = a > tol * scale && std::abs(a - b) <= tol * scale;
      if (t.real_form) t.theta = -0.5 * std::arg(x(1) / x(0));
    }
    out.push_back(t);
  }
  return out;
}

std::vector<ModeType> classify_modes(const MagnitudeData& data, const HerglotzField& candidate, double tol) {
  return classify_modes(retrieve_2d(data).field, candidate, tol);
}

std::string_view to_string(SolutionClass cls) {
  return cls == SolutionClass::Coincide ? "coincide" : "distinct";
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::Auto: return "auto";
    case Branch::Mean: return "mean";
    case Branch::Real: return "real";
    case Branch::Sparse: return "sparse";
  }
  return "unknown";
}

Branch branch_from_string(std::string_view name) {
  if (name == "auto") return Branch::Auto;
  if (name == "mean") return Branch::Mean;
  if (name == "real") return Branch::Real;
  if (name == "sparse") return Branch::Sparse;
  throw DomainError("unknown branch '" + std::string(name) + "'");
}

RetrievalResult retrieve_2d(const MagnitudeData& data, Branch branch) {
  if (data.dim != 2) throw DomainError("retrieve_2d: d = 2 data expected");
  if (branch == Branch::Real || branch == Branch::Sparse) {
    throw BranchNotApplicableError("retrieve_2d: branch '" + std::string(to_string(branch)) + "' applies to d >= 3");
  }
  const double scale = data_scale(data);
  const double mean_power = lookup(data.pair(0, 0).trig, 0).real();
  const bool has_mean = mean_power > kActiveThreshold * scale;
  if (branch == Branch::Mean || has_mean) return finish(mean_2d(data), data, "mean");
  return finish(prefer_self_conjugate(zero_mean_2d(data), data), data, "zero-mean");
}

int retrieve_3d_real(const HerglotzField& u, const HerglotzField& v, double tol) {
  if (u.dim() != v.dim()) throw DomainError("retrieve_3d_real: dimension mismatch");
  const int top = std::max(u.max_degree(), v.max_degree());
  const HerglotzField up = u.padded(top);
  const HerglotzField vp = v.padded(top);
  const double coeff_scale = std::max({1.0, up.max_abs(), vp.max_abs()});
  for (const HerglotzField* f : {&up, &vp}) {
    if ((*f - conjugate_field(*f)).max_abs() > tol * coeff_scale) {
      throw DomainError("retrieve_3d_real: fields must be real valued");
    }
  }
  const SphereGrid angular = sphere_grid(u.dim(), u.dim() == 2 ? 4 * top + 2 : 2 * top + 2);
  std::vector<std::pair<double, double>> values;
  double scale = 0.0;
  constexpr int kRadii = 6;
  for (int i = 1; i <= kRadii; ++i) {
    const double r = static_cast<double>(i) / kRadii;
    for (const Point& theta : angular.nodes) {
      const double a = eval_field(up, r, theta).real();
      const double b = eval_field(vp, r, theta).real();
      scale = std::max({scale, std::abs(a), std::abs(b)});
      values.emplace_back(a, b);
    }
  }
  const double band = kAcceptTolerance * std::max(1.0, scale);
  int plus = 0;
  int minus = 0;
  for (const auto& [a, b] : values) {
    if (std::abs(a) <= band && std::abs(b) <= band) continue;
    const bool same = std::abs(b - a) <= band;
    const bool flipped = std::abs(b + a) <= band;
    if (same) ++plus;
    if (flipped) ++minus;
    if (!same && !flipped) {
      throw InconsistentDataError("not a real equal-magnitude pair", std::min(std::abs(b - a), std::abs(b + a)));
    }
  }
  if (plus > 0 && minus > 0) throw InconsistentDataError("not a real equal-magnitude pair: mixed signs", 0.0);
  return minus > 0 ? -1 : 1;
}

RetrievalResult retrieve_3d_mean(const MagnitudeData& data, const BasisSpec& basis) {
  check_3d(data, basis);
  const RealImag ri = solve_mean(sphere_problem(data, basis), data_scale(data));
  std::vector<Eigen::VectorXcd> coeffs;
  for (int n = 0; n <= data.max_degree; ++n) {
    coeffs.push_back(ri.re[n].cast<Complex>() + Complex(0.0, 1.0) * ri.im[n].cast<Complex>());
  }
  return finish(HerglotzField(basis, std::move(coeffs)), data, "mean");
}

RetrievalResult retrieve_3d_sparse(const MagnitudeData& data, const BasisSpec& basis) {
  check_3d(data, basis);
  const SampledProblem prob = sphere_problem(data, basis);
  const double scale = data_scale(data);
  const double active = kActiveThreshold * scale;
  const int top = data.max_degree;

  std::vector<int> support(top + 1, -1);
  std::vector<double> modulus(top + 1, 0.0);
  std::vector<Eigen::VectorXd> column(top + 1);
  for (int m = 0; m <= top; ++m) {
    const Eigen::VectorXd& diag = prob.pair(m, m);
    if (!(diag.cwiseAbs().maxCoeff() > active)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < prob.phi[m].cols(); ++j) {
      const Eigen::VectorXd sq = prob.phi[m].col(j).cwiseAbs2();
      const double s = std::max(0.0, sq.dot(diag) / sq.squaredNorm());
      const double resid = (diag - s * sq).cwiseAbs().maxCoeff();
      if (resid < best) {
        best = resid;
        support[m] = static_cast<int>(j);
        modulus[m] = std::sqrt(s);
      }
    }
    if (best > kAcceptTolerance * scale) {
      throw BranchNotApplicableError("sparse branch: Re c_{" + std::to_string(m) + "," + std::to_string(m) +
                                     "} is not a single squared basis function (not sparse in this basis)");
    }
    column[m] = prob.phi[m].col(support[m]);
  }

  HerglotzField out(basis, top);
  std::vector<int> modes;
  for (int m = 0; m <= top; ++m) {
    if (support[m] >= 0) modes.push_back(m);
  }
  if (modes.empty()) return finish(out, data, "sparse");

  // Fit Re(a_m conj(a_n)) from Re c_{m,n} = Re(a_m conj(a_n)) Y_m Y_n.
  auto cross = [&](int m, int n) {
    const Eigen::VectorXd prod = column[m].cwiseProduct(column[n]);
    return prod.dot(prob.pair(m, n)) / prod.squaredNorm();
  };
  const int m0 = modes.front();
  std::vector<double> re(top + 1, 0.0);
  std::vector<double> im(top + 1, 0.0);
  re[m0] = modulus[m0];
  int lead = -1;
  for (int n : modes) {
    if (n == m0) continue;
    re[n] = std::clamp(cross(m0, n) / modulus[m0], -modulus[n], modulus[n]);
    im[n] = std::sqrt(std::max(0.0, modulus[n] * modulus[n] - re[n] * re[n]));
    if (im[n] <= std::sqrt(active) * std::max(1.0, modulus[n])) {
      im[n] = 0.0;
      continue;
    }
    if (lead < 0) {
      lead = n;  // global sign of Im (u versus its conjugate)
      continue;
    }
    // Re(a_lead conj(a_n)) = re_l re_n + im_l im_n, with im_l > 0.
    if (cross(lead, n) - re[lead] * re[n] < 0.0) im[n] = -im[n];
  }
  for (int m : modes) out.set(m, support[m] + 1, Complex(re[m], im[m]));
  return finish(out, data, "sparse");
}

RetrievalResult retrieve(const MagnitudeData& data, const BasisSpec& basis, Branch branch) {
  if (data.dim == 2) return retrieve_2d(data, branch);
  switch (branch) {
    case Branch::Mean: return retrieve_3d_mean(data, basis);
    case Branch::Sparse: return retrieve_3d_sparse(data, basis);
    case Branch::Real:
      throw BranchNotApplicableError("retrieve: the real branch compares two fields; use retrieve_3d_real");
    case Branch::Auto: break;
  }
  const PairData& d00 = data.pair(0, 0);
  double mean_power = 0.0;
  for (double s : d00.samples) mean_power = std::max(mean_power, s);
  if (mean_power > kActiveThreshold * data_scale(data)) return retrieve_3d_mean(data, basis);
  return retrieve_3d_sparse(data, basis);
}

HerglotzField canonicalize(const HerglotzField& u) {
  const double scale = std::max(1.0, u.max_abs());
  const double threshold = 1e-9 * scale;
  auto gauge = [&](const HerglotzField& f) {
    for (int m = 0; m <= f.max_degree(); ++m) {
      const Eigen::VectorXcd& a = f.coefficients()[m];
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const Complex c = a(j);
        if (std::abs(c) <= threshold) continue;
        if (c.imag() == 0.0 && c.real() > 0.0) return f;
        HerglotzField g = (std::conj(c) / std::abs(c)) * f;
        g.set(m, static_cast<int>(j) + 1, std::abs(c));
        return g;
      }
    }
    return f;
  };
  HerglotzField direct = gauge(u);
  HerglotzField conj = gauge(conjugate_field(u));
  for (int m = 0; m <= u.max_degree(); ++m) {
    const Eigen::VectorXcd& a = direct.coefficients()[m];
    const Eigen::VectorXcd& b = conj.coefficients()[m];
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (std::abs(a(j).real() - b(j).real()) > threshold) return a(j).real() < b(j).real() ? direct : conj;
      if (std::abs(a(j).imag() - b(j).imag()) > threshold) return a(j).imag() < b(j).imag() ? direct : conj;
    }
  }
  return direct;
}

}  // namespace herglotz
