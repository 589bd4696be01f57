#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "herglotz/errors.hpp"

namespace herglotz {

using Rational = boost::multiprecision::cpp_rational;

/// Exponent tuple of a monomial (or a multi-index alpha).
using Exponent = std::vector<int>;

/// Sparse multivariate polynomial in `nvars` variables. Canonical: no zero
/// coefficient is ever stored, so equality is structural.
template <class Coef>
class Polynomial {
 public:
  using Terms = std::map<Exponent, Coef>;

  explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Coef& c) {
    Polynomial p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }
  static Polynomial monomial(const Exponent& e, const Coef& c = Coef(1)) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }
  static Polynomial variable(int nvars, int i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(e);
  }
  /// |x|^2 = x_1^2 + ... + x_d^2.
  static Polynomial norm_squared(int nvars) {
    Polynomial p(nvars);
    for (int i = 0; i < nvars; ++i) {
      Exponent e(nvars, 0);
      e[i] = 2;
      p.add_term(e, Coef(1));
    }
    return p;
  }

  int nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  Coef coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Coef(0) : it->second;
  }

  void add_term(const Exponent& e, const Coef& c) {
    if (static_cast<int>(e.size()) != nvars_) throw DomainError("Polynomial: exponent arity mismatch");
    if (c == Coef(0)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Coef(0)) terms_.erase(it);
    }
  }

  /// Total degree if homogeneous, nullopt otherwise (and for the zero polynomial).
  std::optional<int> homogeneous_degree() const {
    std::optional<int> deg;
    for (const auto& [e, c] : terms_) {
      int d = 0;
      for (int k : e) d += k;
      if (deg && *deg != d) return std::nullopt;
      deg = d;
    }
    return deg;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const Coef& s) {
    if (s == Coef(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Coef& s) { return a *= s; }
  friend Polynomial operator*(const Coef& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial out(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(ea);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// d/dx_i
  Polynomial derivative(int i) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e.at(i) == 0) continue;
      Exponent f(e);
      f[i] -= 1;
      out.add_term(f, c * Coef(e[i]));
    }
    return out;
  }

  template <class Scalar>
  Scalar evaluate(std::span<const Scalar> x) const {
    if (static_cast<int>(x.size()) != nvars_) throw DomainError("Polynomial::evaluate: arity mismatch");
    Scalar total = Scalar(0);
    for (const auto& [e, c] : terms_) {
      Scalar term = static_cast<Scalar>(c);
      for (int i = 0; i < nvars_; ++i) {
        for (int k = 0; k < e[i]; ++k) term *= x[i];
      }
      total += term;
    }
    return total;
  }

  /// Division by a nonzero polynomial under lex order (x_1 > x_2 > ...).
  /// Returns (quotient, remainder); for a single divisor the remainder is zero
  /// exactly when the divisor divides *this.
  std::pair<Polynomial, Polynomial> divide(const Polynomial& divisor) const {
    check_arity(divisor);
    if (divisor.is_zero()) throw DomainError("Polynomial::divide: division by zero");
    const auto& [lead_e, lead_c] = *divisor.terms_.rbegin();
    Polynomial quotient(nvars_);
    Polynomial remainder(nvars_);
    Polynomial work = *this;
    while (!work.is_zero()) {
      const auto [e, c] = *work.terms_.rbegin();
      bool divides = true;
      for (int i = 0; i < nvars_; ++i) divides = divides && e[i] >= lead_e[i];
      if (divides) {
        Exponent q(e);
        for (int i = 0; i < nvars_; ++i) q[i] -= lead_e[i];
        const Coef qc = c / lead_c;
        quotient.add_term(q, qc);
        work -= monomial(q, qc) * divisor;
      } else {
        remainder.add_term(e, c);
        work.terms_.erase(std::prev(work.terms_.end()));
      }
    }
    return {std::move(quotient), std::move(remainder)};
  }

  template <class Other, class Convert>
  Polynomial<Other> convert(Convert&& f) const {
    Polynomial<Other> out(nvars_);
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

 private:
  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw DomainError("Polynomial: variable count mismatch");
  }

  int nvars_;
  Terms terms_;
};

using RationalPolynomial = Polynomial<Rational>;
using RealPolynomial = Polynomial<double>;

/// Exact symbolic Laplacian.
template <class Coef>
Polynomial<Coef> laplacian(const Polynomial<Coef>& p) {
  Polynomial<Coef> out(p.nvars());
  for (int i = 0; i < p.nvars(); ++i) out += p.derivative(i).derivative(i);
  return out;
}

/// Float copy of an exact polynomial.
inline RealPolynomial to_real(const RationalPolynomial& p) {
  return p.convert<double>([](const Rational& c) { return static_cast<double>(c); });
}

}  // namespace herglotz
