#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "herglotz/field.hpp"

namespace herglotz::testing {

inline Complex complex_gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const double re = g(rng);
  return Complex(re, g(rng));
}

/// u^(k), |k| <= M, iid complex Gaussian.
inline HerglotzField random_fourier(std::mt19937_64& rng, int M) {
  std::vector<Complex> c(2 * M + 1);
  for (auto& x : c) x = complex_gauss(rng);
  return HerglotzField::from_fourier(c);
}

/// Zero mean, |u^(m)| = |u^(-m)| with real amplitudes: a real field up to phase.
inline HerglotzField random_all_r(std::mt19937_64& rng, int M) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::vector<Complex> c(2 * M + 1, 0.0);
  for (int m = 1; m <= M; ++m) {
    const double beta = g(rng);
    const double theta = phase(rng);
    c[M + m] = 0.5 * beta * std::polar(1.0, theta);
    c[M - m] = 0.5 * beta * std::polar(1.0, -theta);
  }
  return HerglotzField::from_fourier(c);
}

inline HerglotzField random_in(std::mt19937_64& rng, const BasisSpec& basis, int M, bool real = false) {
  HerglotzField u(basis, M);
  for (int m = 0; m <= M; ++m) {
    for (int j = 1; j <= basis.size(m); ++j) {
      const Complex z = complex_gauss(rng);
      u.set(m, j, real ? Complex(z.real()) : z);
    }
  }
  return u;
}

/// At most one active index per degree.
inline HerglotzField random_sparse(std::mt19937_64& rng, const BasisSpec& basis, int M) {
  HerglotzField u(basis, M);
  for (int m = 0; m <= M; ++m) {
    const auto j = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(basis.size(m)));
    u.set(m, j, complex_gauss(rng));
  }
  return u;
}

}  // namespace herglotz::testing
