#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "herglotz/field.hpp"

namespace herglotz::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInconsistent = 2,
  kBranchNotApplicable = 3,
};

struct GenOptions {
  int dim = 2;
  int max_degree = 3;
  /// Empty picks fourier2d for d = 2 and zonal otherwise.
  std::string basis;
  /// Real bases are orthonormalized unless this is false.
  bool normalized = true;
  bool real = false;
  bool sparse = false;
  bool zonal = false;
  bool zero_mean = false;
  bool all_r = false;
  bool single_mode = false;
};

/// Basis for (d, M, kind); zonal uses the deterministic default poles.
/// Throws DomainError for impossible combinations.
BasisSpec make_basis(int dim, int max_degree, std::string_view kind, bool normalized);

/// Seeded random field: complex standard Gaussian coefficients, then the
/// requested constraints.
HerglotzField generate_field(const GenOptions& options, std::uint64_t seed);

/// Whole command line; returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herglotz::cli
