#pragma once

#include <optional>
#include <string>
#include <vector>

#include "herglotz/field.hpp"

namespace herglotz {

/// Forward residuals above max(1, scale) * this reject the data.
inline constexpr double kAcceptTolerance = 1e-6;
/// degree_power (or the diagonal data) above max(1, scale) * this marks a mode active.
inline constexpr double kActiveThreshold = 1e-10;

/// Solutions of |a|^2 + |b|^2 = s, a conj(b) = p. Each assignment is a
/// particular solution with a >= 0 real (or b >= 0 when a = 0); the general
/// solution is e^{i phi} times it.
struct PairSolution {
  Complex a;
  Complex b;
};

struct PairSolutionSet {
  /// Empty when s = p = 0 (only (0, 0) solves).
  std::vector<PairSolution> assignments;
  bool zero() const noexcept { return assignments.empty(); }
};

PairSolutionSet solve_pair(double s, Complex p, double tol = 1e-9);

/// How a candidate's mode (v^(m), v^(-m)) relates to the reference's.
struct ModeType {
  int m = 0;
  bool active = false;
  /// (v^(m), v^(-m)) = kappa (u^(m), u^(-m))
  bool identity = false;
  /// (v^(m), v^(-m)) = kappa (conj u^(-m), conj u^(m))
  bool conjugate = false;
  /// |u^(m)| = |u^(-m)| != 0
  bool real_form = false;
  std::optional<Complex> kappa_identity;
  std::optional<Complex> kappa_conjugate;
  /// u^(-m) = e^{-2 i theta_m} u^(m), for real_form modes.
  std::optional<double> theta;
};

/// Per-mode classification of candidate against reference, m = 1..M (d = 2).
std::vector<ModeType> classify_modes(const HerglotzField& reference, const HerglotzField& candidate,
                                     double tol = 1e-9);
/// Same with the reference retrieved from magnitude data.
std::vector<ModeType> classify_modes(const MagnitudeData& data, const HerglotzField& candidate, double tol = 1e-9);

enum class SolutionClass {
  /// {c u} and {c conj(u)} are different sets.
  Distinct,
  /// conj(u) is a unimodular multiple of u.
  Coincide,
};

std::string_view to_string(SolutionClass cls);

struct RetrievalResult {
  HerglotzField field;
  SolutionClass solution_class = SolutionClass::Distinct;
  std::string branch;
  /// Mode table of the returned field (d = 2), against its own conjugate.
  std::vector<ModeType> modes;
  /// max deviation of the re-synthesized magnitude data from the input.
  double forward_residual = 0.0;
};

enum class Branch { Auto, Mean, Real, Sparse };

std::string_view to_string(Branch branch);
Branch branch_from_string(std::string_view name);

/// Complete d = 2 reconstruction. Throws InconsistentDataError when no field
/// reproduces the data within kAcceptTolerance.
RetrievalResult retrieve_2d(const MagnitudeData& data, Branch branch = Branch::Auto);

/// +1 when v = u, -1 when v = -u, for real fields with equal magnitude.
/// Throws InconsistentDataError when the sign is not constant on the grid.
int retrieve_3d_real(const HerglotzField& u, const HerglotzField& v, double tol = 1e-9);

/// Nonvanishing-mean retrieval in a real basis. Throws
/// BranchNotApplicableError when Re c_{0,0} vanishes.
RetrievalResult retrieve_3d_mean(const MagnitudeData& data, const BasisSpec& basis);

/// Retrieval of a field with at most one active index per degree.
/// Throws BranchNotApplicableError when a diagonal is not a single square.
RetrievalResult retrieve_3d_sparse(const MagnitudeData& data, const BasisSpec& basis);

/// Dispatches on dimension and branch; basis is ignored for d = 2.
RetrievalResult retrieve(const MagnitudeData& data, const BasisSpec& basis, Branch branch = Branch::Auto);

/// Gauge fixing: first nonzero coefficient real positive, then the
/// lexicographically smaller of the field and its conjugate.
HerglotzField canonicalize(const HerglotzField& u);

}  // namespace herglotz
