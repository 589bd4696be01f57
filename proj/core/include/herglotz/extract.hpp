#pragma once

#include <string>
#include <utility>
#include <vector>

#include "herglotz/field.hpp"

namespace herglotz {

/// Default outer radius of magnitude grids. Radii cluster in (0.05 R, R];
/// at R = 1 the products J_m J_n are too close to their leading powers for
/// a 1e-6 recovery, R = 4 keeps the per-frequency systems well conditioned.
inline constexpr double kDefaultSampleRadius = 4.0;

/// Samples of |u|^2 on radii x angular nodes, radius-outer.
struct MagnitudeGrid {
  int dim = 2;
  std::vector<double> radii;
  /// theta (d = 2) or (polar, azimuth) (d = 3) per angular node.
  std::vector<std::vector<double>> angles;
  std::vector<double> values;

  std::size_t angular_count() const noexcept { return angles.size(); }
  double at(std::size_t radius, std::size_t node) const { return values.at(radius * angles.size() + node); }
  /// Unit vector of an angular node.
  Point node(std::size_t k) const;
};

/// `count` Chebyshev nodes mapped into (0.05 R, R], increasing.
std::vector<double> chebyshev_radii(int count, double radius);

/// d = 2: `angular_nodes` equally spaced angles. d = 3: sphere_grid(3, angular_nodes).
MagnitudeGrid sample_magnitude(const HerglotzField& u, int radial_nodes, int angular_nodes,
                               double radius = kDefaultSampleRadius);

/// Angular coefficient of |u|^2 as a function of r: frequency q >= 0 (d = 2)
/// or Legendre degree (d = 3 zonal data).
struct RadialProfile {
  int dim = 2;
  int order = 0;
  std::vector<double> radii;
  std::vector<Complex> values;
};

/// d = 2: DFT per ring, profiles for q = 0..n/2 (needs a uniform grid).
/// d = 3: Legendre transform in t = cos(polar) (needs zonal data on a Gauss grid).
std::vector<RadialProfile> angular_decompose(const MagnitudeGrid& grid);

enum class UnmixMethod { LeastSquares, Taylor };

std::string_view to_string(UnmixMethod method);

struct UnmixReport {
  int order = 0;
  std::vector<std::pair<int, int>> pairs;
  /// Angular coefficient of Re c_{m,n} at this order (d = 2), or the
  /// amplitude rho_{m,n} with Re c_{m,n} = rho P_m P_n (d = 3 zonal).
  std::vector<Complex> coefficients;
  /// max |model - data| over the radial nodes.
  double residual = 0.0;
  /// Ratio of extreme singular values of the column-normalized design.
  double condition = 0.0;
  std::vector<std::string> warnings;
};

/// Pairs m <= n <= M that can contribute to a profile of the given order.
std::vector<std::pair<int, int>> compatible_pairs(int order, int max_degree, int d);

/// Condition estimates above this produce a warning.
inline constexpr double kConditionWarning = 1e10;

/// Recovers the pair coefficients of one profile. LeastSquares: QR on the
/// sampled Bessel products. Taylor: match the profile's Chebyshev expansion
/// in s = r^2 against the product series of each pair.
/// Throws RankDeficientError naming the pairs that collide.
UnmixReport radial_unmix(const RadialProfile& profile, int max_degree, UnmixMethod method = UnmixMethod::LeastSquares);

struct ExtractReport {
  /// max |model - data| / max(|data|) over all radii and angles.
  double relative_residual = 0.0;
  double max_condition = 0.0;
  std::vector<std::string> warnings;
};

/// Re c_{m,n} for 0 <= m <= n <= M from sampled |u|^2. d = 3 expects zonal
/// data (pole e_3) and solves all pairs jointly over (r, t).
MagnitudeData extract_magnitude_data(const MagnitudeGrid& grid, int max_degree,
                                     UnmixMethod method = UnmixMethod::LeastSquares, ExtractReport* report = nullptr);

}  // namespace herglotz
