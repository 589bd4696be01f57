#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "herglotz/extract.hpp"
#include "herglotz/field.hpp"

namespace herglotz {

/// Shortest round-trip text is not enough for diffable files; every number
/// is written with 17 significant digits.
std::string format_double(double x);
/// Whole-token parse; throws ParseError tagged with `line`.
double parse_double(std::string_view token, int line);
int parse_int(std::string_view token, int line);

/// Field descriptor:
///   herglotz-field 1
///   dim <d>
///   max_degree <M>
///   basis <fourier2d|zonal|palpha>
///   normalized <0|1>
///   pole <m> <j> <x_1> ... <x_d>      (zonal only, one per basis function)
///   coeff <m> <j> <re> <im>           (missing records are zero)
void write_field(std::ostream& out, const HerglotzField& u);
HerglotzField read_field(std::istream& in);

/// CSV with header r,theta,value (d = 2) or r,theta,phi,value (d = 3, theta
/// polar, phi azimuth); rows radius-outer.
void write_grid(std::ostream& out, const MagnitudeGrid& grid);
MagnitudeGrid read_grid(std::istream& in);

/// Magnitude data:
///   herglotz-magnitude-data 1
///   dim <d>
///   max_degree <M>
///   grid_resolution <n>               (d >= 3)
///   pair <m> <n>
///   freq <k> <re> <im>                (d = 2, all four frequencies)
///   sample <value>                    (d >= 3, sphere_grid(d, n) order)
void write_magnitude_data(std::ostream& out, const MagnitudeData& data);
MagnitudeData read_magnitude_data(std::istream& in);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

void save_field(const std::filesystem::path& path, const HerglotzField& u);
HerglotzField load_field(const std::filesystem::path& path);
void save_grid(const std::filesystem::path& path, const MagnitudeGrid& grid);
MagnitudeGrid load_grid(const std::filesystem::path& path);
void save_magnitude_data(const std::filesystem::path& path, const MagnitudeData& data);
MagnitudeData load_magnitude_data(const std::filesystem::path& path);

/// What kind of file this is, from its first line: "field", "grid", "data",
/// or "" when unknown.
std::string sniff_format(std::string_view contents);

}  // namespace herglotz
