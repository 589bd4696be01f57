#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "herglotz/errors.hpp"
#include "herglotz/io.hpp"
#include "support.hpp"

using namespace herglotz;
using namespace herglotz::testing;

namespace {

template <class T, class W>
std::string text_of(const T& value, W write) {
  std::ostringstream ss;
  write(ss, value);
  return ss.str();
}

int parse_error_line(const std::string& text) {
  std::istringstream ss(text);
  try {
    read_field(ss);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers round trip bit for bit") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(parse_double(format_double(x), 1) == x);
  }
  CHECK(parse_double("+1.5", 1) == 1.5);
  CHECK_THROWS_AS(parse_double("1.5x", 4), ParseError);
  CHECK_THROWS_AS(parse_int("", 4), ParseError);
}

TEST_CASE("field descriptors round trip") {
  std::mt19937_64 rng(2);
  const std::vector<HerglotzField> fields{
      random_fourier(rng, 4),
      random_in(rng, BasisSpec::zonal(3, 3), 3),
      random_in(rng, BasisSpec::zonal(3, 2, {}, true), 2),
      random_in(rng, BasisSpec::palpha(4, 2, true), 2),
  };
  for (const HerglotzField& u : fields) {
    std::istringstream in(text_of(u, write_field));
    const HerglotzField v = read_field(in);
    CHECK(v.dim() == u.dim());
    CHECK(v.basis().same_functions(u.basis()));
    CHECK(v.coefficients() == u.coefficients());
  }
}

TEST_CASE("field parse errors carry line numbers") {
  const std::string good = "herglotz-field 1\ndim 2\nmax_degree 1\nbasis fourier2d\nnormalized 0\ncoeff 1 1 1 0\n";
  CHECK(parse_error_line(good) == -1);
  CHECK(parse_error_line("herglotz-field 2\n") == 1);
  CHECK(parse_error_line("herglotz-field 1\ndim 2\nmax_degree 1\nbasis spline\n") == 4);
  CHECK(parse_error_line(good + "coeff 1 3 0 0\n") == 7);
  CHECK(parse_error_line(good + "\n# comment\ncoeff 1 1 abc 0\n") == 9);
  CHECK(parse_error_line("herglotz-field 1\ndim 3\nmax_degree 1\nbasis fourier2d\nnormalized 0\n") == 4);
}

TEST_CASE("grid files") {
  std::mt19937_64 rng(3);
  const MagnitudeGrid g2 = sample_magnitude(random_fourier(rng, 2), 3, 10);
  const std::string t2 = text_of(g2, write_grid);
  CHECK(t2.rfind("r,theta,value\n", 0) == 0);
  std::istringstream in2(t2);
  const MagnitudeGrid back = read_grid(in2);
  CHECK(back.radii == g2.radii);
  CHECK(back.angles == g2.angles);
  CHECK(back.values == g2.values);

  HerglotzField z(BasisSpec::zonal(3, 2), 2);
  z.set(1, 1, 1.0);
  const MagnitudeGrid g3 = sample_magnitude(z, 2, 6);
  const std::string t3 = text_of(g3, write_grid);
  CHECK(t3.rfind("r,theta,phi,value\n", 0) == 0);
  std::istringstream in3(t3);
  CHECK(read_grid(in3).values == g3.values);

  std::istringstream bad("r,theta,value\n1,0,1\n1,1,2\n2,0,1\n");
  try {
    read_grid(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream header("r,value\n");
  CHECK_THROWS_AS(read_grid(header), ParseError);
}

TEST_CASE("magnitude data round trips") {
  std::mt19937_64 rng(4);
  const MagnitudeData d2 = magnitude_coeffs(random_fourier(rng, 3));
  std::istringstream in2(text_of(d2, write_magnitude_data));
  const MagnitudeData b2 = read_magnitude_data(in2);
  CHECK(data_deviation(d2, b2) == 0.0);

  const MagnitudeData d3 = magnitude_coeffs(random_in(rng, BasisSpec::palpha(3, 2, true), 2));
  std::istringstream in3(text_of(d3, write_magnitude_data));
  const MagnitudeData b3 = read_magnitude_data(in3);
  CHECK(b3.grid_resolution == d3.grid_resolution);
  for (std::size_t p = 0; p < d3.pairs.size(); ++p) CHECK(b3.pairs[p].samples == d3.pairs[p].samples);

  std::istringstream missing("herglotz-magnitude-data 1\ndim 2\nmax_degree 1\npair 0 0\nfreq 0 1 0\n");
  CHECK_THROWS_AS(read_magnitude_data(missing), ParseError);
  std::istringstream wrong_freq("herglotz-magnitude-data 1\ndim 2\nmax_degree 1\npair 0 1\nfreq 3 1 0\n");
  CHECK_THROWS_AS(read_magnitude_data(wrong_freq), ParseError);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "herglotz_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "field.txt";
  std::mt19937_64 rng(5);
  const HerglotzField u = random_fourier(rng, 2);
  save_field(path, u);
  save_field(path, u);
  CHECK(load_field(path).coefficients() == u.coefficients());
  int files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK(sniff_format(read_file(path)) == "field");
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
