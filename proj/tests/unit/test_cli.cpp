#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "herglotz/io.hpp"

using namespace herglotz;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "herglotz");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

/// Fresh scratch directory, removed on scope exit.
struct Scratch {
  std::filesystem::path dir;
  explicit Scratch(const std::string& name) : dir(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~Scratch() { std::filesystem::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) {
    if (l == line) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen is deterministic under a seed") {
  const Run a = run({"gen", "--seed", "42", "--max-degree", "4"});
  const Run b = run({"gen", "--seed", "42", "--max-degree", "4"});
  const Run c = run({"gen", "--seed", "43", "--max-degree", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}

TEST_CASE("gen constraints") {
  Scratch s("herglotz_cli_gen");
  REQUIRE(run({"gen", "--dim", "3", "--max-degree", "3", "--real", "--out", s / "r.txt"}).code == 0);
  const HerglotzField r = load_field(s / "r.txt");
  for (const auto& a : r.coefficients()) CHECK(a.imag().isZero(0.0));

  REQUIRE(run({"gen", "--dim", "3", "--basis", "palpha", "--max-degree", "3", "--sparse", "--out", s / "s.txt"}).code == 0);
  const HerglotzField sp = load_field(s / "s.txt");
  for (const auto& a : sp.coefficients()) CHECK((a.array() != Complex(0.0)).count() <= 1);

  REQUIRE(run({"gen", "--max-degree", "3", "--all-r", "--out", s / "a.txt"}).code == 0);
  const HerglotzField ar = load_field(s / "a.txt");
  CHECK(ar.fourier(0) == Complex(0.0));
  for (int m = 1; m <= 3; ++m) CHECK(std::abs(ar.fourier(m)) == doctest::Approx(std::abs(ar.fourier(-m))));

  REQUIRE(run({"gen", "--max-degree", "3", "--single-mode", "--out", s / "o.txt"}).code == 0);
  int nonzero = 0;
  const HerglotzField one = load_field(s / "o.txt");
  for (int k = -3; k <= 3; ++k) nonzero += one.fourier(k) != Complex(0.0);
  CHECK(nonzero == 1);

  CHECK(run({"gen", "--dim", "2", "--basis", "zonal"}).code == 1);
  CHECK(run({"gen", "--dim", "3", "--basis", "fourier2d"}).code == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"gen", "--bogus"}).code == 1);
  CHECK(run({"sample", "/nonexistent/field.txt"}).code == 1);
  CHECK(run({"gen", "--help"}).code == 0);
}

TEST_CASE("sample of the zero field is zero") {
  Scratch s("herglotz_cli_zero");
  {
    std::ofstream f(s / "z.txt");
    f << "herglotz-field 1\ndim 2\nmax_degree 2\nbasis fourier2d\nnormalized 0\n";
  }
  const Run r = run({"sample", s / "z.txt", "--radial-nodes", "3", "--angular-nodes", "8"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const MagnitudeGrid g = read_grid(in);
  for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("pipeline, d = 2") {
  Scratch s("herglotz_cli_pipeline");
  REQUIRE(run({"gen", "--seed", "7", "--max-degree", "4", "--out", s / "u.txt"}).code == 0);
  REQUIRE(run({"sample", s / "u.txt", "--out", s / "g.csv"}).code == 0);
  REQUIRE(run({"extract", s / "g.csv", "--max-degree", "4", "--out", s / "d.txt"}).code == 0);
  const MagnitudeData exact = magnitude_coeffs(load_field(s / "u.txt"));
  CHECK(data_deviation(load_magnitude_data(s / "d.txt"), exact) <= 1e-6 * std::max(1.0, exact.max_abs()));
  const Run ret = run({"retrieve", s / "d.txt", "--out", s / "v.txt"});
  REQUIRE(ret.code == 0);
  CHECK(has_line(ret.out, "branch=mean"));
  const Run ver = run({"verify", s / "u.txt", s / "v.txt"});
  REQUIRE(ver.code == 0);
  CHECK(has_line(ver.out, "equal_magnitude=true"));
  CHECK_FALSE(has_line(ver.out, "verdict=Inequivalent"));

  // retrieval straight from the grid
  const Run from_grid = run({"retrieve", s / "g.csv", "--max-degree", "4", "--out", s / "w.txt"});
  CHECK(from_grid.code == 0);
}

TEST_CASE("pipeline, d = 3 zonal") {
  Scratch s("herglotz_cli_pipeline3");
  REQUIRE(run({"gen", "--dim", "3", "--max-degree", "3", "--zonal", "--seed", "5", "--out", s / "u.txt"}).code == 0);
  REQUIRE(run({"sample", s / "u.txt", "--radial-nodes", "30", "--out", s / "g.csv"}).code == 0);
  REQUIRE(run({"extract", s / "g.csv", "--max-degree", "3", "--out", s / "d.txt"}).code == 0);
  REQUIRE(run({"retrieve", s / "d.txt", "--out", s / "v.txt"}).code == 0);
  const Run ver = run({"verify", s / "u.txt", s / "v.txt"});
  CHECK(has_line(ver.out, "equal_magnitude=true"));
  CHECK_FALSE(has_line(ver.out, "verdict=Inequivalent"));
}

TEST_CASE("retrieve exit statuses") {
  Scratch s("herglotz_cli_status");
  REQUIRE(run({"gen", "--seed", "3", "--max-degree", "3", "--zero-mean", "--out", s / "u.txt"}).code == 0);
  save_magnitude_data(s / "d.txt", magnitude_coeffs(load_field(s / "u.txt")));
  CHECK(run({"retrieve", s / "d.txt", "--branch", "mean"}).code == 3);

  MagnitudeData bad = magnitude_coeffs(load_field(s / "u.txt"));
  bad.pair(1, 3).trig[2] += Complex(0.7, 0.0);
  bad.pair(1, 3).trig[-2] += Complex(0.7, 0.0);
  save_magnitude_data(s / "bad.txt", bad);
  const Run r = run({"retrieve", s / "bad.txt"});
  CHECK(r.code == 2);
  CHECK(r.out.find("residual=") != std::string::npos);

  {
    std::ofstream f(s / "broken.txt");
    f << "herglotz-magnitude-data 1\ndim 2\nmax_degree x\n";
  }
  const Run p = run({"retrieve", s / "broken.txt"});
  CHECK(p.code == 1);
  CHECK(p.err.find("line 3") != std::string::npos);
}

TEST_CASE("retrieve --branch real") {
  Scratch s("herglotz_cli_real");
  REQUIRE(run({"gen", "--dim", "3", "--max-degree", "2", "--real", "--seed", "9", "--out", s / "u.txt"}).code == 0);
  HerglotzField u = load_field(s / "u.txt");
  save_field(s / "neg.txt", Complex(-1.0) * u);
  const Run r = run({"retrieve", "--branch", "real", "--reference", s / "u.txt", "--candidate", s / "neg.txt"});
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "sign=-1"));
}

TEST_CASE("verify") {
  Scratch s("herglotz_cli_verify");
  REQUIRE(run({"gen", "--seed", "11", "--max-degree", "3", "--out", s / "u.txt"}).code == 0);
  const HerglotzField u = load_field(s / "u.txt");
  save_field(s / "iu.txt", Complex(0, 1) * u);
  save_field(s / "bar.txt", conjugate_field(u));
  HerglotzField p = u;
  p.set_fourier(1, p.fourier(1) + 1e-3);
  save_field(s / "p.txt", p);

  const Run a = run({"verify", s / "u.txt", s / "iu.txt"});
  CHECK(has_line(a.out, "equal_magnitude=true"));
  CHECK(has_line(a.out, "verdict=Identity"));
  CHECK(a.out.find("c=0") != std::string::npos);
  const Run b = run({"verify", s / "u.txt", s / "bar.txt"});
  CHECK(has_line(b.out, "verdict=Conjugate"));
  const Run c = run({"verify", s / "u.txt", s / "p.txt"});
  CHECK(has_line(c.out, "equal_magnitude=false"));
}

TEST_CASE("canon and specfun") {
  Scratch s("herglotz_cli_canon");
  REQUIRE(run({"gen", "--seed", "13", "--max-degree", "2", "--out", s / "u.txt"}).code == 0);
  const Run once = run({"canon", s / "u.txt", "--out", s / "c.txt"});
  REQUIRE(once.code == 0);
  const Run twice = run({"canon", s / "c.txt"});
  CHECK(twice.out == read_file(s / "c.txt"));

  const Run j = run({"specfun", "--function", "bessel", "--order", "0", "--x", "0"});
  CHECK(j.code == 0);
  CHECK(has_line(j.out, "x=0 value=1"));
  CHECK(run({"specfun", "--order", "0.3", "--x", "1"}).code == 1);
}

}  // TEST_SUITE
