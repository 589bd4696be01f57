#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "herglotz/errors.hpp"
#include "herglotz/extract.hpp"
#include "herglotz/io.hpp"
#include "herglotz/retrieve.hpp"
#include "herglotz/specfun.hpp"

namespace herglotz::cli {

namespace {

std::string format_complex(Complex c) { return format_double(c.real()) + (c.imag() < 0 ? "" : "+") + format_double(c.imag()) + "i"; }

std::string short_complex(Complex c) {
  std::ostringstream ss;
  ss << std::setprecision(6) << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << 'i';
  return ss.str();
}

std::string short_double(double x) {
  std::ostringstream ss;
  ss << std::setprecision(6) << x;
  return ss.str();
}

void emit(const std::string& path, std::string_view contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

template <class T, class Writer>
std::string to_text(const T& value, Writer write) {
  std::ostringstream ss;
  write(ss, value);
  return ss.str();
}

void print_degree_powers(std::ostream& out, const HerglotzField& u) {
  out << std::left << std::setw(8) << "degree" << "power\n";
  for (int m = 0; m <= u.max_degree(); ++m) {
    out << std::left << std::setw(8) << m << short_double(degree_power(u, m)) << '\n';
  }
}

struct Options {
  // shared
  int dim = 2;
  int max_degree = 3;
  std::string basis;
  bool raw = false;
  std::uint64_t seed = 1;
  int radial_nodes = 64;
  int angular_nodes = 0;
  double radius = kDefaultSampleRadius;
  double tol = 1e-6;
  std::string branch = "auto";
  std::string method = "lsq";
  std::string out;
  std::string input;
  std::string second;
  // gen flags
  GenOptions gen;
  // retrieve
  std::string basis_file;
  std::string reference;
  std::string candidate;
  // specfun
  std::string function = "bessel";
  double order = 0.0;
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  double lambda = 0.5;
  std::vector<double> xs;
};

int cmd_gen(Options& o, std::ostream& out) {
  o.gen.dim = o.dim;
  o.gen.max_degree = o.max_degree;
  o.gen.basis = o.basis;
  o.gen.normalized = !o.raw;
  const HerglotzField u = generate_field(o.gen, o.seed);
  emit(o.out, to_text(u, write_field), out);
  return kSuccess;
}

int cmd_sample(Options& o, std::ostream& out) {
  const HerglotzField u = load_field(o.input);
  int angular = o.angular_nodes;
  if (angular <= 0) angular = u.dim() == 2 ? std::max(40, 4 * u.max_degree() + 2) : 4 * u.max_degree() + 2;
  const MagnitudeGrid grid = sample_magnitude(u, o.radial_nodes, angular, o.radius);
  emit(o.out, to_text(grid, write_grid), out);
  return kSuccess;
}

UnmixMethod parse_method(const std::string& name) {
  if (name == "lsq") return UnmixMethod::LeastSquares;
  if (name == "taylor") return UnmixMethod::Taylor;
  throw DomainError("unknown method '" + name + "' (lsq, taylor)");
}

void print_extract_report(std::ostream& out, const ExtractReport& report) {
  out << "relative_residual=" << format_double(report.relative_residual) << '\n';
  out << "max_condition=" << format_double(report.max_condition) << '\n';
  out << "warnings=" << report.warnings.size() << '\n';
  for (const auto& w : report.warnings) out << "warning=" << w << '\n';
}

int cmd_extract(Options& o, std::ostream& out, std::ostream& err) {
  const MagnitudeGrid grid = load_grid(o.input);
  ExtractReport report;
  const MagnitudeData data = extract_magnitude_data(grid, o.max_degree, parse_method(o.method), &report);
  emit(o.out, to_text(data, write_magnitude_data), out);
  print_extract_report(o.out.empty() || o.out == "-" ? err : out, report);
  return kSuccess;
}

int cmd_retrieve_real(Options& o, std::ostream& out) {
  if (o.reference.empty() || o.candidate.empty()) {
    throw DomainError("--branch real needs --reference and --candidate field files");
  }
  const HerglotzField u = load_field(o.reference);
  const HerglotzField v = load_field(o.candidate);
  const int sign = retrieve_3d_real(u, v, std::min(o.tol, 1e-6));
  out << "branch=real\n";
  out << "sign=" << (sign > 0 ? "+1" : "-1") << '\n';
  out << "relation=" << (sign > 0 ? "v=u" : "v=-u") << '\n';
  return kSuccess;
}

int cmd_retrieve(Options& o, std::ostream& out) {
  const Branch branch = branch_from_string(o.branch);
  if (branch == Branch::Real) return cmd_retrieve_real(o, out);
  if (o.input.empty()) throw DomainError("retrieve: missing input file");

  const std::string contents = read_file(o.input);
  const std::string kind = sniff_format(contents);
  MagnitudeData data;
  std::optional<ExtractReport> extract_report;
  if (kind == "data") {
    std::istringstream ss(contents);
    data = read_magnitude_data(ss);
  } else if (kind == "grid") {
    std::istringstream ss(contents);
    const MagnitudeGrid grid = read_grid(ss);
    extract_report.emplace();
    data = extract_magnitude_data(grid, o.max_degree, parse_method(o.method), &*extract_report);
  } else {
    throw ParseError("input is neither a magnitude-data nor a grid file", 1);
  }

  BasisSpec basis = BasisSpec::fourier2d();
  if (data.dim >= 3) {
    if (!o.basis_file.empty()) {
      basis = load_field(o.basis_file).basis();
      if (basis.dim() != data.dim || basis.max_degree() < data.max_degree) {
        throw DomainError("--basis-file does not cover the data's dimension and degree");
      }
    } else {
      basis = make_basis(data.dim, data.max_degree, o.basis.empty() ? "zonal" : o.basis, !o.raw);
    }
  }

  const RetrievalResult result = [&] {
    try {
      return retrieve(data, basis, branch);
    } catch (const InconsistentDataError& e) {
      out << "status=inconsistent\n";
      out << "residual=" << format_double(e.residual()) << '\n';
      throw;
    }
  }();

  const std::string field_text = to_text(result.field, write_field);
  if (!o.out.empty() && o.out != "-") write_file_atomic(o.out, field_text);

  out << "branch=" << result.branch << '\n';
  out << "solution_class=" << to_string(result.solution_class) << '\n';
  out << "forward_residual=" << format_double(result.forward_residual) << '\n';
  out << "dim=" << data.dim << '\n';
  out << "max_degree=" << data.max_degree << '\n';
  if (extract_report) print_extract_report(out, *extract_report);
  out << '\n';
  if (data.dim == 2) {
    out << std::left << std::setw(6) << "mode" << std::setw(8) << "active" << std::setw(3) << "I" << std::setw(3)
        << "C" << std::setw(3) << "R" << std::setw(24) << "kappa" << std::setw(12) << "theta"
        << "residual\n";
    for (const ModeType& t : result.modes) {
      const auto kappa = t.kappa_identity ? t.kappa_identity : t.kappa_conjugate;
      out << std::left << std::setw(6) << t.m << std::setw(8) << (t.active ? "yes" : "no") << std::setw(3)
          << (t.identity ? "x" : "-") << std::setw(3) << (t.conjugate ? "x" : "-") << std::setw(3)
          << (t.real_form ? "x" : "-") << std::setw(24) << (kappa ? short_complex(*kappa) : "-") << std::setw(12)
          << (t.theta ? short_double(*t.theta) : "-") << short_double(result.forward_residual) << '\n';
    }
  } else {
    print_degree_powers(out, result.field);
  }
  if (o.out.empty() || o.out == "-") out << '\n' << field_text;
  return kSuccess;
}

int cmd_verify(Options& o, std::ostream& out) {
  const HerglotzField u = load_field(o.input);
  const HerglotzField v = load_field(o.second);
  if (u.dim() != v.dim()) throw DomainError("verify: dimension mismatch");
  if (!u.basis().same_functions(v.basis())) throw DomainError("verify: fields use different bases");
  const EqualMagnitudeReport eq = equal_magnitude_report(u, v, o.tol);
  const TrivialEquivalence te = trivially_equivalent(u, v, o.tol);
  out << "equal_magnitude=" << (eq.equal ? "true" : "false") << '\n';
  out << "data_deviation=" << format_double(eq.data_deviation) << '\n';
  out << "grid_deviation=" << format_double(eq.grid_deviation) << '\n';
  out << "verdict=" << to_string(te.verdict) << '\n';
  if (te.c) out << "c=" << format_complex(*te.c) << '\n';
  if (te.c_conjugate) out << "c_conjugate=" << format_complex(*te.c_conjugate) << '\n';
  out << "residual=" << format_double(te.residual) << '\n';
  out << "tol=" << format_double(o.tol) << '\n';
  out << '\n';
  out << std::left << std::setw(8) << "degree" << std::setw(16) << "power_a" << std::setw(16) << "power_b"
      << "difference\n";
  const int top = std::max(u.max_degree(), v.max_degree());
  const HerglotzField a = u.padded(top);
  const HerglotzField b = v.padded(top);
  for (int m = 0; m <= top; ++m) {
    const double pa = degree_power(a, m);
    const double pb = degree_power(b, m);
    out << std::left << std::setw(8) << m << std::setw(16) << short_double(pa) << std::setw(16) << short_double(pb)
        << short_double(std::abs(pa - pb)) << '\n';
  }
  return kSuccess;
}

int cmd_canon(Options& o, std::ostream& out) {
  const HerglotzField u = load_field(o.input);
  emit(o.out, to_text(canonicalize(u), write_field), out);
  return kSuccess;
}

int cmd_specfun(Options& o, std::ostream& out) {
  if (o.xs.empty()) throw DomainError("specfun: give at least one --x");
  out << "function=" << o.function << '\n';
  for (double x : o.xs) {
    double value = 0.0;
    if (o.function == "bessel") {
      value = bessel_j(BesselOrder::from_value(o.order), x);
    } else if (o.function == "gamma") {
      value = gamma_fn(x);
    } else if (o.function == "product") {
      value = bessel_product_series(o.n, o.m, o.alpha, x);
    } else if (o.function == "product-integral") {
      value = bessel_product_integral(o.n, o.m, o.alpha, x);
    } else if (o.function == "gegenbauer") {
      value = gegenbauer(o.n, o.lambda, x);
    } else {
      throw DomainError("specfun: unknown function '" + o.function + "'");
    }
    out << "x=" << format_double(x) << " value=" << format_double(value) << '\n';
  }
  return kSuccess;
}

}  // namespace

BasisSpec make_basis(int dim, int max_degree, std::string_view kind, bool normalized) {
  if (max_degree < 0) throw DomainError("max degree must be >= 0");
  if (kind.empty()) kind = dim == 2 ? "fourier2d" : "zonal";
  const BasisKind k = basis_kind_from_string(kind);
  if (k == BasisKind::Fourier2D) {
    if (dim != 2) throw DomainError("basis fourier2d needs --dim 2");
    return BasisSpec::fourier2d();
  }
  if (dim < 3) throw DomainError("basis " + std::string(kind) + " needs --dim >= 3");
  if (k == BasisKind::Zonal) return BasisSpec::zonal(dim, max_degree, {}, normalized);
  return BasisSpec::palpha(dim, max_degree, normalized);
}

HerglotzField generate_field(const GenOptions& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * M_PI);
  const double s = 1.0 / std::sqrt(2.0);
  auto complex_gauss = [&] {
    const double re = gauss(rng);
    return Complex(re, gauss(rng)) * s;
  };
  const int top = o.max_degree;
  const BasisSpec basis = make_basis(o.dim, top, o.basis, o.normalized);

  if (basis.kind() == BasisKind::Fourier2D) {
    if (o.zonal) throw DomainError("--zonal needs a zonal basis in d >= 3");
    std::vector<Complex> c(2 * top + 1);
    for (auto& x : c) x = complex_gauss();
    if (o.real) {
      c[top] = c[top].real();
      for (int m = 1; m <= top; ++m) c[top - m] = std::conj(c[top + m]);
    }
    if (o.all_r) {
      c[top] = 0.0;
      for (int m = 1; m <= top; ++m) {
        const double beta = gauss(rng);
        const double theta = uniform(rng);
        c[top + m] = 0.5 * beta * std::polar(1.0, theta);
        c[top - m] = 0.5 * beta * std::polar(1.0, -theta);
      }
    }
    if (o.sparse) {
      for (int m = 1; m <= top; ++m) c[(rng() & 1) ? top + m : top - m] = 0.0;
    }
    if (o.single_mode) {
      if (top < 1) throw DomainError("--single-mode needs --max-degree >= 1");
      const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(top));
      const int slot = (rng() & 1) ? top + m : top - m;
      const Complex keep = complex_gauss();
      std::fill(c.begin(), c.end(), Complex(0.0));
      c[slot] = keep;
    }
    if (o.zero_mean) c[top] = 0.0;
    return HerglotzField::from_fourier(c);
  }

  if (o.all_r || o.single_mode) throw DomainError("--all-r and --single-mode are d = 2 constructions");
  if (o.zonal && basis.kind() != BasisKind::Zonal) throw DomainError("--zonal needs --basis zonal");
  HerglotzField u(basis, top);
  for (int m = 0; m <= top; ++m) {
    const int count = static_cast<int>(basis.size(m));
    int only = 0;
    if (o.zonal) {
      only = 1;
    } else if (o.sparse) {
      only = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(count));
    }
    for (int j = 1; j <= count; ++j) {
      Complex value = complex_gauss();
      if (o.real) value = value.real();
      if (only == 0 || j == only) u.set(m, j, value);
    }
  }
  if (o.zero_mean) u.set(0, 1, 0.0);
  return u;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Herglotz fields: generation, magnitude sampling, extraction and phase retrieval"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Random field descriptor");
  gen->add_option("--dim", o.dim, "Dimension d")->check(CLI::Range(2, 8));
  gen->add_option("--max-degree", o.max_degree, "Truncation degree M")->check(CLI::NonNegativeNumber);
  gen->add_option("--basis", o.basis, "fourier2d, zonal or palpha");
  gen->add_option("--seed", o.seed, "RNG seed");
  gen->add_flag("--raw", o.raw, "Keep real bases unnormalized");
  gen->add_flag("--real", o.gen.real, "Real-valued field");
  gen->add_flag("--sparse", o.gen.sparse, "At most one active index per degree");
  gen->add_flag("--zonal", o.gen.zonal, "Only the e_d-pole zonal function per degree");
  gen->add_flag("--zero-mean", o.gen.zero_mean, "Vanishing degree-0 coefficient");
  gen->add_flag("--all-r", o.gen.all_r, "Every mode with |u(m)| = |u(-m)| (d = 2)");
  gen->add_flag("--single-mode", o.gen.single_mode, "One nonzero coefficient (d = 2)");
  gen->add_option("--out", o.out, "Output file (stdout when omitted)");

  auto* sample = app.add_subcommand("sample", "Sample |u|^2 on a polar/spherical grid");
  sample->add_option("field", o.input, "Field descriptor")->required();
  sample->add_option("--radial-nodes", o.radial_nodes, "Radial Chebyshev nodes")->check(CLI::PositiveNumber);
  sample->add_option("--angular-nodes", o.angular_nodes, "Angular nodes (d = 2) or sphere grid resolution (d = 3)");
  sample->add_option("--radius", o.radius, "Outer radius of the grid")->check(CLI::PositiveNumber);
  sample->add_option("--out", o.out, "Output CSV (stdout when omitted)");

  auto* extract = app.add_subcommand("extract", "Recover magnitude data from a grid");
  extract->add_option("grid", o.input, "Grid CSV")->required();
  extract->add_option("--max-degree", o.max_degree, "Truncation degree M")->required();
  extract->add_option("--method", o.method, "lsq or taylor");
  extract->add_option("--out", o.out, "Output data file (stdout when omitted)");

  auto* retrieve_cmd = app.add_subcommand("retrieve", "Phase retrieval from magnitude data or a grid");
  retrieve_cmd->add_option("input", o.input, "Magnitude-data file or grid CSV");
  retrieve_cmd->add_option("--branch", o.branch, "auto, mean, real or sparse");
  retrieve_cmd->add_option("--max-degree", o.max_degree, "Truncation degree M (grid input)");
  retrieve_cmd->add_option("--method", o.method, "lsq or taylor (grid input)");
  retrieve_cmd->add_option("--basis", o.basis, "Basis for d >= 3 data");
  retrieve_cmd->add_flag("--raw", o.raw, "Unnormalized basis for d >= 3 data");
  retrieve_cmd->add_option("--basis-file", o.basis_file, "Take the d >= 3 basis from a field descriptor");
  retrieve_cmd->add_option("--reference", o.reference, "Real field u (--branch real)");
  retrieve_cmd->add_option("--candidate", o.candidate, "Real field v with |v| = |u| (--branch real)");
  retrieve_cmd->add_option("--tol", o.tol, "Tolerance for --branch real");
  retrieve_cmd->add_option("--out", o.out, "Output field file (printed after the report when omitted)");

  auto* verify = app.add_subcommand("verify", "Compare two fields");
  verify->add_option("a", o.input, "First field")->required();
  verify->add_option("b", o.second, "Second field")->required();
  verify->add_option("--tol", o.tol, "Relative tolerance");

  auto* canon = app.add_subcommand("canon", "Gauge-fixed representative of a field");
  canon->add_option("field", o.input, "Field descriptor")->required();
  canon->add_option("--out", o.out, "Output file (stdout when omitted)");

  auto* specfun = app.add_subcommand("specfun", "Evaluate special functions");
  specfun->add_option("--function", o.function, "bessel, gamma, product, product-integral, gegenbauer");
  specfun->add_option("--order", o.order, "Bessel order (integer or half-integer)");
  specfun->add_option("--n", o.n, "First order / degree");
  specfun->add_option("--m", o.m, "Second order");
  specfun->add_option("--alpha", o.alpha, "Order shift alpha");
  specfun->add_option("--lambda", o.lambda, "Gegenbauer parameter");
  specfun->add_option("--x", o.xs, "Arguments")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*sample) return cmd_sample(o, out);
    if (*extract) return cmd_extract(o, out, err);
    if (*retrieve_cmd) return cmd_retrieve(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*canon) return cmd_canon(o, out);
    if (*specfun) return cmd_specfun(o, out);
  } catch (const InconsistentDataError& e) {
    err << "error: " << e.what() << " (residual " << format_double(e.residual()) << ")\n";
    return kInconsistent;
  } catch (const BranchNotApplicableError& e) {
    err << "error: " << e.what() << '\n';
    return kBranchNotApplicable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace herglotz::cli
