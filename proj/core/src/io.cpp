#include "herglotz/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>
#include <tuple>
#include <unistd.h>

#include "herglotz/errors.hpp"

namespace herglotz {

namespace {

constexpr std::string_view kFieldMagic = "herglotz-field";
constexpr std::string_view kDataMagic = "herglotz-magnitude-data";
constexpr int kFormatVersion = 1;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

/// Non-empty, non-comment lines with their 1-based numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next() {
    while (std::getline(in_, raw_)) {
      ++line_;
      view_ = trim(raw_);
      if (!view_.empty() && view_.front() != '#') return true;
    }
    return false;
  }
  std::string_view text() const { return view_; }
  int line() const { return line_; }

 private:
  std::istream& in_;
  std::string raw_;
  std::string_view view_;
  int line_ = 0;
};

void expect_count(const std::vector<std::string_view>& tokens, std::size_t count, int line) {
  if (tokens.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " fields, got " + std::to_string(tokens.size()), line);
  }
}

void read_header(LineReader& reader, std::string_view magic) {
  if (!reader.next()) throw ParseError("empty file", 0);
  const auto tokens = split(reader.text(), ' ');
  if (tokens.size() != 2 || tokens[0] != magic) {
    throw ParseError("expected header '" + std::string(magic) + " <version>'", reader.line());
  }
  if (parse_int(tokens[1], reader.line()) != kFormatVersion) {
    throw ParseError("unsupported format version " + std::string(tokens[1]), reader.line());
  }
}

int read_keyed_int(LineReader& reader, std::string_view key) {
  if (!reader.next()) throw ParseError("missing '" + std::string(key) + "'", reader.line());
  const auto tokens = split(reader.text(), ' ');
  if (tokens.size() != 2 || tokens[0] != key) {
    throw ParseError("expected '" + std::string(key) + " <value>'", reader.line());
  }
  return parse_int(tokens[1], reader.line());
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";  // no "-0" in files
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc()) throw DomainError("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || end != last || first == last) {
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  }
  return value;
}

int parse_int(std::string_view token, int line) {
  int value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size() || token.empty()) {
    throw ParseError("invalid integer '" + std::string(token) + "'", line);
  }
  return value;
}

void write_field(std::ostream& out, const HerglotzField& u) {
  const BasisSpec& basis = u.basis();
  out << kFieldMagic << ' ' << kFormatVersion << '\n';
  out << "dim " << u.dim() << '\n';
  out << "max_degree " << u.max_degree() << '\n';
  out << "basis " << to_string(basis.kind()) << '\n';
  out << "normalized " << (basis.orthonormalized() ? 1 : 0) << '\n';
  if (basis.kind() == BasisKind::Zonal) {
    for (int m = 0; m <= u.max_degree(); ++m) {
      const auto& poles = basis.poles(m);
      for (std::size_t j = 0; j < poles.size(); ++j) {
        out << "pole " << m << ' ' << j + 1;
        for (Eigen::Index i = 0; i < poles[j].size(); ++i) out << ' ' << format_double(poles[j](i));
        out << '\n';
      }
    }
  }
  for (int m = 0; m <= u.max_degree(); ++m) {
    const Eigen::VectorXcd& a = u.coefficients()[m];
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      out << "coeff " << m << ' ' << j + 1 << ' ' << format_double(a(j).real()) << ' '
          << format_double(a(j).imag()) << '\n';
    }
  }
}

HerglotzField read_field(std::istream& in) {
  LineReader reader(in);
  read_header(reader, kFieldMagic);
  const int d = read_keyed_int(reader, "dim");
  const int top = read_keyed_int(reader, "max_degree");
  if (d < 2) throw ParseError("dim must be >= 2", reader.line());
  if (top < 0) throw ParseError("max_degree must be >= 0", reader.line());

  if (!reader.next()) throw ParseError("missing 'basis'", reader.line());
  auto tokens = split(reader.text(), ' ');
  if (tokens.size() != 2 || tokens[0] != "basis") throw ParseError("expected 'basis <kind>'", reader.line());
  BasisKind kind{};
  try {
    kind = basis_kind_from_string(tokens[1]);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), reader.line());
  }
  const int basis_line = reader.line();
  const bool normalized = read_keyed_int(reader, "normalized") != 0;

  std::vector<std::vector<Point>> poles;
  std::vector<std::tuple<int, int, Complex, int>> records;
  while (reader.next()) {
    tokens = split(reader.text(), ' ');
    if (tokens[0] == "pole") {
      if (kind != BasisKind::Zonal) throw ParseError("pole records need basis zonal", reader.line());
      expect_count(tokens, 3 + static_cast<std::size_t>(d), reader.line());
      const int m = parse_int(tokens[1], reader.line());
      const int j = parse_int(tokens[2], reader.line());
      if (m < 0 || m > top) throw ParseError("pole degree out of range", reader.line());
      if (poles.size() < static_cast<std::size_t>(m) + 1) poles.resize(m + 1);
      if (j != static_cast<int>(poles[m].size()) + 1) throw ParseError("pole records out of order", reader.line());
      Point p(d);
      for (int i = 0; i < d; ++i) p(i) = parse_double(tokens[3 + i], reader.line());
      poles[m].push_back(p);
    } else if (tokens[0] == "coeff") {
      expect_count(tokens, 5, reader.line());
      records.emplace_back(parse_int(tokens[1], reader.line()), parse_int(tokens[2], reader.line()),
                           Complex(parse_double(tokens[3], reader.line()), parse_double(tokens[4], reader.line())),
                           reader.line());
    } else {
      throw ParseError("unknown record '" + std::string(tokens[0]) + "'", reader.line());
    }
  }

  BasisSpec basis = BasisSpec::fourier2d();
  try {
    switch (kind) {
      case BasisKind::Fourier2D:
        if (d != 2) throw DomainError("fourier2d needs dim 2");
        break;
      case BasisKind::Zonal:
        if (!poles.empty() && poles.size() != static_cast<std::size_t>(top) + 1) {
          throw DomainError("pole records must cover every degree");
        }
        basis = BasisSpec::zonal(d, top, poles, normalized);
        break;
      case BasisKind::PAlpha:
        basis = BasisSpec::palpha(d, top, normalized);
        break;
    }
  } catch (const DomainError& e) {
    throw ParseError(e.what(), basis_line);
  }

  HerglotzField u(basis, top);
  for (const auto& [m, j, value, line] : records) {
    if (m < 0 || m > top || j < 1 || j > basis.size(m)) {
      throw ParseError("coefficient index (" + std::to_string(m) + ", " + std::to_string(j) + ") out of range", line);
    }
    u.set(m, j, value);
  }
  return u;
}

void write_grid(std::ostream& out, const MagnitudeGrid& grid) {
  if (grid.dim != 2 && grid.dim != 3) throw DomainError("write_grid: only d = 2, 3 grids have a file format");
  out << (grid.dim == 2 ? "r,theta,value\n" : "r,theta,phi,value\n");
  for (std::size_t i = 0; i < grid.radii.size(); ++i) {
    const std::string r = format_double(grid.radii[i]);
    for (std::size_t k = 0; k < grid.angular_count(); ++k) {
      out << r;
      for (double a : grid.angles[k]) out << ',' << format_double(a);
      out << ',' << format_double(grid.at(i, k)) << '\n';
    }
  }
}

MagnitudeGrid read_grid(std::istream& in) {
  std::string raw;
  int line = 0;
  MagnitudeGrid grid;
  if (!std::getline(in, raw)) throw ParseError("empty grid file", 0);
  ++line;
  const std::string_view header = trim(raw);
  if (header == "r,theta,value") {
    grid.dim = 2;
  } else if (header == "r,theta,phi,value") {
    grid.dim = 3;
  } else {
    throw ParseError("grid header must be 'r,theta,value' or 'r,theta,phi,value'", line);
  }
  const std::size_t width = grid.dim == 2 ? 3 : 4;

  // Angular nodes are taken from the first radius block; later blocks must repeat them.
  std::size_t node = 0;
  bool first_block = true;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    const auto tokens = split(text, ',');
    expect_count(tokens, width, line);
    const double r = parse_double(trim(tokens[0]), line);
    std::vector<double> angles;
    for (std::size_t i = 1; i + 1 < width; ++i) angles.push_back(parse_double(trim(tokens[i]), line));
    const double value = parse_double(trim(tokens[width - 1]), line);

    if (grid.radii.empty() || (r != grid.radii.back())) {
      if (!grid.radii.empty()) {
        if (first_block) first_block = false;
        if (node != grid.angles.size()) throw ParseError("radius block has the wrong number of rows", line);
        if (r <= grid.radii.back()) throw ParseError("radii must increase", line);
      }
      grid.radii.push_back(r);
      node = 0;
    }
    if (first_block) {
      grid.angles.push_back(angles);
    } else if (node >= grid.angles.size() || grid.angles[node] != angles) {
      throw ParseError("angular nodes differ from the first radius block", line);
    }
    grid.values.push_back(value);
    ++node;
  }
  if (grid.radii.empty()) throw ParseError("grid has no rows", line);
  if (node != grid.angles.size()) throw ParseError("last radius block is incomplete", line);
  return grid;
}

void write_magnitude_data(std::ostream& out, const MagnitudeData& data) {
  out << kDataMagic << ' ' << kFormatVersion << '\n';
  out << "dim " << data.dim << '\n';
  out << "max_degree " << data.max_degree << '\n';
  if (data.dim >= 3) out << "grid_resolution " << data.grid_resolution << '\n';
  for (const PairData& pair : data.pairs) {
    out << "pair " << pair.m << ' ' << pair.n << '\n';
    if (data.dim == 2) {
      for (int k : pair_frequencies(pair.m, pair.n)) {
        const auto it = pair.trig.find(k);
        const Complex c = it == pair.trig.end() ? Complex(0.0) : it->second;
        out << "freq " << k << ' ' << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
      }
    } else {
      for (double v : pair.samples) out << "sample " << format_double(v) << '\n';
    }
  }
}

MagnitudeData read_magnitude_data(std::istream& in) {
  LineReader reader(in);
  read_header(reader, kDataMagic);
  const int d = read_keyed_int(reader, "dim");
  const int top = read_keyed_int(reader, "max_degree");
  if (d < 2) throw ParseError("dim must be >= 2", reader.line());
  if (top < 0) throw ParseError("max_degree must be >= 0", reader.line());
  MagnitudeData data = MagnitudeData::zero(d, top);
  std::size_t expected_samples = 0;
  if (d >= 3) {
    data.grid_resolution = read_keyed_int(reader, "grid_resolution");
    if (data.grid_resolution < 1) throw ParseError("grid_resolution must be positive", reader.line());
    expected_samples = data.grid().size();
  }

  std::vector<bool> seen(data.pairs.size(), false);
  PairData* current = nullptr;
  int current_line = 0;
  auto close_pair = [&] {
    if (current != nullptr && d >= 3 && current->samples.size() != expected_samples) {
      throw ParseError("pair (" + std::to_string(current->m) + ", " + std::to_string(current->n) + ") has " +
                           std::to_string(current->samples.size()) + " samples, expected " +
                           std::to_string(expected_samples),
                       current_line);
    }
  };
  while (reader.next()) {
    const auto tokens = split(reader.text(), ' ');
    if (tokens[0] == "pair") {
      close_pair();
      expect_count(tokens, 3, reader.line());
      const int m = parse_int(tokens[1], reader.line());
      const int n = parse_int(tokens[2], reader.line());
      if (m < 0 || m > n || n > top) throw ParseError("pair index out of range", reader.line());
      const std::size_t idx = MagnitudeData::pair_index(m, n, top);
      if (seen[idx]) throw ParseError("duplicate pair", reader.line());
      seen[idx] = true;
      current = &data.pairs[idx];
      current->samples.clear();
      current_line = reader.line();
    } else if (tokens[0] == "freq") {
      if (current == nullptr || d != 2) throw ParseError("freq record outside a d = 2 pair", reader.line());
      expect_count(tokens, 4, reader.line());
      const int k = parse_int(tokens[1], reader.line());
      const auto allowed = pair_frequencies(current->m, current->n);
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        throw ParseError("frequency " + std::to_string(k) + " cannot occur in this pair", reader.line());
      }
      current->trig[k] = Complex(parse_double(tokens[2], reader.line()), parse_double(tokens[3], reader.line()));
    } else if (tokens[0] == "sample") {
      if (current == nullptr || d < 3) throw ParseError("sample record outside a d >= 3 pair", reader.line());
      expect_count(tokens, 2, reader.line());
      current->samples.push_back(parse_double(tokens[1], reader.line()));
    } else {
      throw ParseError("unknown record '" + std::string(tokens[0]) + "'", reader.line());
    }
  }
  close_pair();
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ParseError("missing pair (" + std::to_string(data.pairs[i].m) + ", " + std::to_string(data.pairs[i].n) + ")",
                       reader.line());
    }
  }
  return data;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

template <class T, class Writer>
void save_with(const std::filesystem::path& path, const T& value, Writer write) {
  std::ostringstream ss;
  write(ss, value);
  write_file_atomic(path, ss.str());
}

template <class Reader>
auto load_with(const std::filesystem::path& path, Reader read) {
  std::istringstream ss(read_file(path));
  return read(ss);
}

}  // namespace

void save_field(const std::filesystem::path& path, const HerglotzField& u) { save_with(path, u, write_field); }
HerglotzField load_field(const std::filesystem::path& path) { return load_with(path, read_field); }
void save_grid(const std::filesystem::path& path, const MagnitudeGrid& grid) { save_with(path, grid, write_grid); }
MagnitudeGrid load_grid(const std::filesystem::path& path) { return load_with(path, read_grid); }
void save_magnitude_data(const std::filesystem::path& path, const MagnitudeData& data) {
  save_with(path, data, write_magnitude_data);
}
MagnitudeData load_magnitude_data(const std::filesystem::path& path) { return load_with(path, read_magnitude_data); }

std::string sniff_format(std::string_view contents) {
  const std::string_view first = trim(contents.substr(0, contents.find('\n')));
  if (first.starts_with(kFieldMagic)) return "field";
  if (first.starts_with(kDataMagic)) return "data";
  if (first.starts_with("r,theta")) return "grid";
  return "";
}

}  // namespace herglotz
