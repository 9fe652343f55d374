#include "radonlab/io.hpp"

#include "radonlab/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace radonlab {
namespace {

std::uint64_t swap64(std::uint64_t v) { return __builtin_bswap64(v); }

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_reals(std::ostream& os, std::span<const double> vals) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
  } else {
    for (double v : vals) {
      auto bits = swap64(std::bit_cast<std::uint64_t>(v));
      os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
}

void get_reals(std::istream& is, std::span<double> vals, const std::string& path) {
  is.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (static_cast<size_t>(is.gcount()) != vals.size() * sizeof(double))
    throw IoError(path + ": truncated payload");
  if constexpr (std::endian::native == std::endian::big)
    for (double& v : vals)
      v = std::bit_cast<double>(swap64(std::bit_cast<std::uint64_t>(v)));
  for (double v : vals)
    if (!std::isfinite(v))
      throw IoError(path + ": non-finite value in payload");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open " + path);
  return is;
}

std::istringstream header_line(std::istream& is, const std::string& path, const char* magic) {
  std::string line;
  if (!std::getline(is, line) || is.eof())
    throw IoError(path + ": missing header");
  std::istringstream hs(line);
  std::string tag;
  int version = 0;
  hs >> tag >> version;
  if (tag != magic || version != 1)
    throw IoError(path + ": bad magic, expected " + std::string(magic) + " 1");
  return hs;
}

void finish(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os)
    throw IoError("write failed: " + path);
}

} // namespace

void write_grid(const std::string& path, const ImageGrid& g) {
  auto os = open_out(path);
  os << "RGRID 1 " << g.n() << ' ' << fmt_real(g.half_extent()) << '\n';
  put_reals(os, g.values());
  finish(os, path);
}

ImageGrid read_grid(const std::string& path) {
  auto is = open_in(path);
  auto hs = header_line(is, path, "RGRID");
  int n = 0;
  double L = 0.0;
  if (!(hs >> n >> L) || n < 2 || n > (1 << 16) || !(L > 0.0))
    throw IoError(path + ": malformed grid header");
  std::vector<double> values(static_cast<size_t>(n) * n);
  get_reals(is, values, path);
  try {
    return ImageGrid(n, L, std::move(values));
  } catch (const Error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_sino(const std::string& path, const Sinogram& s) {
  auto os = open_out(path);
  os << "RSINO 1 " << s.m() << ' ' << s.p_count() << ' ' << fmt_real(s.p_half_extent()) << '\n';
  put_reals(os, s.psi_mask());
  put_reals(os, s.values());
  finish(os, path);
}

Sinogram read_sino(const std::string& path) {
  auto is = open_in(path);
  auto hs = header_line(is, path, "RSINO");
  int m = 0, p_count = 0;
  double R = 0.0;
  if (!(hs >> m >> p_count >> R) || m < 1 || p_count < 2 || m > (1 << 20) || p_count > (1 << 24) || !(R > 0.0))
    throw IoError(path + ": malformed sinogram header");
  Sinogram s(m, p_count, R);
  get_reals(is, s.psi_mask(), path);
  get_reals(is, s.values(), path);
  return s;
}

std::vector<CrosscutSample> crosscut(const ImageGrid& g, const CrosscutSpec& spec) {
  const int n = g.n();
  std::vector<CrosscutSample> out;
  auto nearest = [&](double c) { return static_cast<int>(std::lround(g.index_of(c))); };
  switch (spec.axis) {
  case CrosscutAxis::row: {
    const int r = nearest(spec.position);
    require(r >= 0 && r < n, "crosscut row outside the grid");
    for (int c = 0; c < n; ++c)
      out.push_back({g.coord(c), g.at(r, c)});
    break;
  }
  case CrosscutAxis::column: {
    const int c = nearest(spec.position);
    require(c >= 0 && c < n, "crosscut column outside the grid");
    for (int r = 0; r < n; ++r)
      out.push_back({g.coord(r), g.at(r, c)});
    break;
  }
  case CrosscutAxis::line: {
    const Vec2 d = direction(spec.angle);
    const double span = 2.0 * std::sqrt(2.0) * g.half_extent();
    const int steps = static_cast<int>(std::ceil(span / g.cell()));
    for (int k = -steps; k <= steps; ++k) {
      const double t = k * g.cell();
      const Vec2 x = spec.origin + d * t;
      const int r = nearest(x.y);
      const int c = nearest(x.x);
      if (r >= 0 && r < n && c >= 0 && c < n)
        out.push_back({t, g.at(r, c)});
    }
    break;
  }
  }
  return out;
}

void write_csv_crosscut(const std::string& path, const std::vector<CrosscutSample>& samples) {
  auto os = open_out(path);
  os << "coord,value\n";
  for (const auto& s : samples)
    os << fmt_real(s.coordinate) << ',' << fmt_real(s.value) << '\n';
  finish(os, path);
}

void write_image8(const std::string& path, const ImageGrid& g, double lo, double hi) {
  if (lo == hi) {
    auto [mn, mx] = std::minmax_element(g.values().begin(), g.values().end());
    lo = *mn;
    hi = *mx;
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  auto os = open_out(path);
  os << "P5\n" << g.n() << ' ' << g.n() << "\n255\n";
  std::vector<unsigned char> bytes;
  bytes.reserve(g.values().size());
  // Top image row is the largest y.
  for (int r = g.n() - 1; r >= 0; --r)
    for (double v : g.row(r))
      bytes.push_back(static_cast<unsigned char>(std::clamp(std::lround((v - lo) * scale), 0L, 255L)));
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  finish(os, path);
}

} // namespace radonlab
