#include "radonlab/radon.hpp"

#include "fft.hpp"
#include "interp.hpp"
#include "radonlab/error.hpp"
#include "radonlab/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace radonlab {

using std::numbers::pi;

RayInterp parse_ray_interp(const std::string& s) {
  if (s == "linear")
    return RayInterp::linear;
  if (s == "cubic")
    return RayInterp::cubic;
  throw ArgumentError("unknown ray interpolation '" + s + "' (expected linear|cubic)");
}

ProjectionConfig resolved(const ProjectionConfig& cfg, int n, double half_extent) {
  ProjectionConfig out = cfg;
  if (out.p_count == 0)
    out.p_count = next_power_of_two(2 * n);
  if (out.R == 0.0)
    out.R = half_extent;
  require(out.m >= 1, "projection needs m >= 1");
  require(out.p_count >= 2, "projection needs p_count >= 2");
  require(out.R > 0.0, "projection needs R > 0");
  return out;
}

double mass_outside(const ImageGrid& img, double R) {
  double total = 0.0, outside = 0.0;
  for (int r = 0; r < img.n(); ++r)
    for (int c = 0; c < img.n(); ++c) {
      const double a = std::abs(img.at(r, c));
      total += a;
      if (img.cell_center(r, c).norm() > R)
        outside += a;
    }
  return total == 0.0 ? 0.0 : outside / total;
}

std::vector<double> radon_at_angles(const ImageGrid& img, std::span<const double> angles, int p_count, double R,
                                    RayInterp interp) {
  const double dp = 2.0 * R / p_count;
  const double step = img.cell() / 2.0;
  const double box = img.half_extent();
  std::vector<double> out(angles.size() * static_cast<size_t>(p_count), 0.0);
  parallel_for(0, static_cast<int>(angles.size()), [&](int j) {
    const Vec2 w = direction(angles[j]);
    const Vec2 wp = w.perp();
    for (int i = 0; i < p_count; ++i) {
      const double p = -R + (i + 0.5) * dp;
      if (std::abs(p) >= R)
        continue;
      double half = std::sqrt(R * R - p * p);
      half = std::min(half, std::sqrt(2.0) * box);
      const int K = static_cast<int>(std::floor(half / step));
      double acc = 0.0;
      for (int k = -K; k <= K; ++k) {
        const Vec2 x = w * p + wp * (k * step);
        acc += interp == RayInterp::cubic ? img.sample_cubic(x) : img.sample_linear(x);
      }
      out[static_cast<size_t>(j) * p_count + i] = acc * step;
    }
  });
  return out;
}

Sinogram radon(const ImageGrid& img, const ProjectionConfig& in) {
  const auto cfg = resolved(in, img.n(), img.half_extent());
  const double frac = mass_outside(img, cfg.R);
  if (frac > cfg.support_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "support escapes B(0,%g): %.3e of the l1 mass lies outside (tolerance %.1e)", cfg.R,
                  frac, cfg.support_tol);
    throw NumericalError(buf);
  }
  Sinogram s(cfg.m, cfg.p_count, cfg.R);
  std::vector<double> angles(cfg.m);
  for (int j = 0; j < cfg.m; ++j)
    angles[j] = s.angle(j);
  const auto rows = radon_at_angles(img, angles, cfg.p_count, cfg.R, cfg.interp);
  std::copy(rows.begin(), rows.end(), s.values().begin());
  return s;
}

namespace {

// Quadrature step along a ray for an analytic phantom: fine enough that the
// trapezoid rule is spectrally accurate for its effective band limit.
double phantom_step(const PhantomSpec& s, double dp) {
  double band = 0.0;
  switch (s.kind) {
  case PhantomKind::coherent:
    band = s.xi0.norm() / s.h + 8.0 / std::sqrt(s.h);
    return std::min(dp, 0.5 / band);
  case PhantomKind::convex_edge:
    band = s.lambda * (1.0 + 2.0 * s.a * local_support_radius(s));
    break;
  default:
    band = s.lambda;
    break;
  }
  band = std::max(band, s.taper_sharpness / s.rloc);
  return std::min(dp, 1.0 / band);
}

} // namespace

std::vector<double> radon_phantom_at_angles(const PhantomSpec& spec, std::span<const double> angles, int p_count,
                                            double R) {
  validate(spec);
  const double dp = 2.0 * R / p_count;
  const double step = phantom_step(spec, dp);
  const double rad = local_support_radius(spec);
  std::vector<double> out(angles.size() * static_cast<size_t>(p_count), 0.0);
  parallel_for(0, static_cast<int>(angles.size()), [&](int j) {
    const Vec2 w = direction(angles[j]);
    const Vec2 wp = w.perp();
    const double pc = spec.center.dot(w);
    const double tc = spec.center.dot(wp);
    for (int i = 0; i < p_count; ++i) {
      const double p = -R + (i + 0.5) * dp;
      const double d = p - pc;
      if (std::abs(d) >= rad)
        continue;
      const double half = std::sqrt(rad * rad - d * d);
      const int K = static_cast<int>(std::ceil(half / step));
      double acc = 0.0;
      for (int k = -K; k <= K; ++k)
        acc += evaluate(spec, w * p + wp * (tc + k * step));
      out[static_cast<size_t>(j) * p_count + i] = acc * step;
    }
  });
  return out;
}

Sinogram radon_phantom(const PhantomSpec& spec, const ProjectionConfig& cfg) {
  require(cfg.p_count >= 2 && cfg.R > 0.0, "radon_phantom needs explicit p_count and R");
  if (support_radius(spec) > cfg.R) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "phantom support radius %.4g escapes B(0,%g)", support_radius(spec), cfg.R);
    throw NumericalError(buf);
  }
  Sinogram s(cfg.m, cfg.p_count, cfg.R);
  std::vector<double> angles(cfg.m);
  for (int j = 0; j < cfg.m; ++j)
    angles[j] = s.angle(j);
  const auto rows = radon_phantom_at_angles(spec, angles, cfg.p_count, cfg.R);
  std::copy(rows.begin(), rows.end(), s.values().begin());
  return s;
}

namespace {

// 1-D continuous transform estimate of one projection at lattice frequencies.
std::vector<std::complex<double>> row_spectrum(std::span<const double> row, double p0, double dp) {
  const int P = static_cast<int>(row.size());
  std::vector<std::complex<double>> c(row.begin(), row.end());
  detail::fft_inplace(c, false);
  for (int k = 0; k < P; ++k) {
    const int sk = k < P / 2 ? k : k - P;
    const double xi = 2.0 * pi * sk / (P * dp);
    c[k] *= dp * std::polar(1.0, -p0 * xi);
  }
  return c;
}

} // namespace

std::vector<double> slice_energies(const Sinogram& sino) {
  std::vector<double> e(sino.m(), 0.0);
  for (int j = 0; j < sino.m(); ++j)
    for (auto v : row_spectrum(sino.row(j), sino.p(0), sino.dp()))
      e[j] += std::norm(v);
  return e;
}

Metrics fourier_slice_check(const ImageGrid& img, const ProjectionConfig& in) {
  const auto cfg = resolved(in, img.n(), img.half_extent());
  const Sinogram sino = radon(img, cfg);

  // Continuous transform of img on the lattice of a 4x zero-padded grid,
  // stored with zero frequency at index N/2.
  const int pad = 4;
  const int n = img.n();
  const int N = n * pad;
  const double Lp = img.half_extent() * pad;
  std::vector<std::complex<double>> spec(static_cast<size_t>(N) * N);
  const int off = n * (pad - 1) / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      spec[static_cast<size_t>(r + off) * N + c + off] = img.at(r, c);
  detail::fft2_inplace(spec, N, false);
  const double cell = img.cell();
  const double x0 = -Lp + 0.5 * cell;
  const double dxi = pi / Lp;
  std::vector<std::complex<double>> centered(spec.size());
  for (int r = 0; r < N; ++r) {
    const int sr = r < N / 2 ? r : r - N;
    for (int c = 0; c < N; ++c) {
      const int sc = c < N / 2 ? c : c - N;
      const double phase = -x0 * dxi * (sr + sc);
      centered[static_cast<size_t>(sr + N / 2) * N + (sc + N / 2)] =
          cell * cell * std::polar(1.0, phase) * spec[static_cast<size_t>(r) * N + c];
    }
  }
  auto sample2d = [&](double xi1, double xi2) {
    const double u = xi1 / dxi + N / 2;
    const double v = xi2 / dxi + N / 2;
    const double fu = std::floor(u), fv = std::floor(v);
    const int cu = static_cast<int>(fu) - 1, cv = static_cast<int>(fv) - 1;
    const auto wu = detail::cubic_weights(u - fu);
    const auto wv = detail::cubic_weights(v - fv);
    std::complex<double> acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      const int rr = cv + a;
      if (rr < 0 || rr >= N)
        continue;
      for (int b = 0; b < 4; ++b) {
        const int cc = cu + b;
        if (cc < 0 || cc >= N)
          continue;
        acc += wv[a] * wu[b] * centered[static_cast<size_t>(rr) * N + cc];
      }
    }
    return acc;
  };

  const double xi_max = 0.5 * std::min(pi / cell, pi / sino.dp());
  double num2 = 0.0, den2 = 0.0, num_inf = 0.0, den_inf = 0.0;
  const int P = sino.p_count();
  for (int j = 0; j < sino.m(); ++j) {
    const auto g = row_spectrum(sino.row(j), sino.p(0), sino.dp());
    const Vec2 w = direction(sino.angle(j));
    for (int k = 0; k < P; ++k) {
      const int sk = k < P / 2 ? k : k - P;
      const double xi = 2.0 * pi * sk / (P * sino.dp());
      if (std::abs(xi) > xi_max)
        continue;
      const auto ref = sample2d(xi * w.x, xi * w.y);
      const double d = std::abs(g[k] - ref);
      num2 += d * d;
      den2 += std::norm(ref);
      num_inf = std::max(num_inf, d);
      den_inf = std::max(den_inf, std::abs(ref));
    }
  }
  Metrics m;
  m.l2_rel = num2 == 0.0 ? 0.0 : std::sqrt(num2 / den2);
  m.linf_rel = num_inf == 0.0 ? 0.0 : num_inf / den_inf;
  return m;
}

} // namespace radonlab
