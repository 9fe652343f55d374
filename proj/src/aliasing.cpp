#include "radonlab/aliasing.hpp"

#include "fft.hpp"
#include "radonlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace radonlab {

using std::numbers::pi;

PhaseSpacePoint canonical_shift(const PhaseSpacePoint& pt, int k, double s) {
  require(s > 0.0, "angular step must be positive");
  const double r = pt.xi.norm();
  if (r == 0.0)
    throw ArgumentError("canonical shift needs xi != 0");
  const Vec2 t = pt.xi.perp() * (1.0 / r);
  return {pt.x + t * (2.0 * pi * k / (s * r)), pt.xi};
}

Vec2 grid_shift(Vec2 xi, std::array<int, 2> k, Vec2 s) {
  require(s.x > 0.0 && s.y > 0.0, "sampling steps must be positive");
  return {xi.x + 2.0 * pi * k[0] / s.x, xi.y + 2.0 * pi * k[1] / s.y};
}

NyquistResult nyquist_ok(double s, double B, double R) {
  require(s > 0.0 && B > 0.0 && R > 0.0, "nyquist_ok needs positive s, B, R");
  NyquistResult r;
  r.threshold = pi / (R * B);
  r.margin = r.threshold - s;
  r.ok = s < r.threshold;
  return r;
}

int aliasing_index(const PhaseSpacePoint& pt, double s) {
  const double v = pt.x.dot(pt.xi.perp()) * s / (2.0 * pi);
  // x.xi_perp + 2 k pi / s in [-pi/s, pi/s]  <=>  k in [-v - 1/2, -v + 1/2]
  const double k = -v;
  const double lo = std::floor(k), hi = std::ceil(k);
  if (k - lo == 0.5)
    return static_cast<int>(std::abs(lo) < std::abs(hi) ? lo : hi);
  return static_cast<int>(std::round(k));
}

DisplacementInterval interp_displacement_interval(const PhaseSpacePoint& pt, int k) {
  require(k >= 1, "displacement interval needs k >= 1");
  DisplacementInterval d;
  const double r = pt.xi.norm();
  require(r > 0.0, "displacement interval needs xi != 0");
  const double t = pt.x.dot(pt.xi.perp()) / r;
  d.factor_lo = 2.0 * k / (2.0 * k + 1.0);
  d.factor_hi = 2.0 * k / (2.0 * k - 1.0);
  if (t == 0.0) {
    d.valid = false;
    d.note = "tangent line passes through the origin";
    return d;
  }
  const double a = -t * d.factor_lo;
  const double b = -t * d.factor_hi;
  d.lo = std::min(a, b);
  d.hi = std::max(a, b);
  d.valid = true;
  return d;
}

DisplacementInterval interp_displacement_union(const PhaseSpacePoint& pt) {
  return interp_displacement_interval(pt, 1);
}

BandLimitEstimate estimate_band_limit(const ImageGrid& img, double h, double eps) {
  require(h > 0.0, "h must be positive");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  BandLimitEstimate out;
  const SpectralGrid spec = fft2(img);
  const int n = img.n();
  const double dxi = pi / img.half_extent();
  const int shells = static_cast<int>(std::ceil(std::sqrt(2.0) * n / 2)) + 2;
  out.shell_energy.assign(shells, 0.0);
  out.shell_radius.resize(shells);
  for (int i = 0; i < shells; ++i)
    out.shell_radius[i] = i * dxi;
  std::vector<std::pair<double, double>> bins;
  bins.reserve(spec.values().size());
  double total = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double e = std::norm(spec.at(r, c));
      const double rad = spec.xi(r, c).norm();
      bins.emplace_back(rad, e);
      total += e;
      out.shell_energy[std::min(shells - 1, static_cast<int>(std::lround(rad / dxi)))] += e;
    }
  if (total == 0.0)
    return out;
  std::sort(bins.begin(), bins.end());
  // Smallest radius whose disk holds (1 - eps) of the energy; the DC bin
  // alone counts as radius 0.
  double acc = 0.0;
  for (size_t i = 0; i < bins.size(); ++i) {
    acc += bins[i].second;
    const bool shell_done = i + 1 == bins.size() || bins[i + 1].first > bins[i].first;
    if (shell_done && total - acc <= eps * total) {
      out.B = h * bins[i].first;
      break;
    }
  }
  return out;
}

BandLimitEstimate circle_band_limit(std::span<const std::complex<double>> series, double h, double eps) {
  require(h > 0.0, "h must be positive");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  const int N = static_cast<int>(series.size());
  require(N >= 1, "empty circle series");
  std::vector<std::complex<double>> c(series.begin(), series.end());
  detail::fft_inplace(c, false);
  BandLimitEstimate out;
  const int nmax = N / 2;
  out.circle_coeff.assign(nmax + 1, 0.0);
  std::vector<double> energy(nmax + 1, 0.0);
  double total = 0.0;
  for (int k = 0; k < N; ++k) {
    const int n = std::abs(k <= N / 2 ? k : k - N);
    const double a = std::abs(c[k]) / N;
    out.circle_coeff[n] = std::max(out.circle_coeff[n], a);
    energy[n] += a * a;
    total += a * a;
  }
  if (total == 0.0)
    return out;
  double tail = total;
  for (int n = 0; n <= nmax; ++n) {
    tail -= energy[n];
    if (tail <= eps * total) {
      out.B = h * n;
      break;
    }
  }
  return out;
}

BandLimitEstimate circle_band_limit(std::span<const double> series, double h, double eps) {
  std::vector<std::complex<double>> c(series.begin(), series.end());
  return circle_band_limit(c, h, eps);
}

std::vector<PhaseSpacePoint> singular_set(const PhantomSpec& spec, int samples) {
  std::vector<PhaseSpacePoint> pts;
  const double c = std::cos(spec.angle), sn = std::sin(spec.angle);
  auto world = [&](Vec2 u) { return spec.center + Vec2{c * u.x - sn * u.y, sn * u.x + c * u.y}; };
  auto world_dir = [&](Vec2 u) { return Vec2{c * u.x - sn * u.y, sn * u.x + c * u.y}; };
  const double r = spec.rloc;
  switch (spec.kind) {
  case PhantomKind::coherent:
    pts.push_back({spec.center, spec.xi0 * (1.0 / spec.h)});
    break;
  case PhantomKind::disk:
    for (int i = 0; i < samples; ++i) {
      const Vec2 nrm = direction(2.0 * pi * i / samples);
      pts.push_back({spec.center + nrm * spec.radius, nrm});
    }
    break;
  case PhantomKind::flat_edge:
    for (int i = 0; i < samples; ++i) {
      const double y = -r + 2.0 * r * (i + 0.5) / samples;
      pts.push_back({world({spec.offset, y}), world_dir({1.0, 0.0})});
    }
    break;
  case PhantomKind::convex_edge:
    for (int i = 0; i < samples; ++i) {
      const double y = -r + 2.0 * r * (i + 0.5) / samples;
      const double x = spec.a * y * y;
      if (std::hypot(x, y) > r)
        continue;
      const Vec2 nrm{1.0, -2.0 * spec.a * y};
      pts.push_back({world({x, y}), world_dir(nrm * (1.0 / nrm.norm()))});
    }
    break;
  case PhantomKind::corner:
    for (int i = 0; i < samples / 2; ++i) {
      const double t = r * (i + 0.5) / (samples / 2);
      pts.push_back({world({0.0, t}), world_dir({1.0, 0.0})});
      pts.push_back({world({t, 0.0}), world_dir({0.0, 1.0})});
    }
    break;
  }
  return pts;
}

ArtifactPrediction predict_artifacts(const PhantomSpec& spec, double s, double window, double B, int kmax,
                                     double dedup) {
  validate(spec);
  require(s > 0.0, "angular step must be positive");
  require(kmax >= 1, "kmax must be >= 1");
  auto pts = singular_set(spec);
  if (spec.kind != PhantomKind::coherent) {
    require(B > 0.0, "edge predictions need a band limit B > 0");
    for (auto& p : pts)
      p.xi = p.xi * B;
  }
  ArtifactPrediction out;
  for (const auto& p : pts) {
    for (double sign : {1.0, -1.0}) {
      const PhaseSpacePoint q{p.x, p.xi * sign};
      for (int k = -kmax; k <= kmax; ++k) {
        if (k == 0)
          continue;
        const auto sh = canonical_shift(q, k, s);
        PredictedArtifact a{k, sh.x, sh.xi, p.x, std::abs(sh.x.x) <= window && std::abs(sh.x.y) <= window};
        const bool dup = std::any_of(out.begin(), out.end(), [&](const PredictedArtifact& o) {
          return (o.x - a.x).norm() <= dedup && o.inside == a.inside;
        });
        if (!dup)
          out.push_back(a);
      }
    }
  }
  return out;
}

std::string format_prediction(const ArtifactPrediction& p) {
  std::ostringstream os;
  os << "k,x,y,xi1,xi2,inside\n";
  char buf[200];
  for (const auto& a : p) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%d\n", a.k, a.x.x, a.x.y, a.xi.x, a.xi.y, a.inside ? 1 : 0);
    os << buf;
  }
  return os.str();
}

ArtifactVerification verify_artifacts(const ArtifactPrediction& prediction, const ImageGrid& recon,
                                      const ImageGrid& reference, const VerifyOptions& opts) {
  ArtifactVerification v;
  v.metrics = compare(recon, reference, opts.peak_threshold);
  if (opts.envelope_direction.norm() > 0.0)
    v.peaks = find_peaks(analytic_envelope(recon - reference, opts.envelope_direction), opts.peak_threshold);
  else
    v.peaks = v.metrics.peaks;
  if (opts.exclude_radius > 0.0) {
    std::erase_if(v.peaks, [&](const Peak& pk) {
      return std::any_of(prediction.begin(), prediction.end(),
                         [&](const PredictedArtifact& a) { return (pk.x - a.source).norm() < opts.exclude_radius; });
    });
  }
  const double radius = opts.match_radius > 0.0 ? opts.match_radius : 2.0 * recon.cell();
  std::vector<bool> used(v.peaks.size(), false);
  for (const auto& a : prediction) {
    if (!a.inside)
      continue;
    ArtifactMatch m{a, std::numeric_limits<double>::infinity(), false};
    for (size_t i = 0; i < v.peaks.size(); ++i) {
      const double d = (v.peaks[i].x - a.x).norm();
      if (d < m.distance)
        m.distance = d;
      if (d <= radius)
        used[i] = true;
    }
    m.matched = m.distance <= radius;
    v.matches.push_back(m);
  }
  v.unmatched_peaks = static_cast<int>(std::count(used.begin(), used.end(), false));
  return v;
}

} // namespace radonlab
