#include "radonlab/reconstruction.hpp"

#include "interp.hpp"
#include "radonlab/error.hpp"
#include "radonlab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace radonlab {

using std::numbers::pi;

namespace {

double wrap_pi(double phi) {
  double r = std::fmod(phi, pi);
  return r < 0.0 ? r + pi : r;
}

} // namespace

double PsiWindow::operator()(double phi) const {
  switch (kind) {
  case Kind::one:
    return 1.0;
  case Kind::zero:
    return 0.0;
  case Kind::raised_cosine: {
    double d = wrap_pi(phi) - wrap_pi(center);
    if (d > pi / 2)
      d -= pi;
    if (d < -pi / 2)
      d += pi;
    const double a = std::abs(d);
    if (a >= half_width)
      return 0.0;
    if (a <= flat)
      return 1.0;
    const double c = std::cos(pi * (a - flat) / (2.0 * (half_width - flat)));
    return c * c;
  }
  case Kind::samples: {
    const int n = static_cast<int>(values.size());
    double u = phi / (2.0 * pi) * n;
    u -= std::floor(u / n) * n;
    const int i0 = static_cast<int>(std::floor(u)) % n;
    const double t = u - std::floor(u);
    return (1.0 - t) * values[i0] + t * values[(i0 + 1) % n];
  }
  }
  return 0.0;
}

void PsiWindow::validate() const {
  if (kind == Kind::raised_cosine) {
    require(half_width > 0.0 && half_width <= pi / 2, "psi half width must lie in (0, 90] degrees");
    require(flat >= 0.0 && flat < half_width, "psi flat top must lie in [0, half width)");
  }
  if (kind == Kind::samples) {
    const size_t n = values.size();
    require(n >= 2 && n % 2 == 0, "psi samples must cover the full circle with an even count");
    for (size_t i = 0; i < n / 2; ++i)
      if (std::abs(values[i] - values[i + n / 2]) > 1e-12)
        throw ArgumentError("psi is not even under phi -> phi + pi (sample " + std::to_string(i) + ")");
    for (double v : values)
      require(v >= 0.0 && v <= 1.0, "psi samples must lie in [0, 1]");
  }
}

PsiWindow parse_psi(const std::string& s) {
  PsiWindow w;
  if (s == "one" || s == "1") {
    w.kind = PsiWindow::Kind::one;
  } else if (s == "zero" || s == "0") {
    w.kind = PsiWindow::Kind::zero;
  } else if (s.rfind("cos2:", 0) == 0) {
    std::istringstream is(s.substr(5));
    double c = 0.0, hw = 0.0, flat = 0.0;
    char colon = 0;
    bool ok = static_cast<bool>(is >> c >> colon >> hw) && colon == ':';
    if (ok && is.peek() == ':')
      ok = static_cast<bool>(is >> colon >> flat);
    if (!ok || is.peek() != std::char_traits<char>::eof())
      throw ArgumentError("psi window must look like cos2:<center_deg>:<half_width_deg>[:<flat_deg>]");
    w.kind = PsiWindow::Kind::raised_cosine;
    w.center = c * pi / 180.0;
    w.half_width = hw * pi / 180.0;
    w.flat = flat * pi / 180.0;
  } else {
    throw ArgumentError("unknown psi window '" + s + "'");
  }
  w.validate();
  return w;
}

Sinogram apply_psi(const Sinogram& sino, const PsiWindow& psi) {
  psi.validate();
  Sinogram out = sino;
  for (int j = 0; j < sino.m(); ++j) {
    const double w = psi(sino.angle(j));
    out.psi_mask()[j] = w * sino.psi_mask()[j];
    for (double& v : out.row(j))
      v *= w;
  }
  return out;
}

Method parse_method(const std::string& s) {
  if (s == "direct")
    return Method::direct;
  if (s == "interp")
    return Method::interp;
  if (s == "multiplier")
    return Method::multiplier;
  throw ArgumentError("unknown method '" + s + "' (expected direct|interp|multiplier)");
}

const char* to_string(Method m) {
  switch (m) {
  case Method::direct:
    return "direct";
  case Method::interp:
    return "interp";
  case Method::multiplier:
    return "multiplier";
  }
  return "?";
}

Backprojector::Backprojector(const Sinogram& sino, const ReconConfig& cfg) {
  require(is_power_of_two(sino.p_count()), "reconstruction needs a power-of-two p_count");
  const int m = sino.m();
  const int P = sino.p_count();
  const double dp = sino.dp();
  std::vector<std::vector<double>> filtered(m);
  parallel_for(0, m, [&](int j) { filtered[j] = ramp_filter_upsampled(sino.row(j), dp); });
  const double p0 = sino.p(0);
  dq_ = dp / 2.0;

  if (cfg.method == Method::direct) {
    angles_.resize(m);
    for (int j = 0; j < m; ++j)
      angles_[j] = sino.angle(j);
    rows_ = std::move(filtered);
    q0_ = p0;
    weight_ = 2.0 * pi / m;
  } else if (cfg.method == Method::interp) {
    require(cfg.kernel.kind != KernelKind::dirac, "the interpolation method needs a non-dirac kernel");
    require(cfg.upsample >= 1, "angular upsampling factor must be >= 1");
    const int U = cfg.upsample;
    focus_ = cfg.refocus_center.value_or(Vec2{});
    const double shift_max = focus_.norm();
    const double Rt = sino.p_half_extent() + shift_max;
    int count = 2 * P;
    q0_ = p0;
    if (shift_max > 0.0) {
      count = static_cast<int>(std::ceil(2.0 * Rt / dq_)) + 1;
      q0_ = -Rt;
    }
    // H g_j(p) for any integer j, using evenness for the antipodal half.
    auto data_at = [&](int j, double p) {
      j = ((j % (2 * m)) + 2 * m) % (2 * m);
      if (j >= m) {
        j -= m;
        p = -p;
      }
      return detail::cubic_at(filtered[j], (p - p0) / dq_);
    };
    const int fine = m * U;
    angles_.resize(fine);
    rows_.assign(fine, {});
    const double hw = cfg.kernel.half_width();
    const double inv_stretch = 1.0 / cfg.kernel.stretch();
    parallel_for(0, fine, [&](int l) {
      const double phi = l * pi / fine;
      angles_[l] = phi;
      const double t = static_cast<double>(l) / U;
      const int jlo = static_cast<int>(std::ceil(t - hw));
      const int jhi = static_cast<int>(std::floor(t + hw));
      std::vector<double> row(count, 0.0);
      for (int j = jlo; j <= jhi; ++j) {
        const double w = cfg.kernel(t - j) * inv_stretch;
        if (w == 0.0)
          continue;
        const double shift = focus_.dot(direction(j * pi / m));
        for (int k = 0; k < count; ++k)
          row[k] += w * data_at(j, q0_ + k * dq_ + shift);
      }
      rows_[l] = std::move(row);
    });
    weight_ = 2.0 * pi / fine;
  } else {
    throw ArgumentError("backprojection needs method direct or interp");
  }
  dirs_.resize(angles_.size());
  for (size_t a = 0; a < angles_.size(); ++a)
    dirs_[a] = direction(angles_[a]);
}

double Backprojector::eval(Vec2 x, long* out_of_range) const {
  const Vec2 y = x - focus_;
  double acc = 0.0;
  for (size_t a = 0; a < rows_.size(); ++a) {
    const double u = (y.dot(dirs_[a]) - q0_) / dq_;
    const auto& row = rows_[a];
    if (out_of_range && (u < 0.0 || u > static_cast<double>(row.size() - 1)))
      ++*out_of_range;
    acc += detail::cubic_at(row, u);
  }
  return acc * weight_;
}

double Backprojector::operator()(Vec2 x) const { return eval(x, nullptr); }

ImageGrid Backprojector::render(int n, double half_extent, ReconStats* stats) const {
  ImageGrid out(n, half_extent);
  std::vector<long> misses(n, 0);
  parallel_for(0, n, [&](int r) {
    for (int c = 0; c < n; ++c)
      out.at(r, c) = eval(out.cell_center(r, c), &misses[r]);
  });
  if (stats)
    for (long v : misses)
      stats->out_of_range += v;
  return out;
}

ImageGrid fbp_direct(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg, ReconStats* stats) {
  ReconConfig c = cfg;
  c.method = Method::direct;
  return Backprojector(sino, c).render(n, half_extent, stats);
}

ImageGrid fbp_interp(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg, ReconStats* stats) {
  ReconConfig c = cfg;
  c.method = Method::interp;
  return Backprojector(sino, c).render(n, half_extent, stats);
}

namespace {

double cosine_sum(Vec2 xi, int m, int kmin, int kmax) {
  if (xi.x == 0.0 && xi.y == 0.0)
    return 0.0;
  const double arg = std::atan2(xi.y, xi.x);
  double acc = 0.0;
  for (int k = kmin; k <= kmax; ++k)
    acc += 2.0 * std::cos(2.0 * m * k * arg);
  return acc;
}

} // namespace

ImageGrid fbp_multiplier(const ImageGrid& f_psi, int m, int kmax) {
  require(m >= 1, "multiplier needs m >= 1");
  require(kmax >= 0, "kmax must be >= 0");
  if (kmax == 0)
    return f_psi;
  return apply_multiplier(f_psi, [&](Vec2 xi) { return 1.0 + cosine_sum(xi, m, 1, kmax); }, 2);
}

ImageGrid artifact_multiplier(const ImageGrid& f_psi, int m, int k) {
  require(m >= 1 && k >= 1, "artifact multiplier needs m >= 1 and k >= 1");
  return apply_multiplier(f_psi, [&](Vec2 xi) { return cosine_sum(xi, m, k, k); }, 2);
}

ImageGrid psi_multiplier(const ImageGrid& img, const PsiWindow& psi) {
  psi.validate();
  if (psi.is_one())
    return img;
  return apply_multiplier(img,
                          [&](Vec2 xi) {
                            if (xi.x == 0.0 && xi.y == 0.0)
                              return 1.0;
                            return psi(std::atan2(xi.y, xi.x));
                          },
                          2);
}

Sinogram refocus(const Sinogram& sino, Vec2 x0) {
  const double dp = sino.dp();
  const double shift_max = x0.norm();
  int P = sino.p_count();
  if (shift_max > 0.0)
    P = next_power_of_two(static_cast<int>(std::ceil(2.0 * (sino.p_half_extent() + shift_max) / dp)));
  Sinogram out(sino.m(), P, P * dp / 2.0);
  std::copy(sino.psi_mask().begin(), sino.psi_mask().end(), out.psi_mask().begin());
  for (int j = 0; j < sino.m(); ++j) {
    const double shift = x0.dot(direction(sino.angle(j)));
    const auto src = sino.row(j);
    auto dst = out.row(j);
    for (int i = 0; i < P; ++i)
      dst[i] = detail::cubic_at(src, (out.p(i) + shift - sino.p(0)) / dp);
  }
  return out;
}

ImageGrid reconstruct(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg, ReconStats* stats) {
  switch (cfg.method) {
  case Method::direct:
    return fbp_direct(sino, n, half_extent, cfg, stats);
  case Method::interp:
    return fbp_interp(sino, n, half_extent, cfg, stats);
  case Method::multiplier:
    throw ArgumentError("the multiplier method acts on an image (f_psi), not on a sinogram");
  }
  throw ArgumentError("unknown method");
}

ConvolutionIdentity verify_convolution_identity(const Sinogram& sino, const ReconConfig& cfg, double cell,
                                                double r_max, std::optional<Kernel1D> conv_kernel) {
  require(cell > 0.0 && r_max > 4.0 * cell, "ring radii must run from 4 cells up to r_max");
  ReconConfig dcfg = cfg;
  dcfg.method = Method::direct;
  dcfg.refocus_center.reset();
  ReconConfig icfg = cfg;
  icfg.method = Method::interp;
  icfg.refocus_center.reset();
  const Backprojector direct(sino, dcfg);
  const Backprojector interp(sino, icfg);
  const int bins = 2 * sino.m() * cfg.upsample;

  ConvolutionIdentity out;
  for (double r = 4.0 * cell; r <= r_max; r += cell)
    out.radii.push_back(r);
  const int rings = static_cast<int>(out.radii.size());
  std::vector<double> num(rings), den(rings);
  parallel_for(0, rings, [&](int i) {
    const double r = out.radii[i];
    std::vector<double> fd(bins), fi(bins);
    for (int b = 0; b < bins; ++b) {
      const Vec2 x = direction(b * 2.0 * pi / bins) * r;
      fd[b] = direct(x);
      fi[b] = interp(x);
    }
    const auto conv = circular_convolve_angle(fd, conv_kernel.value_or(cfg.kernel), 1.0 / cfg.upsample);
    double a = 0.0, d = 0.0;
    for (int b = 0; b < bins; ++b) {
      a += (fi[b] - conv[b]) * (fi[b] - conv[b]);
      d += fd[b] * fd[b];
    }
    num[i] = a;
    den[i] = d;
  });
  double tn = 0.0, td = 0.0;
  for (int i = 0; i < rings; ++i) {
    out.ring_l2_rel.push_back(num[i] == 0.0 ? 0.0 : std::sqrt(num[i] / den[i]));
    tn += num[i];
    td += den[i];
  }
  out.l2_rel = tn == 0.0 ? 0.0 : std::sqrt(tn / td);
  return out;
}

ImageGrid angular_convolve(const ImageGrid& img, const Kernel1D& k, double s, int upsample) {
  require(s > 0.0 && upsample >= 1, "angular convolution needs s > 0 and upsample >= 1");
  int support = 0;
  const auto w = angular_weights(k, 1.0 / upsample, support);
  std::vector<Vec2> rot(w.size());
  for (int i = -support; i <= support; ++i)
    rot[i + support] = direction(i * s / upsample);
  ImageGrid out(img.n(), img.half_extent());
  const int n = img.n();
  parallel_for(0, n, [&](int r) {
    for (int c = 0; c < n; ++c) {
      const Vec2 x{img.coord(c), img.coord(r)};
      double acc = 0.0;
      for (size_t i = 0; i < w.size(); ++i) {
        // x rotated by -theta_i
        const Vec2 y{rot[i].x * x.x + rot[i].y * x.y, -rot[i].y * x.x + rot[i].x * x.y};
        acc += w[i] * img.sample_cubic(y);
      }
      out.at(r, c) = acc;
    }
  });
  return out;
}

} // namespace radonlab
