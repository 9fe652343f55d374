#include "radonlab/grid.hpp"

#include "fft.hpp"
#include "interp.hpp"
#include "radonlab/error.hpp"
#include "radonlab/parallel.hpp"

#include <algorithm>
#include <numbers>

namespace radonlab {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_power_of_two(int n) {
  int p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

ImageGrid::ImageGrid(int n, double half_extent)
    : ImageGrid(n, half_extent, std::vector<double>(static_cast<size_t>(std::max(n, 0)) * std::max(n, 0))) {}

ImageGrid::ImageGrid(int n, double half_extent, std::vector<double> values)
    : n_(n), half_extent_(half_extent), values_(std::move(values)) {
  require(n >= 2 && is_power_of_two(n), "grid size must be a power of two >= 2, got " + std::to_string(n));
  require(half_extent > 0.0 && std::isfinite(half_extent), "grid half extent must be positive");
  require(values_.size() == static_cast<size_t>(n) * n, "grid value count does not match n*n");
  for (double v : values_)
    if (!std::isfinite(v))
      throw NumericalError("grid contains non-finite values");
}

double ImageGrid::sample_cubic(Vec2 x) const {
  const double fx = index_of(x.x);
  const double fy = index_of(x.y);
  const double flx = std::floor(fx);
  const double fly = std::floor(fy);
  const int cx = static_cast<int>(flx) - 1;
  const int cy = static_cast<int>(fly) - 1;
  if (cx + 3 < 0 || cy + 3 < 0 || cx >= n_ || cy >= n_)
    return 0.0;
  const auto wx = detail::cubic_weights(fx - flx);
  const auto wy = detail::cubic_weights(fy - fly);
  double acc = 0.0;
  const bool interior = cx >= 0 && cy >= 0 && cx + 3 < n_ && cy + 3 < n_;
  for (int r = 0; r < 4; ++r) {
    const int row = cy + r;
    if (!interior && (row < 0 || row >= n_))
      continue;
    const double* line = values_.data() + static_cast<size_t>(row) * n_;
    double racc = 0.0;
    if (interior) {
      racc = wx[0] * line[cx] + wx[1] * line[cx + 1] + wx[2] * line[cx + 2] + wx[3] * line[cx + 3];
    } else {
      for (int c = 0; c < 4; ++c) {
        const int col = cx + c;
        if (col >= 0 && col < n_)
          racc += wx[c] * line[col];
      }
    }
    acc += wy[r] * racc;
  }
  return acc;
}

double ImageGrid::sample_linear(Vec2 x) const {
  const double fx = index_of(x.x);
  const double fy = index_of(x.y);
  const int cx = static_cast<int>(std::floor(fx));
  const int cy = static_cast<int>(std::floor(fy));
  const double tx = fx - cx;
  const double ty = fy - cy;
  double acc = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const int row = cy + r;
      const int col = cx + c;
      if (row < 0 || col < 0 || row >= n_ || col >= n_)
        continue;
      acc += (r ? ty : 1.0 - ty) * (c ? tx : 1.0 - tx) * at(row, col);
    }
  return acc;
}

ImageGrid make_grid(int n, double half_extent, const std::function<double(Vec2)>& f) {
  ImageGrid g(n, half_extent);
  parallel_for(0, n, [&](int row) {
    for (int col = 0; col < n; ++col)
      g.at(row, col) = f(g.cell_center(row, col));
  });
  return g;
}

Sinogram::Sinogram(int m, int p_count, double p_half_extent)
    : m_(m), p_count_(p_count), p_half_extent_(p_half_extent) {
  require(m >= 1, "sinogram needs at least one angle");
  require(p_count >= 2, "sinogram needs at least two p samples");
  require(p_half_extent > 0.0 && std::isfinite(p_half_extent), "sinogram p half extent must be positive");
  values_.assign(static_cast<size_t>(m) * p_count, 0.0);
  psi_.assign(static_cast<size_t>(m), 1.0);
}

double Sinogram::angle(int j) const { return j * std::numbers::pi / m_; }
double Sinogram::step() const { return std::numbers::pi / m_; }

SpectralGrid::SpectralGrid(int n, double half_extent) : n_(n), half_extent_(half_extent) {
  require(n >= 2 && is_power_of_two(n), "spectral grid size must be a power of two");
  values_.assign(static_cast<size_t>(n) * n, {0.0, 0.0});
}

double SpectralGrid::frequency(int k) const {
  const int signed_k = k < n_ / 2 ? k : k - n_;
  return std::numbers::pi / half_extent_ * signed_k;
}

std::complex<double> SpectralGrid::continuous(int row, int col) const {
  const double dx = 2.0 * half_extent_ / n_;
  const double x0 = -half_extent_ + 0.5 * dx;
  const Vec2 w = xi(row, col);
  return dx * dx * std::polar(1.0, -x0 * (w.x + w.y)) * at(row, col);
}

SpectralGrid fft2(const ImageGrid& img) {
  SpectralGrid spec(img.n(), img.half_extent());
  auto out = spec.values();
  auto in = img.values();
  for (size_t i = 0; i < in.size(); ++i)
    out[i] = {in[i], 0.0};
  detail::fft2_inplace(out, img.n(), false);
  return spec;
}

ImageGrid ifft2(const SpectralGrid& spec) {
  const int n = spec.n();
  std::vector<std::complex<double>> work(spec.values().begin(), spec.values().end());
  detail::fft2_inplace(work, n, true);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  std::vector<double> values(work.size());
  for (size_t i = 0; i < work.size(); ++i)
    values[i] = work[i].real() * scale;
  return ImageGrid(n, spec.half_extent(), std::move(values));
}

ImageGrid apply_multiplier(const ImageGrid& img, const std::function<double(Vec2)>& multiplier, int pad_factor) {
  require(pad_factor >= 1 && is_power_of_two(pad_factor), "pad factor must be a power of two");
  const int n = img.n();
  const int big = n * pad_factor;
  const int offset = n * (pad_factor - 1) / 2;
  SpectralGrid spec(big, img.half_extent() * pad_factor);
  auto data = spec.values();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      data[static_cast<size_t>(r + offset) * big + (c + offset)] = {img.at(r, c), 0.0};
  detail::fft2_inplace(data, big, false);
  parallel_for(0, big, [&](int r) {
    for (int c = 0; c < big; ++c)
      data[static_cast<size_t>(r) * big + c] *= multiplier(spec.xi(r, c));
  });
  detail::fft2_inplace(data, big, true);
  const double scale = 1.0 / (static_cast<double>(big) * big);
  ImageGrid out(n, img.half_extent());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out.at(r, c) = data[static_cast<size_t>(r + offset) * big + (c + offset)].real() * scale;
  return out;
}

namespace {

void check_shape(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b))
    throw ArgumentError("grid shape mismatch: (" + std::to_string(a.n()) + ", " + std::to_string(a.half_extent()) +
                        ") vs (" + std::to_string(b.n()) + ", " + std::to_string(b.half_extent()) + ")");
}

double ratio(double num, double den) {
  if (num == 0.0)
    return 0.0;
  return den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
}

double quadratic_offset(double left, double mid, double right) {
  const double den = left - 2.0 * mid + right;
  if (den == 0.0)
    return 0.0;
  return std::clamp(0.5 * (left - right) / den, -0.5, 0.5);
}

} // namespace

std::vector<Peak> find_peaks(const ImageGrid& field, double threshold) {
  const int n = field.n();
  double vmax = 0.0;
  for (double v : field.values())
    vmax = std::max(vmax, v);
  std::vector<Peak> peaks;
  if (vmax <= 0.0)
    return peaks;
  const double cut = threshold * vmax;
  for (int r = 1; r + 1 < n; ++r) {
    for (int c = 1; c + 1 < n; ++c) {
      const double v = field.at(r, c);
      if (v <= cut)
        continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr || dc) && field.at(r + dr, c + dc) >= v) {
            is_max = false;
            break;
          }
        }
      if (!is_max)
        continue;
      const double ox = quadratic_offset(field.at(r, c - 1), v, field.at(r, c + 1));
      const double oy = quadratic_offset(field.at(r - 1, c), v, field.at(r + 1, c));
      peaks.push_back({{field.coord(c) + ox * field.cell(), field.coord(r) + oy * field.cell()}, v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  return peaks;
}

Metrics compare(const ImageGrid& a, const ImageGrid& b, double peak_threshold) {
  check_shape(a, b);
  ImageGrid diff(a.n(), a.half_extent());
  double num2 = 0.0, den2 = 0.0, num_inf = 0.0, den_inf = 0.0;
  auto av = a.values();
  auto bv = b.values();
  auto dv = diff.values();
  for (size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    dv[i] = std::abs(d);
    num2 += d * d;
    den2 += bv[i] * bv[i];
    num_inf = std::max(num_inf, std::abs(d));
    den_inf = std::max(den_inf, std::abs(bv[i]));
  }
  Metrics m;
  m.l2_rel = ratio(std::sqrt(num2), std::sqrt(den2));
  m.linf_rel = ratio(num_inf, den_inf);
  m.peaks = find_peaks(diff, peak_threshold);
  return m;
}

double l2_norm_masked(const ImageGrid& a, const std::function<bool(Vec2)>& inside) {
  double acc = 0.0;
  for (int r = 0; r < a.n(); ++r)
    for (int c = 0; c < a.n(); ++c)
      if (inside(a.cell_center(r, c)))
        acc += a.at(r, c) * a.at(r, c);
  return std::sqrt(acc);
}

double l2_rel_masked(const ImageGrid& a, const ImageGrid& b, const std::function<bool(Vec2)>& inside) {
  check_shape(a, b);
  double num = 0.0, den = 0.0;
  for (int r = 0; r < a.n(); ++r)
    for (int c = 0; c < a.n(); ++c)
      if (inside(a.cell_center(r, c))) {
        const double d = a.at(r, c) - b.at(r, c);
        num += d * d;
        den += b.at(r, c) * b.at(r, c);
      }
  return ratio(std::sqrt(num), std::sqrt(den));
}

ImageGrid analytic_envelope(const ImageGrid& img, Vec2 d) {
  const int n = img.n();
  SpectralGrid spec = fft2(img);
  auto data = spec.values();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double s = spec.xi(r, c).dot(d);
      auto& v = data[static_cast<size_t>(r) * n + c];
      if (s > 0.0)
        v *= 2.0;
      else if (s < 0.0)
        v = 0.0;
    }
  detail::fft2_inplace(data, n, true);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  ImageGrid out(n, img.half_extent());
  auto ov = out.values();
  for (size_t i = 0; i < ov.size(); ++i)
    ov[i] = std::abs(data[i]) * scale;
  return out;
}

ImageGrid operator-(const ImageGrid& a, const ImageGrid& b) {
  check_shape(a, b);
  ImageGrid out(a.n(), a.half_extent());
  for (size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = a.values()[i] - b.values()[i];
  return out;
}

ImageGrid operator+(const ImageGrid& a, const ImageGrid& b) {
  check_shape(a, b);
  ImageGrid out(a.n(), a.half_extent());
  for (size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = a.values()[i] + b.values()[i];
  return out;
}

ImageGrid operator*(double s, const ImageGrid& a) {
  ImageGrid out(a.n(), a.half_extent());
  for (size_t i = 0; i < out.values().size(); ++i)
    out.values()[i] = s * a.values()[i];
  return out;
}

namespace {
int g_threads = 1;
}

int thread_count() { return g_threads; }
void set_thread_count(int n) { g_threads = std::max(1, n); }

} // namespace radonlab
