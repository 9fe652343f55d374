#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace radonlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  /// Rotation by pi/2: (x, y) -> (-y, x).
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 direction(double phi) { return {std::cos(phi), std::sin(phi)}; }

bool is_power_of_two(int n);
int next_power_of_two(int n);

/// Square raster on [-L, L]^2. Cell (row, col) is centered at
/// x = -L + (col + 1/2) * 2L/n, y = -L + (row + 1/2) * 2L/n. Row-major.
class ImageGrid {
public:
  ImageGrid(int n, double half_extent);
  ImageGrid(int n, double half_extent, std::vector<double> values);

  int n() const { return n_; }
  double half_extent() const { return half_extent_; }
  double cell() const { return 2.0 * half_extent_ / n_; }
  /// Physical coordinate of the center of cell index idx along either axis.
  double coord(int idx) const { return -half_extent_ + (idx + 0.5) * cell(); }
  Vec2 cell_center(int row, int col) const { return {coord(col), coord(row)}; }
  /// Fractional cell index of physical coordinate c (inverse of coord).
  double index_of(double c) const { return (c + half_extent_) / cell() - 0.5; }

  double& at(int row, int col) { return values_[static_cast<size_t>(row) * n_ + col]; }
  double at(int row, int col) const { return values_[static_cast<size_t>(row) * n_ + col]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(int r) { return {values_.data() + static_cast<size_t>(r) * n_, static_cast<size_t>(n_)}; }
  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<size_t>(r) * n_, static_cast<size_t>(n_)};
  }

  bool same_shape(const ImageGrid& o) const { return n_ == o.n_ && half_extent_ == o.half_extent_; }

  /// Keys cubic convolution interpolation (a = -1/2); zero outside the grid.
  double sample_cubic(Vec2 x) const;
  double sample_linear(Vec2 x) const;

private:
  int n_;
  double half_extent_;
  std::vector<double> values_;
};

/// Builds a grid by evaluating f at every cell center.
ImageGrid make_grid(int n, double half_extent, const std::function<double(Vec2)>& f);

/// Parallel-beam data: m angles phi_j = j*pi/m in [0, pi), p_count pixel-centered
/// offsets p_i = -R + (i + 1/2) * 2R/p_count. Angle-major.
class Sinogram {
public:
  Sinogram(int m, int p_count, double p_half_extent);

  int m() const { return m_; }
  int p_count() const { return p_count_; }
  double p_half_extent() const { return p_half_extent_; }
  double dp() const { return 2.0 * p_half_extent_ / p_count_; }
  double p(int i) const { return -p_half_extent_ + (i + 0.5) * dp(); }
  double angle(int j) const;
  double step() const;

  double& at(int j, int i) { return values_[static_cast<size_t>(j) * p_count_ + i]; }
  double at(int j, int i) const { return values_[static_cast<size_t>(j) * p_count_ + i]; }
  std::span<double> row(int j) {
    return {values_.data() + static_cast<size_t>(j) * p_count_, static_cast<size_t>(p_count_)};
  }
  std::span<const double> row(int j) const {
    return {values_.data() + static_cast<size_t>(j) * p_count_, static_cast<size_t>(p_count_)};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> psi_mask() { return psi_; }
  std::span<const double> psi_mask() const { return psi_; }

private:
  int m_;
  int p_count_;
  double p_half_extent_;
  std::vector<double> values_;
  std::vector<double> psi_;
};

/// Unnormalized 2-D DFT of an ImageGrid, stored in FFT index order. Index k
/// maps to the lattice frequency (pi/L) * (k < n/2 ? k : k - n).
class SpectralGrid {
public:
  SpectralGrid(int n, double half_extent);

  int n() const { return n_; }
  double half_extent() const { return half_extent_; }
  double frequency(int k) const;
  /// Frequency vector of bin (row, col): (xi1, xi2) = (freq(col), freq(row)).
  Vec2 xi(int row, int col) const { return {frequency(col), frequency(row)}; }

  std::complex<double>& at(int row, int col) { return values_[static_cast<size_t>(row) * n_ + col]; }
  std::complex<double> at(int row, int col) const { return values_[static_cast<size_t>(row) * n_ + col]; }
  std::span<std::complex<double>> values() { return values_; }
  std::span<const std::complex<double>> values() const { return values_; }

  /// Continuous Fourier transform estimate  int f(x) e^{-i x.xi} dx  at the
  /// lattice point of bin (row, col): cell area times the half-cell phase
  /// correction for the pixel-centered layout.
  std::complex<double> continuous(int row, int col) const;

private:
  int n_;
  double half_extent_;
  std::vector<std::complex<double>> values_;
};

/// Forward transform: sum_x f(x) e^{-i x.xi}, no normalization.
SpectralGrid fft2(const ImageGrid& img);
/// Inverse transform, carries the 1/n^2 factor. Returns the real part.
ImageGrid ifft2(const SpectralGrid& spec);

/// Applies a real Fourier multiplier m(xi) (lattice frequencies of a grid
/// zero-padded by pad_factor) and crops back. pad_factor >= 1.
ImageGrid apply_multiplier(const ImageGrid& img, const std::function<double(Vec2)>& multiplier,
                           int pad_factor = 1);

struct Peak {
  Vec2 x;
  double magnitude = 0.0;
};

struct Metrics {
  double l2_rel = 0.0;
  double linf_rel = 0.0;
  std::vector<Peak> peaks;
};

/// l2_rel = |a-b|_2/|b|_2 (0/0 = 0); peaks are strict local maxima of |a-b|
/// above peak_threshold * max|a-b|, refined by per-axis quadratic fits.
Metrics compare(const ImageGrid& a, const ImageGrid& b, double peak_threshold);

/// Relative l2 error restricted to cells whose centers satisfy the predicate.
double l2_rel_masked(const ImageGrid& a, const ImageGrid& b, const std::function<bool(Vec2)>& inside);
double l2_norm_masked(const ImageGrid& a, const std::function<bool(Vec2)>& inside);

/// Strict local maxima (8-neighbourhood) of a nonnegative field above
/// threshold * max, sorted by decreasing magnitude.
std::vector<Peak> find_peaks(const ImageGrid& field, double threshold);

/// |analytic signal| with respect to a frequency half-plane: keeps spectral
/// content with xi.d > 0 (doubled), removes xi.d < 0. For a real wave packet
/// with carrier along d this is its envelope.
ImageGrid analytic_envelope(const ImageGrid& img, Vec2 d);

ImageGrid operator-(const ImageGrid& a, const ImageGrid& b);
ImageGrid operator+(const ImageGrid& a, const ImageGrid& b);
ImageGrid operator*(double s, const ImageGrid& a);

} // namespace radonlab
