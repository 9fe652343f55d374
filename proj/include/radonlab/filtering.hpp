#pragma once

#include "radonlab/grid.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace radonlab {

enum class KernelKind { dirac, sinc, lanczos3, lanczos3_stretched };

KernelKind parse_kernel_kind(const std::string& s);
const char* to_string(KernelKind k);

struct Kernel1D {
  KernelKind kind = KernelKind::lanczos3;

  /// Support half-width in sample units.
  double half_width() const;
  /// Dilation factor s of chi(t / s) relative to its base kernel; the
  /// interpolation weights chi(t / s) / s then have unit mass per sample.
  double stretch() const;
  double operator()(double t) const;
};

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Lan3(x) = h0(3 - |x|) sinc(pi x) sinc(pi x / 3).
double lanczos3(double x);

/// Length of the tapered sinc ("sinc" kernel): sinc(pi t) * cos^2(pi t / 64), |t| <= 32.
inline constexpr double sinc_truncation = 64.0;

enum class RampMode {
  /// Zero-extended linear convolution with the band-limited ramp kernel; its
  /// transfer function is exactly |xi|/(4 pi) on (-pi/dp, pi/dp).
  linear,
  /// Multiplier |xi_k|/(4 pi) on the periodic p-lattice of the row.
  periodic
};

/// Applies the ramp filter (1/4pi)|D_p| row by row.
Sinogram ramp_filter(const Sinogram& sino, RampMode mode = RampMode::linear);

/// Ramp filter of one row sampled at spacing dp, evaluated at the samples and
/// at the midpoints: out[2i] at p_i, out[2i+1] at p_i + dp/2.
std::vector<double> ramp_filter_upsampled(std::span<const double> row, double dp);

/// Values of the band-limited ramp kernel (1/4pi) * (1/2pi) * int_{|xi|<pi/dp} |xi| e^{i xi t} d xi.
double ramp_kernel(double t, double dp);

/// Periodic Hilbert transform: multiplier -i sgn(xi), DC and Nyquist bins zeroed.
std::vector<double> hilbert(std::span<const double> row);

/// Periodic convolution of an angular series with kernel chi sampled at
/// t_i = i * sample_ratio (kernel units per series step), normalized to unit
/// discrete mass.
std::vector<double> circular_convolve_angle(std::span<const double> series, const Kernel1D& k, double sample_ratio);

/// Discrete weights used by circular_convolve_angle, indexed by offset
/// -support..support. Sum is 1.
std::vector<double> angular_weights(const Kernel1D& k, double sample_ratio, int& support);

struct PoissonCheck {
  std::complex<double> lhs;                 // (pi/m) sum_k rho(pi k/m)
  std::vector<std::complex<double>> rhs;    // partial sums over |k| <= K, K = 0..
  std::vector<double> residual;             // |lhs - rhs[K]|
};

/// samples: rho(pi k / m), k = 0..2m-1. coeff(n) = int_0^{2pi} rho e^{-i n phi} dphi.
PoissonCheck poisson_check(std::span<const std::complex<double>> samples,
                           const std::function<std::complex<double>(int)>& coeff, int max_k);

/// Fourier coefficients int_0^{2pi} rho e^{-i n phi} from N equispaced samples
/// (trapezoid rule, exact for trig polynomials of degree < N/2).
std::vector<std::complex<double>> dense_fourier_coefficients(std::span<const std::complex<double>> samples);

} // namespace radonlab
