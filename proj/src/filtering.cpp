#include "radonlab/filtering.hpp"

#include "fft.hpp"
#include "radonlab/error.hpp"
#include "radonlab/parallel.hpp"

#include <cmath>
#include <numbers>

namespace radonlab {

using std::numbers::pi;

KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "dirac")
    return KernelKind::dirac;
  if (s == "sinc")
    return KernelKind::sinc;
  if (s == "lan3" || s == "lanczos3")
    return KernelKind::lanczos3;
  if (s == "lan3x2" || s == "lanczos3_stretched")
    return KernelKind::lanczos3_stretched;
  throw ArgumentError("unknown kernel '" + s + "' (expected dirac|sinc|lan3|lan3x2)");
}

const char* to_string(KernelKind k) {
  switch (k) {
  case KernelKind::dirac:
    return "dirac";
  case KernelKind::sinc:
    return "sinc";
  case KernelKind::lanczos3:
    return "lan3";
  case KernelKind::lanczos3_stretched:
    return "lan3x2";
  }
  return "?";
}

double sinc(double x) {
  if (std::abs(x) < 1e-8)
    return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double lanczos3(double x) {
  if (std::abs(x) >= 3.0)
    return 0.0;
  return sinc(pi * x) * sinc(pi * x / 3.0);
}

double Kernel1D::half_width() const {
  switch (kind) {
  case KernelKind::dirac:
    return 0.0;
  case KernelKind::sinc:
    return sinc_truncation / 2.0;
  case KernelKind::lanczos3:
    return 3.0;
  case KernelKind::lanczos3_stretched:
    return 6.0;
  }
  return 0.0;
}

double Kernel1D::stretch() const { return kind == KernelKind::lanczos3_stretched ? 2.0 : 1.0; }

double Kernel1D::operator()(double t) const {
  switch (kind) {
  case KernelKind::dirac:
    return t == 0.0 ? 1.0 : 0.0;
  case KernelKind::sinc: {
    if (std::abs(t) >= sinc_truncation / 2.0)
      return 0.0;
    const double c = std::cos(pi * t / sinc_truncation);
    return sinc(pi * t) * c * c;
  }
  case KernelKind::lanczos3:
    return lanczos3(t);
  case KernelKind::lanczos3_stretched:
    return lanczos3(t / 2.0);
  }
  return 0.0;
}

double ramp_kernel(double t, double dp) {
  const double W = pi / dp;
  double v;
  if (std::abs(t) < 1e-9 * dp) {
    v = W * W / 2.0;
  } else {
    v = W * std::sin(W * t) / t + (std::cos(W * t) - 1.0) / (t * t);
  }
  return v / (4.0 * pi * pi);
}

namespace {

// Linear convolution of a length-P row with kernel samples at lags
// (l + shift) * dp, l in [-(P-1), P-1], via a 2P-point circular FFT.
void convolve_ramp(std::span<const std::complex<double>> row_spec, int P, double dp, double shift,
                   std::vector<std::complex<double>>& work, std::span<double> out, int stride, int offset) {
  const int N = 2 * P;
  std::vector<std::complex<double>> ker(N);
  for (int l = 0; l < N; ++l) {
    const int lag = l < P ? l : l - N;
    ker[l] = {dp * ramp_kernel((lag + shift) * dp, dp), 0.0};
  }
  detail::fft_inplace(ker, false);
  work.assign(row_spec.begin(), row_spec.end());
  for (int k = 0; k < N; ++k)
    work[k] *= ker[k];
  detail::fft_inplace(work, true);
  for (int i = 0; i < P; ++i)
    out[static_cast<size_t>(i) * stride + offset] = work[i].real() / N;
}

std::vector<std::complex<double>> padded_spectrum(std::span<const double> row) {
  const size_t P = row.size();
  std::vector<std::complex<double>> spec(2 * P);
  for (size_t i = 0; i < P; ++i)
    spec[i] = {row[i], 0.0};
  detail::fft_inplace(spec, false);
  return spec;
}

void ramp_periodic_row(std::span<const double> row, double dp, std::span<double> out) {
  const int P = static_cast<int>(row.size());
  std::vector<std::complex<double>> work(row.begin(), row.end());
  detail::fft_inplace(work, false);
  for (int k = 0; k < P; ++k) {
    const int sk = k <= P / 2 ? k : k - P;
    const double xi = 2.0 * pi * sk / (P * dp);
    work[k] *= std::abs(xi) / (4.0 * pi);
  }
  detail::fft_inplace(work, true);
  for (int i = 0; i < P; ++i)
    out[i] = work[i].real() / P;
}

} // namespace

std::vector<double> ramp_filter_upsampled(std::span<const double> row, double dp) {
  const int P = static_cast<int>(row.size());
  std::vector<double> out(static_cast<size_t>(2 * P));
  const auto spec = padded_spectrum(row);
  std::vector<std::complex<double>> work;
  convolve_ramp(spec, P, dp, 0.0, work, out, 2, 0);
  convolve_ramp(spec, P, dp, 0.5, work, out, 2, 1);
  return out;
}

Sinogram ramp_filter(const Sinogram& sino, RampMode mode) {
  require(is_power_of_two(sino.p_count()), "ramp filter needs a power-of-two p_count");
  Sinogram out(sino.m(), sino.p_count(), sino.p_half_extent());
  std::copy(sino.psi_mask().begin(), sino.psi_mask().end(), out.psi_mask().begin());
  const int P = sino.p_count();
  parallel_for(0, sino.m(), [&](int j) {
    if (mode == RampMode::periodic) {
      ramp_periodic_row(sino.row(j), sino.dp(), out.row(j));
      return;
    }
    const auto spec = padded_spectrum(sino.row(j));
    std::vector<std::complex<double>> work;
    convolve_ramp(spec, P, sino.dp(), 0.0, work, out.row(j), 1, 0);
  });
  return out;
}

std::vector<double> hilbert(std::span<const double> row) {
  const int P = static_cast<int>(row.size());
  std::vector<std::complex<double>> work(row.begin(), row.end());
  detail::fft_inplace(work, false);
  for (int k = 0; k < P; ++k) {
    if (k == 0 || 2 * k == P)
      work[k] = 0.0;
    else if (2 * k < P)
      work[k] *= std::complex<double>(0.0, -1.0);
    else
      work[k] *= std::complex<double>(0.0, 1.0);
  }
  detail::fft_inplace(work, true);
  std::vector<double> out(row.size());
  for (int i = 0; i < P; ++i)
    out[i] = work[i].real() / P;
  return out;
}

std::vector<double> angular_weights(const Kernel1D& k, double sample_ratio, int& support) {
  require(sample_ratio > 0.0, "kernel sample ratio must be positive");
  support = static_cast<int>(std::floor(k.half_width() / sample_ratio));
  std::vector<double> w(static_cast<size_t>(2 * support + 1));
  double mass = 0.0;
  for (int i = -support; i <= support; ++i) {
    w[i + support] = k(i * sample_ratio);
    mass += w[i + support];
  }
  if (mass == 0.0)
    throw NumericalError("angular kernel has zero discrete mass");
  for (double& v : w)
    v /= mass;
  return w;
}

std::vector<double> circular_convolve_angle(std::span<const double> series, const Kernel1D& k, double sample_ratio) {
  int support = 0;
  const auto w = angular_weights(k, sample_ratio, support);
  const int N = static_cast<int>(series.size());
  require(N >= 1, "empty angular series");
  std::vector<double> out(series.size(), 0.0);
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (int i = -support; i <= support; ++i) {
      const int idx = ((n - i) % N + N) % N;
      acc += w[i + support] * series[idx];
    }
    out[n] = acc;
  }
  return out;
}

PoissonCheck poisson_check(std::span<const std::complex<double>> samples,
                           const std::function<std::complex<double>(int)>& coeff, int max_k) {
  require(samples.size() >= 2 && samples.size() % 2 == 0, "poisson_check needs 2m samples");
  const int m = static_cast<int>(samples.size() / 2);
  PoissonCheck r;
  std::complex<double> sum = 0.0;
  for (auto v : samples)
    sum += v;
  r.lhs = sum * (pi / m);
  std::complex<double> acc = coeff(0);
  for (int K = 0; K <= max_k; ++K) {
    if (K > 0)
      acc += coeff(2 * m * K) + coeff(-2 * m * K);
    r.rhs.push_back(acc);
    r.residual.push_back(std::abs(r.lhs - acc));
  }
  return r;
}

std::vector<std::complex<double>> dense_fourier_coefficients(std::span<const std::complex<double>> samples) {
  std::vector<std::complex<double>> c(samples.begin(), samples.end());
  detail::fft_inplace(c, false);
  const double scale = 2.0 * pi / static_cast<double>(samples.size());
  for (auto& v : c)
    v *= scale;
  return c;
}

} // namespace radonlab
