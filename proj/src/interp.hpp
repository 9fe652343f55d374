#pragma once

#include <array>
#include <cmath>
#include <span>

namespace radonlab::detail {

/// Keys cubic convolution weights (a = -1/2) for taps at offsets -1, 0, 1, 2
/// given fractional position t in [0, 1).
inline std::array<double, 4> cubic_weights(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t,
          0.5 * t3 - 0.5 * t2};
}

/// Cubic interpolation of uniformly sampled data at fractional index u.
/// Samples outside [0, size) are zero.
inline double cubic_at(std::span<const double> data, double u) {
  const double fl = std::floor(u);
  const long base = static_cast<long>(fl) - 1;
  const long size = static_cast<long>(data.size());
  if (base + 3 < 0 || base >= size)
    return 0.0;
  const auto w = cubic_weights(u - fl);
  double acc = 0.0;
  if (base >= 0 && base + 3 < size) {
    const double* d = data.data() + base;
    return w[0] * d[0] + w[1] * d[1] + w[2] * d[2] + w[3] * d[3];
  }
  for (int k = 0; k < 4; ++k) {
    const long idx = base + k;
    if (idx >= 0 && idx < size)
      acc += w[k] * data[idx];
  }
  return acc;
}

inline double linear_at(std::span<const double> data, double u) {
  const double fl = std::floor(u);
  const long i0 = static_cast<long>(fl);
  const double t = u - fl;
  const long size = static_cast<long>(data.size());
  double acc = 0.0;
  if (i0 >= 0 && i0 < size)
    acc += (1.0 - t) * data[i0];
  if (i0 + 1 >= 0 && i0 + 1 < size)
    acc += t * data[i0 + 1];
  return acc;
}

} // namespace radonlab::detail
