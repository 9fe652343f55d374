#pragma once

#include "radonlab/grid.hpp"
#include "radonlab/phantoms.hpp"

#include <string>
#include <vector>

namespace radonlab {

enum class RayInterp { linear, cubic };

RayInterp parse_ray_interp(const std::string& s);

struct ProjectionConfig {
  int m = 36;
  int p_count = 0;      // 0: next power of two >= 2n
  double R = 0.0;       // p half extent and support radius; 0: grid half extent
  RayInterp interp = RayInterp::cubic;
  double support_tol = 1e-6; // relative l1 mass allowed outside B(0, R)
};

/// Resolves defaults against a grid of size n and half extent L.
ProjectionConfig resolved(const ProjectionConfig& cfg, int n, double half_extent);

/// Line integrals over {x . omega(phi_j) = p_i}, phi_j = j pi / m. Rays are
/// sampled at half the cell size inside B(0, R).
Sinogram radon(const ImageGrid& img, const ProjectionConfig& cfg);

/// Same geometry at arbitrary angles; rows are returned angle-major.
std::vector<double> radon_at_angles(const ImageGrid& img, std::span<const double> angles, int p_count, double R,
                                    RayInterp interp);

/// Line integrals of the analytic phantom (no rasterization). cfg.p_count and
/// cfg.R must be set.
Sinogram radon_phantom(const PhantomSpec& spec, const ProjectionConfig& cfg);
std::vector<double> radon_phantom_at_angles(const PhantomSpec& spec, std::span<const double> angles, int p_count,
                                            double R);

/// Fraction of the l1 mass of img lying in cells centered outside B(0, R).
double mass_outside(const ImageGrid& img, double R);

/// Compares the 1-D transform of every projection with the radial slice of
/// the 2-D transform of img (bicubic on a 4x zero-padded spectrum).
Metrics fourier_slice_check(const ImageGrid& img, const ProjectionConfig& cfg);

/// Energy sum_xi |F_xi g_j|^2 of each projection's spectrum.
std::vector<double> slice_energies(const Sinogram& sino);

} // namespace radonlab
