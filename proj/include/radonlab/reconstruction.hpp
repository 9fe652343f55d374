#pragma once

#include "radonlab/filtering.hpp"
#include "radonlab/grid.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace radonlab {

/// Even limited-angle weight psi(omega(phi)), phi mod pi.
struct PsiWindow {
  enum class Kind { one, zero, raised_cosine, samples };
  Kind kind = Kind::one;
  double center = 0.0;     // raised_cosine, radians
  double half_width = 0.0; // raised_cosine, radians
  double flat = 0.0;       // raised_cosine: weight 1 within this distance of center
  std::vector<double> values; // samples: 2m values at phi = k pi / m over the full circle

  double operator()(double phi) const;
  void validate() const;
  bool is_one() const { return kind == Kind::one; }
};

/// "one", "zero", "cos2:<center_deg>:<half_width_deg>[:<flat_deg>]".
PsiWindow parse_psi(const std::string& s);

/// Fills psi_mask with psi(phi_j) and scales the rows.
Sinogram apply_psi(const Sinogram& sino, const PsiWindow& psi);

enum class Method { direct, interp, multiplier };

Method parse_method(const std::string& s);
const char* to_string(Method m);

struct ReconConfig {
  Method method = Method::direct;
  Kernel1D kernel{KernelKind::lanczos3};
  int kmax = 2;
  int upsample = 8; // fine angles per data angle for the interpolation method
  std::optional<Vec2> refocus_center;
  PsiWindow psi;
};

struct ReconStats {
  /// Number of (x, angle) evaluations whose p fell outside the data range.
  long out_of_range = 0;
};

/// Backprojection of filtered data, evaluable at arbitrary points. The data
/// already carry psi (see apply_psi).
class Backprojector {
public:
  /// method must be direct or interp.
  Backprojector(const Sinogram& sino, const ReconConfig& cfg);

  double operator()(Vec2 x) const;
  ImageGrid render(int n, double half_extent, ReconStats* stats = nullptr) const;

  int angle_count() const { return static_cast<int>(angles_.size()); }

private:
  double eval(Vec2 x, long* out_of_range) const;

  std::vector<double> angles_;
  std::vector<Vec2> dirs_;
  std::vector<std::vector<double>> rows_; // sample k at q0_ + k * dq_
  double q0_ = 0.0;
  double dq_ = 0.0;
  double weight_ = 0.0;
  Vec2 focus_{};
};

/// f_{psi,delta}(x) = (2 pi / m) sum_j (H g_j)(x . omega_j), H = (1/4pi)|D_p|.
ImageGrid fbp_direct(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg,
                     ReconStats* stats = nullptr);

/// f_{psi,chi} = R' H g_int with g_int interpolated in angle by cfg.kernel on
/// m * upsample fine angles, weight 2 pi / (m * upsample).
ImageGrid fbp_interp(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg,
                     ReconStats* stats = nullptr);

/// (1 + sum_{k=1}^{kmax} 2 cos(2 m k arg xi)) applied to f_psi; the cosine sum
/// is zero at xi = 0.
ImageGrid fbp_multiplier(const ImageGrid& f_psi, int m, int kmax);

/// Multiplier of one G_k, k >= 1 (2 cos(2 m k arg xi), zero at xi = 0).
ImageGrid artifact_multiplier(const ImageGrid& f_psi, int m, int k);

/// psi(xi / |xi|), DC passes with weight 1.
ImageGrid psi_multiplier(const ImageGrid& img, const PsiWindow& psi);

/// Rows re-parameterized by p~ = p - x0 . omega(phi_j); the p grid is
/// extended (keeping dp) when the shifted data would leave it.
Sinogram refocus(const Sinogram& sino, Vec2 x0);

/// Dispatch on cfg.method for sinogram-driven methods.
ImageGrid reconstruct(const Sinogram& sino, int n, double half_extent, const ReconConfig& cfg,
                      ReconStats* stats = nullptr);

struct ConvolutionIdentity {
  std::vector<double> radii;
  std::vector<double> ring_l2_rel;
  double l2_rel = 0.0; // |f_chi - chi * f_delta| / |f_delta| over all rings
};

/// Evaluates the direct and interpolation reconstructions on polar rings of
/// 2 m U bins (radii from 4 cells to r_max in steps of one cell) and compares
/// f_chi with the angular convolution of f_delta by the discretized chi.
/// conv_kernel overrides the kernel applied to f_delta (dirac gives the plain
/// interp-vs-direct baseline).
ConvolutionIdentity verify_convolution_identity(const Sinogram& sino, const ReconConfig& cfg, double cell,
                                                double r_max, std::optional<Kernel1D> conv_kernel = {});

/// Convolution in the polar angle about the origin with chi(theta / s),
/// sampled every s / upsample and normalized to unit discrete mass.
ImageGrid angular_convolve(const ImageGrid& img, const Kernel1D& k, double s, int upsample = 8);

} // namespace radonlab
