#pragma once

#include "radonlab/grid.hpp"
#include "radonlab/phantoms.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace radonlab {

/// Covector (x, xi). Frequencies here are in the unscaled frame (h = 1), so an
/// angular step s and a frequency xi enter only through s * |xi|.
struct PhaseSpacePoint {
  Vec2 x{};
  Vec2 xi{};
};

/// C_k: (x, xi) -> (x + (2 pi k / (s |xi|)) xi_perp / |xi|, xi).
PhaseSpacePoint canonical_shift(const PhaseSpacePoint& pt, int k, double s);

/// S_k: xi -> xi + 2 pi k / s, component-wise.
Vec2 grid_shift(Vec2 xi, std::array<int, 2> k, Vec2 s);

struct NyquistResult {
  bool ok = false;
  double threshold = 0.0; // pi / (R B)
  double margin = 0.0;    // threshold - s
};

/// Strict s < pi / (R B).
NyquistResult nyquist_ok(double s, double B, double R);

/// The k with x . xi_perp + 2 k pi / s in [-pi/s, pi/s] (ties resolved
/// toward zero).
int aliasing_index(const PhaseSpacePoint& pt, double s);

struct DisplacementInterval {
  bool valid = false;
  std::string note;
  double lo = 0.0; // signed distances along xi_perp / |xi|
  double hi = 0.0;
  double factor_lo = 0.0;
  double factor_hi = 0.0;
};

/// Range of signed displacements of an interpolation-method artifact along
/// the tangent direction: -(x . xi_perp / |xi|) [2k/(2k+1), 2k/(2k-1)], k >= 1.
DisplacementInterval interp_displacement_interval(const PhaseSpacePoint& pt, int k);

/// Union over k >= 1 (the k = 1 interval [2/3, 2] contains all others).
DisplacementInterval interp_displacement_union(const PhaseSpacePoint& pt);

struct BandLimitEstimate {
  double B = 0.0; // semiclassical: h times the unscaled frequency radius
  std::vector<double> shell_radius; // unscaled |xi| at shell centers
  std::vector<double> shell_energy; // energy per shell
  std::vector<double> circle_coeff; // |f_n|, n = 0, 1, ... (circle variant, symmetric max of +-n)
};

/// Smallest |xi| radius holding (1 - eps) of the spectral energy, times h.
BandLimitEstimate estimate_band_limit(const ImageGrid& img, double h, double eps);

/// Circle series sampled at N equispaced angles: smallest B with
/// sum_{|n| > B/h} |f_n|^2 <= eps sum |f_n|^2.
BandLimitEstimate circle_band_limit(std::span<const std::complex<double>> series, double h, double eps);
BandLimitEstimate circle_band_limit(std::span<const double> series, double h, double eps);

struct PredictedArtifact {
  int k = 0;
  Vec2 x{};  // shifted position
  Vec2 xi{};
  Vec2 source{};
  bool inside = false;
};

using ArtifactPrediction = std::vector<PredictedArtifact>;

/// Direct-method artifact locations C_k(x, xi) for the phantom's singular set
/// (coherent: (x0, +-xi0/h); edges: points along the edge with normals scaled
/// to |xi| = B). Entries for |k| <= kmax; `inside` marks the window [-W, W]^2.
/// Duplicates within `dedup` are removed.
ArtifactPrediction predict_artifacts(const PhantomSpec& spec, double s, double window, double B = 0.0,
                                     int kmax = 4, double dedup = 0.0);

/// Points along the edge (about 100) with unit normals.
std::vector<PhaseSpacePoint> singular_set(const PhantomSpec& spec, int samples = 100);

std::string format_prediction(const ArtifactPrediction& p);

struct ArtifactMatch {
  PredictedArtifact prediction;
  double distance = 0.0; // to the nearest detected peak
  bool matched = false;
};

struct ArtifactVerification {
  Metrics metrics;
  std::vector<Peak> peaks;
  std::vector<ArtifactMatch> matches; // inside-window predictions only
  int unmatched_peaks = 0;
};

struct VerifyOptions {
  double peak_threshold = 0.2;
  double match_radius = 0.0;    // 0: two cells
  Vec2 envelope_direction{};    // nonzero: detect peaks on the analytic envelope along it
  double exclude_radius = 0.0;  // peaks this close to a source point are ignored
};

/// Matches peaks of |recon - reference| (or its envelope) against predictions.
ArtifactVerification verify_artifacts(const ArtifactPrediction& prediction, const ImageGrid& recon,
                                      const ImageGrid& reference, const VerifyOptions& opts);

} // namespace radonlab
