#pragma once

#include "radonlab/grid.hpp"
#include "radonlab/io.hpp"

#include <string>
#include <vector>

namespace radonlab {

enum class SingularityKind { pv_recip, inv_sqrt_minus, log_abs };

SingularityKind parse_singularity_kind(const std::string& s);
const char* to_string(SingularityKind k);

/// Singular profile convolved with a centered Gaussian of standard deviation
/// sigma (sigma = 0: the bare profile):
///   pv_recip        pv 1/x
///   inv_sqrt_minus  -x_-^{-1/2}
///   log_abs         log|x|
double singular_profile(SingularityKind kind, double x, double sigma);

struct FitOptions {
  double window = 0.0;       // half-width about p0; 0: 30 samples
  double core = 0.0;         // excluded half-width about p0; 0: 2 samples
  double refine = 0.0;       // p0 search half-range; 0: 2 samples
  double sigma = 0.0;        // regularization of the model
  double reject_above = 0.5; // residual threshold
};

struct SingularityModel {
  SingularityKind kind = SingularityKind::pv_recip;
  double c = 0.0;
  double p0 = 0.0;
  double window = 0.0;
  double residual = 0.0; // |y - fit| / |y - affine fit| on the window minus the core
  double background[2] = {0.0, 0.0};
  int samples = 0;
  bool accepted = false;
  std::string diagnostic;
};

/// Least-squares fit of c * profile(p - p0) + b0 + b1 p over the window,
/// with p0 refined on a sub-sample lattice within +-refine of p0_guess.
SingularityModel fit_singularity(const std::vector<CrosscutSample>& cut, SingularityKind kind, double p0_guess,
                                 const FitOptions& opts);

std::string format_fit(const SingularityModel& m);

struct CornerLine {
  double angle = 0.0;      // phi_j
  double crossing = 0.0;   // crosscut coordinate of the line through the corner
  bool enters = false;     // line passes through the open sector
  bool found = false;
  bool sign_ok = false;
  double peak = 0.0;       // high-passed value at the matched extremum
};

struct CornerCheck {
  std::vector<CornerLine> lines;
  int predicted = 0;
  int matched = 0;
  int sign_matched = 0;
  int spurious = 0; // extrema above threshold with no predicted line nearby
  double matched_fraction = 0.0;
  double sign_fraction = 0.0;
};

struct CornerCheckOptions {
  double crosscut_y = -1.0;
  double sector_start = 0.0; // sector directions (radians), counterclockwise
  double sector_end = 0.0;
  double threshold = 0.003;  // relative to max |recon|
  double match_cells = 2.0;
  double highpass_cells = 12.0;
};

/// Extrema of a horizontal crosscut (high-passed by subtracting a moving
/// average) matched against the crossings of the m lines through the corner.
/// Lines entering the sector should give upward peaks, the others downward.
CornerCheck corner_line_check(const ImageGrid& recon, Vec2 corner, int m, const CornerCheckOptions& opts);

} // namespace radonlab
