#pragma once

#include "radonlab/grid.hpp"
#include "radonlab/phantoms.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace radonlab {

/// Flat key = value experiment description. '#' starts a comment. Unknown
/// and repeated keys are rejected with the offending line number.
class ExperimentConfig {
public:
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<config>");
  static ExperimentConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get(const std::string& key, double fallback) const;
  int get(const std::string& key, int fallback) const;
  bool get(const std::string& key, bool fallback) const;
  Vec2 get(const std::string& key, Vec2 fallback) const;
  void set(const std::string& key, const std::string& value);

  const std::string& source() const { return source_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Every key the parser accepts.
  static const std::vector<std::string>& known_keys();

private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

/// phantom.* keys; angle in degrees.
PhantomSpec phantom_from_config(const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string relation; // how value is compared with limit, e.g. "<"
};

struct ExperimentReport {
  std::string name;
  std::string kind;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
  std::map<std::string, double> measured; // raw quantities behind the checks
  double seconds = 0.0;
  bool all_pass() const;
  /// measured[key]; ArgumentError when absent.
  double measurement(const std::string& key) const;
};

/// Runs the experiment named by the `experiment` key and writes its outputs
/// under out_dir (created if missing; empty: output.dir or the current
/// directory).
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "");

/// One line per check, "PASS|FAIL name value relation limit", then a summary.
std::string format_report(const ExperimentReport& r);

// Analysis helpers shared by the experiments and the tests.

/// Sum of squares times cell area over cells centered in B(c, r).
double ball_energy(const ImageGrid& img, Vec2 c, double r);

/// Fraction of the energy of `artifact` (cells within B(0, r_max)) lying within
/// distance `width` of the polyline through `curve`.
double band_energy_fraction(const ImageGrid& artifact, std::span<const Vec2> curve, double width, double r_max);

/// Densely sampled edge curve of an edge phantom (inside its localization).
std::vector<Vec2> edge_curve(const PhantomSpec& spec, double spacing);

struct DisplacementCheckOptions {
  double threshold = 0.2;   // peaks of |artifact| relative to the largest
  double dilate_cells = 2.0;
  double exclude = 0.0;     // band about the disk boundary ignored; 0: 4 cells + 3 / lambda
  double r_max = 0.0;       // peaks farther from the origin ignored; 0: 0.95 of the grid half extent
};

struct DisplacementCheck {
  int peaks = 0;       // above threshold
  int considered = 0;  // outside the exclusion band
  int compliant = 0;
  double max_violation = 0.0;
  std::vector<Peak> violations;
};

/// Each considered peak of |artifact| lies on two tangent lines of the disk;
/// it complies if, for one of them, its signed distance from the tangency
/// point falls in the interpolation-method displacement interval (dilated).
DisplacementCheck disk_displacement_check(const ImageGrid& artifact, const PhantomSpec& disk,
                                          const DisplacementCheckOptions& opts);

/// Coefficient of the singular part of a single direct-method tangent line
/// artifact: flat edge f / (2 pi m); convex edge 2 sqrt(2) f / (4 m sqrt(kappa)),
/// kappa = 2a; corner f / (2 pi m) (log coefficient).
double conormal_coefficient(const PhantomSpec& spec, int m);

} // namespace radonlab
