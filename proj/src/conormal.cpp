#include "radonlab/conormal.hpp"

#include "radonlab/error.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multifit.h>
#include <gsl/gsl_sf_dawson.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <memory>
#include <numbers>

namespace radonlab {

namespace {

constexpr double pi = std::numbers::pi;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

thread_local std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> tl_workspace;

gsl_integration_workspace* workspace() {
  if (!tl_workspace) {
    gsl_set_error_handler_off();
    tl_workspace.reset(gsl_integration_workspace_alloc(1000));
  }
  return tl_workspace.get();
}

double gauss(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * pi) * sigma);
}

struct Params {
  double x;
  double sigma;
};

double inv_sqrt_integrand(double w, void* p) {
  auto* q = static_cast<Params*>(p);
  return 2.0 * gauss(q->x + w * w, q->sigma);
}

double log_integrand(double v, void* p) {
  auto* q = static_cast<Params*>(p);
  const double d = std::abs(q->x - v);
  return d > 0.0 ? gauss(v, q->sigma) * std::log(d) : 0.0;
}

double inv_sqrt_regularized(double x, double sigma) {
  Params q{x, sigma};
  gsl_function fn{&inv_sqrt_integrand, &q};
  // integrand is negligible once x + w^2 > 9 sigma
  const double upper = std::sqrt(std::max(0.0, 9.0 * sigma - x)) + 1e-300;
  if (upper <= 1e-300) return 0.0;
  double result = 0.0;
  double err = 0.0;
  int status = gsl_integration_qag(&fn, 0.0, upper, 1e-12, 1e-10, 1000, GSL_INTEG_GAUSS41, workspace(), &result, &err);
  if (status != GSL_SUCCESS && status != GSL_EROUND) throw NumericalError("inv_sqrt quadrature failed");
  return -result;
}

double log_regularized(double x, double sigma) {
  Params q{x, sigma};
  gsl_function fn{&log_integrand, &q};
  const double lo = -9.0 * sigma;
  const double hi = 9.0 * sigma;
  double result = 0.0;
  double err = 0.0;
  int status;
  if (x > lo && x < hi) {
    double pts[3] = {lo, x, hi};
    status = gsl_integration_qagp(&fn, pts, 3, 1e-12, 1e-10, 1000, workspace(), &result, &err);
  } else {
    status = gsl_integration_qag(&fn, lo, hi, 1e-12, 1e-10, 1000, GSL_INTEG_GAUSS41, workspace(), &result, &err);
  }
  if (status != GSL_SUCCESS && status != GSL_EROUND) throw NumericalError("log quadrature failed");
  return result;
}

struct LinearFit {
  std::vector<double> coef;
  double rss = 0.0;
};

// Least squares on the columns of `cols` (each of length y.size()).
LinearFit least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const size_t n = y.size();
  const size_t k = cols.size();
  gsl_matrix* X = gsl_matrix_alloc(n, k);
  gsl_vector* yv = gsl_vector_alloc(n);
  gsl_vector* c = gsl_vector_alloc(k);
  gsl_matrix* cov = gsl_matrix_alloc(k, k);
  gsl_multifit_linear_workspace* w = gsl_multifit_linear_alloc(n, k);
  for (size_t i = 0; i < n; ++i) {
    gsl_vector_set(yv, i, y[i]);
    for (size_t j = 0; j < k; ++j) gsl_matrix_set(X, i, j, cols[j][i]);
  }
  LinearFit out;
  gsl_multifit_linear(X, yv, c, cov, &out.rss, w);
  out.coef.resize(k);
  for (size_t j = 0; j < k; ++j) out.coef[j] = gsl_vector_get(c, j);
  gsl_multifit_linear_free(w);
  gsl_matrix_free(cov);
  gsl_vector_free(c);
  gsl_vector_free(yv);
  gsl_matrix_free(X);
  return out;
}

double sample_spacing(const std::vector<CrosscutSample>& cut) {
  if (cut.size() < 2) return 0.0;
  return std::abs(cut.back().coordinate - cut.front().coordinate) / double(cut.size() - 1);
}

} // namespace

SingularityKind parse_singularity_kind(const std::string& s) {
  if (s == "pv" || s == "pv_recip") return SingularityKind::pv_recip;
  if (s == "inv_sqrt" || s == "inv_sqrt_minus") return SingularityKind::inv_sqrt_minus;
  if (s == "log" || s == "log_abs") return SingularityKind::log_abs;
  throw ArgumentError("unknown singularity kind '" + s + "' (expected pv, inv_sqrt or log)");
}

const char* to_string(SingularityKind k) {
  switch (k) {
  case SingularityKind::pv_recip: return "pv";
  case SingularityKind::inv_sqrt_minus: return "inv_sqrt";
  case SingularityKind::log_abs: return "log";
  }
  return "?";
}

double singular_profile(SingularityKind kind, double x, double sigma) {
  if (sigma <= 0.0) {
    switch (kind) {
    case SingularityKind::pv_recip: return x == 0.0 ? 0.0 : 1.0 / x;
    case SingularityKind::inv_sqrt_minus: return x < 0.0 ? -1.0 / std::sqrt(-x) : 0.0;
    case SingularityKind::log_abs: return x == 0.0 ? 0.0 : std::log(std::abs(x));
    }
  }
  switch (kind) {
  case SingularityKind::pv_recip: {
    const double s = std::sqrt(2.0) * sigma;
    return 2.0 / s * gsl_sf_dawson(x / s);
  }
  case SingularityKind::inv_sqrt_minus: return inv_sqrt_regularized(x, sigma);
  case SingularityKind::log_abs: return log_regularized(x, sigma);
  }
  return 0.0;
}

SingularityModel fit_singularity(const std::vector<CrosscutSample>& cut, SingularityKind kind, double p0_guess,
                                 const FitOptions& opts) {
  require(cut.size() >= 8, "fit: crosscut has fewer than 8 samples");
  require(opts.sigma >= 0.0 && opts.window >= 0.0 && opts.core >= 0.0 && opts.refine >= 0.0,
          "fit: window, core, refine and sigma must be non-negative");
  const double cell = sample_spacing(cut);
  require(cell > 0.0, "fit: degenerate crosscut coordinates");
  const double window = opts.window > 0.0 ? opts.window : 30.0 * cell;
  const double core = opts.core > 0.0 ? opts.core : 2.0 * cell;
  const double refine = opts.refine > 0.0 ? opts.refine : 2.0 * cell;
  require(core < window, "fit: core exclusion must be smaller than the window");

  SingularityModel best;
  best.kind = kind;
  best.window = window;
  best.residual = std::numeric_limits<double>::infinity();

  const int steps = std::max(1, int(std::ceil(refine / (cell / 8.0))));
  for (int s = -steps; s <= steps; ++s) {
    const double p0 = p0_guess + refine * double(s) / double(steps);
    std::vector<double> y, p, mcol, ones;
    for (const auto& c : cut) {
      const double d = c.coordinate - p0;
      if (std::abs(d) > window || std::abs(d) < core) continue;
      y.push_back(c.value);
      p.push_back(d);
      ones.push_back(1.0);
      mcol.push_back(singular_profile(kind, d, opts.sigma));
    }
    if (y.size() < 20) continue;
    const LinearFit affine = least_squares({ones, p}, y);
    const LinearFit full = least_squares({mcol, ones, p}, y);
    double sum_sq = 0.0;
    for (double v : y) sum_sq += v * v;
    // An affine profile leaves nothing for the singular term to explain.
    const double residual = affine.rss > 1e-20 * sum_sq ? std::sqrt(full.rss / affine.rss) : 1.0;
    if (residual < best.residual) {
      best.residual = residual;
      best.p0 = p0;
      best.c = full.coef[0];
      // background reported in the crosscut coordinate
      best.background[1] = full.coef[2];
      best.background[0] = full.coef[1] - full.coef[2] * p0;
      best.samples = int(y.size());
    }
  }
  if (!std::isfinite(best.residual)) {
    best.residual = 1.0;
    best.accepted = false;
    best.diagnostic = "fit window contains too few samples";
    return best;
  }
  best.accepted = best.residual <= opts.reject_above;
  if (!best.accepted) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "residual %.3g exceeds %.3g: profile does not match a %s singularity", best.residual,
                  opts.reject_above, to_string(kind));
    best.diagnostic = buf;
  }
  return best;
}

std::string format_fit(const SingularityModel& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.6g,%.10g", to_string(m.kind), m.c, m.p0, m.residual, m.window);
  return buf;
}

CornerCheck corner_line_check(const ImageGrid& recon, Vec2 corner, int m, const CornerCheckOptions& opts) {
  require(m >= 1, "corner check: m must be positive");
  require(opts.sector_end > opts.sector_start && opts.sector_end - opts.sector_start < pi,
          "corner check: sector must be a proper angle below pi");
  const double cell = recon.cell();
  require(std::abs(opts.crosscut_y - corner.y) > 4.0 * cell,
          "corner check: crosscut passes through the corner, where all lines meet");
  const auto cut = crosscut(recon, CrosscutSpec{CrosscutAxis::row, opts.crosscut_y, {}, 0.0});
  const int n = int(cut.size());
  const int half = std::max(1, int(std::round(opts.highpass_cells / 2.0)));

  std::vector<double> hp(n, 0.0);
  for (int i = half; i < n - half; ++i) {
    double s = 0.0;
    for (int j = i - half; j <= i + half; ++j) s += cut[j].value;
    hp[i] = cut[i].value - s / double(2 * half + 1);
  }
  double peak_scale = 0.0;
  for (double v : recon.values()) peak_scale = std::max(peak_scale, std::abs(v));

  struct Extremum {
    int index;
    double value;
  };
  std::vector<Extremum> extrema;
  for (int i = half + 1; i < n - half - 1; ++i) {
    const double v = hp[i];
    if (std::abs(v) < opts.threshold * peak_scale) continue;
    const bool is_max = v > hp[i - 1] && v >= hp[i + 1];
    const bool is_min = v < hp[i - 1] && v <= hp[i + 1];
    if ((v > 0 && is_max) || (v < 0 && is_min)) extrema.push_back({i, v});
  }

  CornerCheck out;
  std::vector<bool> used(extrema.size(), false);
  const double lo = cut[half].coordinate + opts.highpass_cells * cell;
  const double hi = cut[n - half - 1].coordinate - opts.highpass_cells * cell;
  for (int j = 0; j < m; ++j) {
    const double phi = pi * double(j) / double(m);
    const double dir = phi + pi / 2.0; // direction of {x : (x - corner) . omega = 0}
    const double dy = std::sin(dir);
    if (std::abs(dy) < 1e-6) continue; // parallel to the crosscut
    const double t = (opts.crosscut_y - corner.y) / dy;
    CornerLine line;
    line.angle = phi;
    line.crossing = corner.x + t * std::cos(dir);
    if (line.crossing < lo || line.crossing > hi) continue;
    auto inside = [&](double a) {
      a = std::fmod(a - opts.sector_start, 2.0 * pi);
      if (a < 0) a += 2.0 * pi;
      return a > 0.0 && a < opts.sector_end - opts.sector_start;
    };
    line.enters = inside(dir) || inside(dir + pi);
    double best = opts.match_cells * cell;
    int found = -1;
    for (size_t e = 0; e < extrema.size(); ++e) {
      const double d = std::abs(cut[extrema[e].index].coordinate - line.crossing);
      if (d <= best) {
        best = d;
        found = int(e);
      }
    }
    ++out.predicted;
    if (found >= 0) {
      used[found] = true;
      line.found = true;
      line.peak = extrema[found].value;
      line.sign_ok = (line.peak > 0.0) == line.enters;
      ++out.matched;
      if (line.sign_ok) ++out.sign_matched;
    }
    out.lines.push_back(line);
  }
  for (size_t e = 0; e < extrema.size(); ++e) {
    const double x = cut[extrema[e].index].coordinate;
    if (!used[e] && x >= lo && x <= hi) ++out.spurious;
  }
  if (out.predicted > 0) {
    out.matched_fraction = double(out.matched) / out.predicted;
    out.sign_fraction = double(out.sign_matched) / out.predicted;
  }
  return out;
}

} // namespace radonlab
