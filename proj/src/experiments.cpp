#include "radonlab/experiments.hpp"

#include "radonlab/aliasing.hpp"
#include "radonlab/conormal.hpp"
#include "radonlab/error.hpp"
#include "radonlab/filtering.hpp"
#include "radonlab/io.hpp"
#include "radonlab/radon.hpp"
#include "radonlab/reconstruction.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace radonlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ArgumentError("config key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

} // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "name", "seed",
      "phantom.kind", "phantom.center", "phantom.xi0", "phantom.h", "phantom.lambda", "phantom.a",
      "phantom.angle", "phantom.offset", "phantom.rloc", "phantom.radius", "phantom.taper", "phantom.amplitude",
      "grid.n", "grid.L",
      "proj.m", "proj.pcount", "proj.R", "proj.interp",
      "recon.kernel", "recon.kmax", "recon.upsample", "recon.refocus", "recon.psi",
      "analysis.eps", "analysis.crosscut_y", "analysis.fit_kind", "analysis.fit_window", "analysis.threshold",
      "analysis.factors", "analysis.ball_radius", "analysis.reference_m", "analysis.displacement_kernel",
      "analysis.peak_threshold", "analysis.exclude",
      "check.l2", "check.match_cells", "check.coef_tol", "check.fraction", "check.sign_fraction",
      "check.band_fraction", "check.identity", "check.ratio", "check.nyquist_tol", "check.nyquist_factor",
      "check.compliance",
      "output.dir", "output.images",
  };
  return keys;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  static const std::set<std::string> known(known_keys().begin(), known_keys().end());
  ExperimentConfig cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos)
      throw ArgumentError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key))
      throw ArgumentError(where + ": unknown key '" + key + "'");
    if (value.empty())
      throw ArgumentError(where + ": empty value for '" + key + "'");
    if (cfg.values_.count(key))
      throw ArgumentError(where + ": repeated key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
    throw ArgumentError("unknown key '" + key + "'");
  values_[key] = value;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number(key, it->second);
}

int ExperimentConfig::get(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  const double v = parse_number(key, it->second);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ArgumentError("config key '" + key + "': expected an integer, got '" + it->second + "'");
  return static_cast<int>(v);
}

bool ExperimentConfig::get(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes")
    return true;
  if (it->second == "false" || it->second == "0" || it->second == "no")
    return false;
  throw ArgumentError("config key '" + key + "': expected true or false, got '" + it->second + "'");
}

Vec2 ExperimentConfig::get(const std::string& key, Vec2 fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    return fallback;
  const auto comma = it->second.find(',');
  if (comma == std::string::npos)
    throw ArgumentError("config key '" + key + "': expected x,y, got '" + it->second + "'");
  return {parse_number(key, trim(it->second.substr(0, comma))), parse_number(key, trim(it->second.substr(comma + 1)))};
}

PhantomSpec phantom_from_config(const ExperimentConfig& cfg) {
  if (!cfg.has("phantom.kind"))
    throw ArgumentError("config: missing phantom.kind");
  PhantomSpec s;
  s.kind = parse_phantom_kind(cfg.get("phantom.kind", std::string()));
  s.center = cfg.get("phantom.center", s.center);
  s.xi0 = cfg.get("phantom.xi0", s.xi0);
  s.h = cfg.get("phantom.h", s.h);
  s.lambda = cfg.get("phantom.lambda", s.lambda);
  s.a = cfg.get("phantom.a", s.a);
  s.angle = cfg.get("phantom.angle", 0.0) * deg;
  s.offset = cfg.get("phantom.offset", s.offset);
  s.rloc = cfg.get("phantom.rloc", s.rloc);
  s.radius = cfg.get("phantom.radius", s.radius);
  s.taper_sharpness = cfg.get("phantom.taper", s.taper_sharpness);
  s.amplitude = cfg.get("phantom.amplitude", s.amplitude);
  validate(s);
  return s;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

double ExperimentReport::measurement(const std::string& key) const {
  const auto it = measured.find(key);
  if (it == measured.end())
    throw ArgumentError("report '" + name + "' has no measurement '" + key + "'");
  return it->second;
}

std::string format_report(const ExperimentReport& r) {
  std::ostringstream out;
  char buf[256];
  for (const auto& c : r.checks) {
    std::snprintf(buf, sizeof buf, "%s %s %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.relation.c_str(), c.limit);
    out << buf;
  }
  for (const auto& n : r.notes)
    out << "note " << n << "\n";
  int passed = 0;
  for (const auto& c : r.checks)
    passed += c.pass ? 1 : 0;
  std::snprintf(buf, sizeof buf, "%s %s: %d/%zu checks passed\n", r.all_pass() ? "PASS" : "FAIL", r.name.c_str(), passed,
                r.checks.size());
  out << buf;
  return out.str();
}

double ball_energy(const ImageGrid& img, Vec2 c, double r) {
  const int n = img.n();
  double e = 0.0;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      const Vec2 x{img.coord(col), img.coord(row)};
      if ((x - c).norm() <= r)
        e += img.at(row, col) * img.at(row, col);
    }
  return e * img.cell() * img.cell();
}

std::vector<Vec2> edge_curve(const PhantomSpec& spec, double spacing) {
  require(spacing > 0.0, "edge curve spacing must be positive");
  const double c = std::cos(spec.angle), sn = std::sin(spec.angle);
  auto world = [&](Vec2 u) { return spec.center + Vec2{c * u.x - sn * u.y, sn * u.x + c * u.y}; };
  std::vector<Vec2> pts;
  const double r = spec.rloc;
  switch (spec.kind) {
  case PhantomKind::flat_edge: {
    const int k = static_cast<int>(std::ceil(2.0 * r / spacing));
    for (int i = 0; i <= k; ++i)
      pts.push_back(world({spec.offset, -r + 2.0 * r * i / k}));
    break;
  }
  case PhantomKind::convex_edge: {
    // parameter range where the parabola stays inside the localization disk
    const double ymax = std::sqrt((std::sqrt(1.0 + 4.0 * spec.a * spec.a * r * r) - 1.0) / (2.0 * spec.a * spec.a));
    const double len = 2.0 * ymax * std::sqrt(1.0 + 4.0 * spec.a * spec.a * ymax * ymax);
    const int k = static_cast<int>(std::ceil(len / spacing));
    for (int i = 0; i <= k; ++i) {
      const double y = -ymax + 2.0 * ymax * i / k;
      pts.push_back(world({spec.a * y * y, y}));
    }
    break;
  }
  case PhantomKind::corner: {
    const int k = static_cast<int>(std::ceil(r / spacing));
    for (int i = k; i >= 1; --i)
      pts.push_back(world({0.0, r * i / k}));
    for (int i = 0; i <= k; ++i)
      pts.push_back(world({r * i / k, 0.0}));
    break;
  }
  case PhantomKind::disk: {
    const int k = std::max(8, static_cast<int>(std::ceil(2.0 * pi * spec.radius / spacing)));
    for (int i = 0; i <= k; ++i)
      pts.push_back(spec.center + direction(2.0 * pi * i / k) * spec.radius);
    break;
  }
  case PhantomKind::coherent:
    throw ArgumentError("edge curve needs an edge phantom");
  }
  return pts;
}

double band_energy_fraction(const ImageGrid& artifact, std::span<const Vec2> curve, double width, double r_max) {
  require(curve.size() >= 2, "band energy needs a curve with at least two points");
  require(width >= 0.0, "band width must be non-negative");
  const int n = artifact.n();
  std::vector<double> dist(static_cast<size_t>(n) * n, std::numeric_limits<double>::infinity());
  // only cells within `width` of a segment matter; visit each segment's box
  for (size_t s = 0; s + 1 < curve.size(); ++s) {
    const Vec2 a = curve[s], b = curve[s + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    const int c0 = std::max(0, static_cast<int>(std::floor(artifact.index_of(std::min(a.x, b.x) - width))));
    const int c1 = std::min(n - 1, static_cast<int>(std::ceil(artifact.index_of(std::max(a.x, b.x) + width))));
    const int r0 = std::max(0, static_cast<int>(std::floor(artifact.index_of(std::min(a.y, b.y) - width))));
    const int r1 = std::min(n - 1, static_cast<int>(std::ceil(artifact.index_of(std::max(a.y, b.y) + width))));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const Vec2 x{artifact.coord(c), artifact.coord(r)};
        double t = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = (x - (a + ab * t)).norm();
        double& slot = dist[static_cast<size_t>(r) * n + c];
        slot = std::min(slot, d);
      }
  }
  double inside = 0.0, total = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Vec2 x{artifact.coord(c), artifact.coord(r)};
      if (x.norm() > r_max)
        continue;
      const double e = artifact.at(r, c) * artifact.at(r, c);
      total += e;
      if (dist[static_cast<size_t>(r) * n + c] <= width)
        inside += e;
    }
  return total > 0.0 ? inside / total : 0.0;
}

DisplacementCheck disk_displacement_check(const ImageGrid& artifact, const PhantomSpec& disk,
                                          const DisplacementCheckOptions& opts) {
  require(disk.kind == PhantomKind::disk, "displacement check needs a disk phantom");
  const double cell = artifact.cell();
  const double exclude = opts.exclude > 0.0 ? opts.exclude : 4.0 * cell + 3.0 / disk.lambda;
  const double r_max = opts.r_max > 0.0 ? opts.r_max : 0.95 * artifact.half_extent();
  const double dilate = opts.dilate_cells * cell;
  ImageGrid mag = artifact;
  for (double& v : mag.values())
    v = std::abs(v);
  const auto peaks = find_peaks(mag, opts.threshold);
  DisplacementCheck out;
  out.peaks = static_cast<int>(peaks.size());
  for (const auto& p : peaks) {
    const Vec2 d = p.x - disk.center;
    const double dist = d.norm();
    if (std::abs(dist - disk.radius) < exclude || p.x.norm() > r_max)
      continue;
    ++out.considered;
    double best = std::numeric_limits<double>::infinity();
    if (dist > disk.radius) {
      const double base = std::atan2(d.y, d.x);
      const double alpha = std::acos(disk.radius / dist);
      for (double sg : {-1.0, 1.0}) {
        const Vec2 nu = direction(base + sg * alpha);
        const Vec2 xb = disk.center + nu * disk.radius;
        const auto iv = interp_displacement_union({xb, nu});
        if (!iv.valid)
          continue;
        const double t = (p.x - xb).dot(nu.perp());
        const double lo = iv.lo - dilate, hi = iv.hi + dilate;
        best = std::min(best, t < lo ? lo - t : (t > hi ? t - hi : 0.0));
      }
    }
    if (best == 0.0) {
      ++out.compliant;
    } else {
      out.violations.push_back(p);
      if (std::isfinite(best))
        out.max_violation = std::max(out.max_violation, best);
    }
  }
  return out;
}

double conormal_coefficient(const PhantomSpec& spec, int m) {
  require(m >= 1, "m must be positive");
  switch (spec.kind) {
  case PhantomKind::flat_edge:
  case PhantomKind::corner:
    return spec.amplitude / (2.0 * pi * m);
  case PhantomKind::convex_edge: {
    const double kappa = 2.0 * spec.a;
    return 2.0 * std::sqrt(2.0) * spec.amplitude / (std::sqrt(kappa) * 4.0 * m);
  }
  default:
    throw ArgumentError("conormal coefficient needs a flat edge, convex edge or corner");
  }
}

namespace {

struct Setup {
  std::string name;
  std::filesystem::path dir;
  bool images = true;
  PhantomSpec phantom;
  int n = 256;
  double L = 1.0;
  ProjectionConfig proj;
  ReconConfig recon;
  ExperimentReport* report = nullptr;

  std::string path(const std::string& file) const { return (dir / (name + "_" + file)).string(); }

  void grid(const std::string& tag, const ImageGrid& g) const {
    write_grid(path(tag + ".grid"), g);
    report->outputs.push_back(path(tag + ".grid"));
    if (images) {
      write_image8(path(tag + ".pgm"), g);
      report->outputs.push_back(path(tag + ".pgm"));
    }
  }

  void text(const std::string& file, const std::string& body) const {
    std::ofstream f(path(file), std::ios::binary);
    if (!f)
      throw IoError("cannot write '" + path(file) + "'");
    f << body;
    if (!f)
      throw IoError("write failed for '" + path(file) + "'");
    report->outputs.push_back(path(file));
  }
};

void add_check(ExperimentReport& r, const std::string& name, double value, const std::string& rel, double limit) {
  bool pass = false;
  if (rel == "<")
    pass = value < limit;
  else if (rel == "<=")
    pass = value <= limit;
  else if (rel == ">")
    pass = value > limit;
  else if (rel == ">=")
    pass = value >= limit;
  r.checks.push_back({name, pass, value, limit, rel});
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Setup make_setup(const ExperimentConfig& cfg, const std::string& out_dir, ExperimentReport& report) {
  Setup s;
  s.report = &report;
  s.name = cfg.get("name", report.kind);
  s.dir = out_dir.empty() ? std::filesystem::path(cfg.get("output.dir", std::string("."))) : std::filesystem::path(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(s.dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + s.dir.string() + "': " + ec.message());
  s.images = cfg.get("output.images", true);
  s.phantom = phantom_from_config(cfg);
  s.n = cfg.get("grid.n", 256);
  s.L = cfg.get("grid.L", 1.0);
  require(s.n >= 8 && s.L > 0.0, "grid.n must be >= 8 and grid.L positive");
  s.proj.m = cfg.get("proj.m", 36);
  s.proj.p_count = cfg.get("proj.pcount", 0);
  s.proj.R = cfg.get("proj.R", 0.0);
  s.proj.interp = parse_ray_interp(cfg.get("proj.interp", std::string("cubic")));
  if (s.proj.p_count == 0)
    s.proj.p_count = next_power_of_two(2 * s.n);
  if (s.proj.R == 0.0)
    s.proj.R = s.L;
  s.recon.kernel = Kernel1D{parse_kernel_kind(cfg.get("recon.kernel", std::string("lan3")))};
  s.recon.kmax = cfg.get("recon.kmax", 2);
  s.recon.upsample = cfg.get("recon.upsample", 8);
  s.recon.psi = parse_psi(cfg.get("recon.psi", std::string("one")));
  if (cfg.has("recon.refocus") && cfg.get("recon.refocus", std::string()) != "none")
    s.recon.refocus_center = cfg.get("recon.refocus", Vec2{});
  report.name = s.name;
  return s;
}

// f_psi on the grid: the phantom itself, or psi(D/|D|) applied to it.
ImageGrid reference(const Setup& s) {
  const ImageGrid f = render(s.phantom, s.n, s.L);
  return s.recon.psi.is_one() ? f : psi_multiplier(f, s.recon.psi);
}

Sinogram data(const Setup& s, int m) {
  ProjectionConfig pc = s.proj;
  pc.m = m;
  return apply_psi(radon_phantom(s.phantom, pc), s.recon.psi);
}

void run_coherent(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.phantom.kind == PhantomKind::coherent, "coherent experiment needs phantom.kind = coherent");
  const ImageGrid f = reference(s);
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  const ImageGrid direct = fbp_direct(g, s.n, s.L, rc);
  const ImageGrid mult = fbp_multiplier(f, s.proj.m, s.recon.kmax);
  s.grid("phantom", f);
  s.grid("direct", direct);
  s.grid("multiplier", mult);
  add_check(r, "direct_vs_multiplier_l2", compare(direct, mult, 0.2).l2_rel, "<", cfg.get("check.l2", 0.05));

  const double step = pi / s.proj.m;
  const auto pred = predict_artifacts(s.phantom, step, s.L, 0.0, s.recon.kmax, s.L / s.n);
  s.text("prediction.csv", format_prediction(pred));
  VerifyOptions vo;
  vo.peak_threshold = cfg.get("analysis.peak_threshold", 0.2);
  vo.match_radius = cfg.get("check.match_cells", 2.0) * (2.0 * s.L / s.n);
  vo.envelope_direction = s.phantom.xi0 * (1.0 / s.phantom.xi0.norm());
  vo.exclude_radius = cfg.get("analysis.exclude", 3.0 * std::sqrt(s.phantom.h));
  const auto ver = verify_artifacts(pred, direct, f, vo);
  int expected = 0, matched = 0;
  double worst = 0.0;
  for (const auto& m : ver.matches) {
    if (std::abs(m.prediction.k) != 1)
      continue;
    ++expected;
    matched += m.matched ? 1 : 0;
    worst = std::max(worst, m.distance);
  }
  add_check(r, "replicas_matched", matched, ">=", std::max(expected, 1));
  r.notes.push_back(fmt("largest replica offset %.4g", worst) + fmt(" (cells %.3g)", worst / (2.0 * s.L / s.n)));
}

void run_edge(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.phantom.kind == PhantomKind::flat_edge || s.phantom.kind == PhantomKind::convex_edge,
          "edge experiment needs a flat or convex edge");
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  const ImageGrid direct = fbp_direct(g, s.n, s.L, rc);
  s.grid("direct", direct);
  const double y = cfg.get("analysis.crosscut_y", -1.6);
  const auto cut = crosscut(direct, CrosscutSpec{CrosscutAxis::row, y, {}, 0.0});
  write_csv_crosscut(s.path("crosscut.csv"), cut);
  r.outputs.push_back(s.path("crosscut.csv"));

  const SingularityKind kind = parse_singularity_kind(cfg.get(
      "analysis.fit_kind", std::string(s.phantom.kind == PhantomKind::flat_edge ? "pv" : "inv_sqrt")));
  // the phi = 0 tangent line in the edge frame, followed to the crosscut
  const Vec2 nrm = direction(s.phantom.angle);
  const Vec2 tangent_point = s.phantom.center + nrm * (s.phantom.kind == PhantomKind::flat_edge ? s.phantom.offset : 0.0);
  require(std::abs(nrm.x) > 1e-6, "edge normal parallel to the crosscut");
  const double p0 = tangent_point.x + (y - tangent_point.y) * (-nrm.y / nrm.x);
  FitOptions fo;
  fo.window = cfg.get("analysis.fit_window", 0.03);
  fo.sigma = 1.0 / (std::sqrt(2.0) * s.phantom.lambda);
  const auto fit = fit_singularity(cut, kind, p0, fo);
  s.text("fit.csv", "kind,c,p0,residual,window\n" + format_fit(fit) + "\n");
  const double expected = conormal_coefficient(s.phantom, s.proj.m);
  add_check(r, "fit_residual", fit.residual, "<=", 0.5);
  add_check(r, "coefficient_rel_error", std::abs(fit.c / expected - 1.0), "<", cfg.get("check.coef_tol", 0.2));
  r.notes.push_back(fmt("fitted c %.6g", fit.c) + fmt(" expected %.6g", expected));
  r.measured["c"] = fit.c;
  r.measured["p0"] = fit.p0;
  r.measured["expected"] = expected;
}

void run_corner(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.phantom.kind == PhantomKind::corner, "corner experiment needs phantom.kind = corner");
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  const ImageGrid direct = fbp_direct(g, s.n, s.L, rc);
  s.grid("direct", direct);
  CornerCheckOptions co;
  co.crosscut_y = cfg.get("analysis.crosscut_y", -1.0);
  co.sector_start = s.phantom.angle;
  co.sector_end = s.phantom.angle + pi / 2.0;
  co.threshold = cfg.get("analysis.threshold", co.threshold);
  const auto cc = corner_line_check(direct, s.phantom.center, s.proj.m, co);
  const auto cut = crosscut(direct, CrosscutSpec{CrosscutAxis::row, co.crosscut_y, {}, 0.0});
  write_csv_crosscut(s.path("crosscut.csv"), cut);
  r.outputs.push_back(s.path("crosscut.csv"));
  std::ostringstream table;
  table << "angle_deg,crossing,enters,found,sign_ok,peak\n";
  for (const auto& l : cc.lines) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%d,%d,%d,%.6g\n", l.angle / deg, l.crossing, int(l.enters), int(l.found),
                  int(l.sign_ok), l.peak);
    table << buf;
  }
  s.text("lines.csv", table.str());
  add_check(r, "lines_matched_fraction", cc.matched_fraction, ">=", cfg.get("check.fraction", 0.8));
  add_check(r, "sign_pattern_fraction", cc.sign_fraction, ">=", cfg.get("check.sign_fraction", 0.8));
  r.notes.push_back("predicted lines " + std::to_string(cc.predicted) + ", unmatched extrema " +
                    std::to_string(cc.spurious));
}

void run_semiclassical(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.phantom.kind == PhantomKind::convex_edge, "semiclassical experiment needs a convex edge");
  const ImageGrid f = render(s.phantom, s.n, s.L);
  const double eps = cfg.get("analysis.eps", 1e-12);
  const auto band = estimate_band_limit(f, 1.0, eps);
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  const ImageGrid direct = fbp_direct(g, s.n, s.L, rc);
  const ImageGrid artifact = direct - f;
  s.grid("direct", direct);
  s.grid("artifact", artifact);
  const double step = pi / s.proj.m;
  const double width = 0.9 * 2.0 * pi / (step * band.B);
  const auto curve = edge_curve(s.phantom, 0.5 * f.cell());
  const double frac = band_energy_fraction(artifact, curve, width, s.L);
  add_check(r, "artifact_energy_in_band", frac, "<", cfg.get("check.band_fraction", 0.01));
  r.notes.push_back(fmt("band limit B %.6g", band.B) + fmt(" at eps %.3g", eps) + fmt(", band width %.6g", width));
}

void run_disk_interp(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.phantom.kind == PhantomKind::disk, "disk experiment needs phantom.kind = disk");
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  const ImageGrid direct = fbp_direct(g, s.n, s.L, rc);
  rc.method = Method::interp;
  const ImageGrid interp = fbp_interp(g, s.n, s.L, rc);
  s.grid("direct", direct);
  s.grid("interp", interp);
  const auto id = verify_convolution_identity(g, rc, 2.0 * s.L / s.n, 0.95 * s.L);
  add_check(r, "convolution_identity_l2", id.l2_rel, "<", cfg.get("check.identity", 0.02));

  // artifacts of the interpolation method relative to the angularly blurred,
  // well-sampled reconstruction
  ReconConfig dk = rc;
  dk.kernel = Kernel1D{parse_kernel_kind(cfg.get("analysis.displacement_kernel", std::string("sinc")))};
  const ImageGrid fi = dk.kernel.kind == rc.kernel.kind ? interp : fbp_interp(g, s.n, s.L, dk);
  ReconConfig dd = rc;
  dd.method = Method::direct;
  const ImageGrid fine = fbp_direct(data(s, cfg.get("analysis.reference_m", 360)), s.n, s.L, dd);
  const ImageGrid artifact = fi - angular_convolve(fine, dk.kernel, pi / s.proj.m, rc.upsample);
  s.grid("interp_artifact", artifact);
  DisplacementCheckOptions dop;
  dop.threshold = cfg.get("analysis.peak_threshold", 0.2);
  const auto dc = disk_displacement_check(artifact, s.phantom, dop);
  add_check(r, "displacement_compliance", dc.considered ? double(dc.compliant) / dc.considered : 1.0, ">=",
            cfg.get("check.compliance", 1.0));
  r.notes.push_back("displacement peaks considered " + std::to_string(dc.considered) + ", compliant " +
                    std::to_string(dc.compliant) + fmt(", max violation %.4g", dc.max_violation));
}

void run_nyquist(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  const ImageGrid f = reference(s);
  const double eps = cfg.get("analysis.eps", 1e-6);
  const double B = estimate_band_limit(f, 1.0, eps).B;
  const double R = support_radius(s.phantom);
  require(R <= s.proj.R, "phantom support exceeds proj.R");
  const double threshold = pi / (R * B);
  std::vector<double> factors;
  {
    std::istringstream in(cfg.get("analysis.factors", std::string("0.8,2")));
    std::string tok;
    while (std::getline(in, tok, ','))
      factors.push_back(parse_number("analysis.factors", trim(tok)));
  }
  require(factors.size() >= 2, "analysis.factors needs at least two entries");
  std::ostringstream table;
  table << "factor,m,step,l2_rel\n";
  auto inside = [&](Vec2 x) { return x.norm() <= R; };
  std::vector<double> errors;
  ReconConfig rc = s.recon;
  rc.method = Method::direct;
  for (double fac : factors) {
    require(fac > 0.0, "analysis.factors must be positive");
    const double want = fac * threshold;
    // step no larger than requested below threshold, no smaller above it
    const int m = fac < 1.0 ? static_cast<int>(std::ceil(pi / want)) : std::max(1, static_cast<int>(std::floor(pi / want)));
    const ImageGrid rec = fbp_direct(data(s, m), s.n, s.L, rc);
    const double err = l2_rel_masked(rec, f, inside);
    errors.push_back(err);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6g,%d,%.10g,%.6g\n", fac, m, pi / m, err);
    table << buf;
  }
  s.text("sweep.csv", table.str());
  const double tol = cfg.get("check.nyquist_tol", 0.01);
  add_check(r, "below_threshold_l2", errors.front(), "<", tol);
  add_check(r, "above_threshold_l2", errors.back(), ">", cfg.get("check.nyquist_factor", 10.0) * errors.front());
  r.notes.push_back(fmt("band limit B %.6g", B) + fmt(", R %.6g", R) + fmt(", threshold step %.6g", threshold));
}

void run_refocus(const ExperimentConfig& cfg, Setup& s, ExperimentReport& r) {
  require(s.recon.refocus_center.has_value(), "refocus experiment needs recon.refocus = x,y");
  const ImageGrid f = reference(s);
  const Sinogram g = data(s, s.proj.m);
  ReconConfig rc = s.recon;
  rc.method = Method::interp;
  const Vec2 x0 = *rc.refocus_center;
  rc.refocus_center.reset();
  const ImageGrid plain = fbp_interp(g, s.n, s.L, rc);
  rc.refocus_center = x0;
  const ImageGrid focused = fbp_interp(g, s.n, s.L, rc);
  s.grid("interp", plain);
  s.grid("interp_refocused", focused);
  const double rad = cfg.get("analysis.ball_radius", 0.2);
  const double e0 = ball_energy(plain - f, x0, rad);
  const double e1 = ball_energy(focused - f, x0, rad);
  add_check(r, "refocus_energy_ratio", e1 > 0.0 ? e0 / e1 : std::numeric_limits<double>::infinity(), ">=",
            cfg.get("check.ratio", 5.0));
  r.notes.push_back(fmt("artifact energy near focus %.6g", e0) + fmt(" -> %.6g", e1));
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.kind = cfg.get("experiment", std::string());
  if (r.kind.empty())
    throw ArgumentError("config: missing experiment");
  Setup s = make_setup(cfg, out_dir, r);
  if (r.kind == "coherent")
    run_coherent(cfg, s, r);
  else if (r.kind == "edge")
    run_edge(cfg, s, r);
  else if (r.kind == "corner")
    run_corner(cfg, s, r);
  else if (r.kind == "semiclassical")
    run_semiclassical(cfg, s, r);
  else if (r.kind == "disk_interp")
    run_disk_interp(cfg, s, r);
  else if (r.kind == "nyquist")
    run_nyquist(cfg, s, r);
  else if (r.kind == "refocus")
    run_refocus(cfg, s, r);
  else
    throw ArgumentError("config: unknown experiment '" + r.kind +
                        "' (coherent, edge, corner, semiclassical, disk_interp, nyquist, refocus)");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.text("summary.txt", format_report(r));
  return r;
}

} // namespace radonlab
