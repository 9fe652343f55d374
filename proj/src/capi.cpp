#include "radonlab/radonlab.h"

#include "radonlab/aliasing.hpp"
#include "radonlab/conormal.hpp"
#include "radonlab/error.hpp"
#include "radonlab/experiments.hpp"
#include "radonlab/filtering.hpp"
#include "radonlab/io.hpp"
#include "radonlab/parallel.hpp"
#include "radonlab/phantoms.hpp"
#include "radonlab/radon.hpp"
#include "radonlab/reconstruction.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <map>
#include <new>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

struct rl_grid {
  radonlab::ImageGrid g;
};

struct rl_sino {
  radonlab::Sinogram s;
};

namespace {

using namespace radonlab;

constexpr double deg = std::numbers::pi / 180.0;

thread_local std::string tl_error;

template <class F>
rl_status guarded(F&& f) {
  try {
    tl_error.clear();
    f();
    return RL_OK;
  } catch (const Error& e) {
    tl_error = e.what();
    switch (e.kind()) {
    case ErrorKind::argument: return RL_ERR_ARGUMENT;
    case ErrorKind::io: return RL_ERR_IO;
    case ErrorKind::numerical: return RL_ERR_NUMERICAL;
    }
    return RL_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    tl_error = "out of memory";
    return RL_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    tl_error = e.what();
    return RL_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p)
    throw ArgumentError(std::string(what) + " is null");
}

const std::vector<std::string> phantom_keys = {"kind",   "center", "xi0",    "h",     "lambda", "a",
                                               "angle",  "offset", "rloc",   "radius", "taper",  "amplitude"};

class Params {
public:
  Params(const char* const* kv, int count, std::vector<std::string> allowed, bool with_phantom = false) {
    if (count < 0 || (count > 0 && !kv))
      throw ArgumentError("parameter list is null");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    if (with_phantom)
      ok.insert(phantom_keys.begin(), phantom_keys.end());
    for (int i = 0; i < count; ++i) {
      need(kv[i], "parameter");
      const std::string item = kv[i];
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ArgumentError("expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      if (!ok.count(key))
        throw ArgumentError("unknown parameter '" + key + "'");
      if (values_.count(key))
        throw ArgumentError("repeated parameter '" + key + "'");
      values_[key] = item.substr(eq + 1);
    }
  }

  bool has(const std::string& k) const { return values_.count(k) != 0; }

  std::string str(const std::string& k, const std::string& fallback) const {
    const auto it = values_.find(k);
    return it == values_.end() ? fallback : it->second;
  }

  std::string required(const std::string& k) const {
    const auto it = values_.find(k);
    if (it == values_.end())
      throw ArgumentError("missing parameter '" + k + "'");
    return it->second;
  }

  double num(const std::string& k, double fallback) const {
    const auto it = values_.find(k);
    return it == values_.end() ? fallback : parse(k, it->second);
  }

  int integer(const std::string& k, int fallback) const {
    const double v = num(k, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9)
      throw ArgumentError("parameter '" + k + "' must be an integer");
    return static_cast<int>(v);
  }

  Vec2 vec(const std::string& k, Vec2 fallback) const {
    const auto it = values_.find(k);
    if (it == values_.end())
      return fallback;
    const auto c = it->second.find(',');
    if (c == std::string::npos)
      throw ArgumentError("parameter '" + k + "' must be x,y");
    return {parse(k, it->second.substr(0, c)), parse(k, it->second.substr(c + 1))};
  }

  PhantomSpec phantom() const {
    PhantomSpec s;
    s.kind = parse_phantom_kind(required("kind"));
    s.center = vec("center", s.center);
    s.xi0 = vec("xi0", s.xi0);
    s.h = num("h", s.h);
    s.lambda = num("lambda", s.lambda);
    s.a = num("a", s.a);
    s.angle = num("angle", 0.0) * deg;
    s.offset = num("offset", s.offset);
    s.rloc = num("rloc", s.rloc);
    s.radius = num("radius", s.radius);
    s.taper_sharpness = num("taper", s.taper_sharpness);
    s.amplitude = num("amplitude", s.amplitude);
    validate(s);
    return s;
  }

private:
  static double parse(const std::string& k, const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
      throw ArgumentError("parameter '" + k + "' must be a number, got '" + v + "'");
    return out;
  }

  std::map<std::string, std::string> values_;
};

ProjectionConfig projection(const Params& p) {
  ProjectionConfig pc;
  pc.m = p.integer("m", pc.m);
  pc.p_count = p.integer("pcount", pc.p_count);
  pc.R = p.num("R", pc.R);
  pc.interp = parse_ray_interp(p.str("interp", "cubic"));
  return pc;
}

} // namespace

extern "C" {

const char* rl_version(void) { return "0.1.0"; }

const char* rl_last_error(void) { return tl_error.c_str(); }

void rl_string_free(char* s) { std::free(s); }

rl_status rl_set_threads(int n) {
  return guarded([&] {
    require(n >= 1, "thread count must be >= 1");
    set_thread_count(n);
  });
}

rl_status rl_grid_create(int n, double half_extent, rl_grid** out) {
  return guarded([&] {
    need(out, "output handle");
    *out = new rl_grid{ImageGrid(n, half_extent)};
  });
}

void rl_grid_free(rl_grid* g) { delete g; }
int rl_grid_n(const rl_grid* g) { return g ? g->g.n() : 0; }
double rl_grid_half_extent(const rl_grid* g) { return g ? g->g.half_extent() : 0.0; }
double* rl_grid_data(rl_grid* g) { return g ? g->g.values().data() : nullptr; }

rl_status rl_grid_read(const char* path, rl_grid** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output handle");
    *out = new rl_grid{read_grid(path)};
  });
}

rl_status rl_grid_write(const rl_grid* g, const char* path) {
  return guarded([&] {
    need(g, "grid");
    need(path, "path");
    write_grid(path, g->g);
  });
}

rl_status rl_grid_write_pgm(const rl_grid* g, const char* path, double lo, double hi) {
  return guarded([&] {
    need(g, "grid");
    need(path, "path");
    write_image8(path, g->g, lo, hi);
  });
}

void rl_sino_free(rl_sino* s) { delete s; }
int rl_sino_m(const rl_sino* s) { return s ? s->s.m() : 0; }
int rl_sino_p_count(const rl_sino* s) { return s ? s->s.p_count() : 0; }
double rl_sino_p_half_extent(const rl_sino* s) { return s ? s->s.p_half_extent() : 0.0; }
double* rl_sino_data(rl_sino* s) { return s ? s->s.values().data() : nullptr; }

rl_status rl_sino_read(const char* path, rl_sino** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output handle");
    *out = new rl_sino{read_sino(path)};
  });
}

rl_status rl_sino_write(const rl_sino* s, const char* path) {
  return guarded([&] {
    need(s, "sinogram");
    need(path, "path");
    write_sino(path, s->s);
  });
}

rl_status rl_phantom(const char* const* kv, int count, rl_grid** out) {
  return guarded([&] {
    need(out, "output handle");
    const Params p(kv, count, {"n", "L"}, true);
    *out = new rl_grid{render(p.phantom(), p.integer("n", 256), p.num("L", 1.0))};
  });
}

rl_status rl_sinogram_phantom(const char* const* kv, int count, rl_sino** out) {
  return guarded([&] {
    need(out, "output handle");
    const Params p(kv, count, {"m", "pcount", "R"}, true);
    ProjectionConfig pc = projection(p);
    if (!p.has("pcount") || !p.has("R"))
      throw ArgumentError("analytic sinograms need pcount and R");
    *out = new rl_sino{radon_phantom(p.phantom(), pc)};
  });
}

rl_status rl_sinogram_grid(const rl_grid* img, const char* const* kv, int count, rl_sino** out) {
  return guarded([&] {
    need(img, "grid");
    need(out, "output handle");
    const Params p(kv, count, {"m", "pcount", "R", "interp"});
    *out = new rl_sino{radon(img->g, projection(p))};
  });
}

rl_status rl_filter(const rl_sino* s, const char* const* kv, int count, rl_sino** out) {
  return guarded([&] {
    need(s, "sinogram");
    need(out, "output handle");
    const Params p(kv, count, {"mode"});
    const std::string mode = p.str("mode", "linear");
    RampMode rm;
    if (mode == "linear")
      rm = RampMode::linear;
    else if (mode == "periodic")
      rm = RampMode::periodic;
    else
      throw ArgumentError("unknown ramp mode '" + mode + "' (linear or periodic)");
    *out = new rl_sino{ramp_filter(s->s, rm)};
  });
}

rl_status rl_recon(const rl_sino* s, const char* const* kv, int count, rl_grid** out) {
  return guarded([&] {
    need(s, "sinogram");
    need(out, "output handle");
    const Params p(kv, count, {"method", "kernel", "upsample", "refocus", "psi", "n", "L"});
    ReconConfig rc;
    rc.method = parse_method(p.str("method", "direct"));
    if (rc.method == Method::multiplier)
      throw ArgumentError("the multiplier method reconstructs from an image; use rl_recon_multiplier");
    rc.kernel = Kernel1D{parse_kernel_kind(p.str("kernel", "lan3"))};
    rc.upsample = p.integer("upsample", rc.upsample);
    if (p.has("refocus"))
      rc.refocus_center = p.vec("refocus", {});
    rc.psi = parse_psi(p.str("psi", "one"));
    const Sinogram data = rc.psi.is_one() ? s->s : apply_psi(s->s, rc.psi);
    *out = new rl_grid{reconstruct(data, p.integer("n", 256), p.num("L", s->s.p_half_extent()), rc)};
  });
}

rl_status rl_recon_multiplier(const rl_grid* f, const char* const* kv, int count, rl_grid** out) {
  return guarded([&] {
    need(f, "grid");
    need(out, "output handle");
    const Params p(kv, count, {"m", "kmax", "psi"});
    const PsiWindow psi = parse_psi(p.str("psi", "one"));
    const ImageGrid fpsi = psi.is_one() ? f->g : psi_multiplier(f->g, psi);
    *out = new rl_grid{fbp_multiplier(fpsi, p.integer("m", 36), p.integer("kmax", 2))};
  });
}

rl_status rl_compare(const rl_grid* a, const rl_grid* b, double* l2_rel, double* linf_rel) {
  return guarded([&] {
    need(a, "grid a");
    need(b, "grid b");
    const Metrics m = compare(a->g, b->g, 1.0);
    if (l2_rel)
      *l2_rel = m.l2_rel;
    if (linf_rel)
      *linf_rel = m.linf_rel;
  });
}

namespace {

ArtifactPrediction prediction_from(const Params& p) {
  const PhantomSpec spec = p.phantom();
  const int m = p.integer("m", 36);
  require(m >= 1, "m must be positive");
  return predict_artifacts(spec, std::numbers::pi / m, p.num("window", 1.0), p.num("B", 0.0), p.integer("kmax", 4),
                           p.num("dedup", 0.0));
}

} // namespace

rl_status rl_predict(const char* const* kv, int count, char** table) {
  return guarded([&] {
    need(table, "output string");
    const Params p(kv, count, {"m", "window", "B", "kmax", "dedup"}, true);
    *table = dup_string(format_prediction(prediction_from(p)));
  });
}

rl_status rl_verify(const rl_grid* recon, const rl_grid* reference, const char* const* kv, int count, char** report,
                    int* all_matched) {
  return guarded([&] {
    need(recon, "recon grid");
    need(reference, "reference grid");
    need(report, "output string");
    const Params p(kv, count, {"m", "window", "B", "kmax", "dedup", "threshold", "match_cells", "envelope", "exclude"},
                   true);
    const auto pred = prediction_from(p);
    VerifyOptions vo;
    vo.peak_threshold = p.num("threshold", vo.peak_threshold);
    vo.match_radius = p.num("match_cells", 2.0) * recon->g.cell();
    vo.envelope_direction = p.vec("envelope", {});
    vo.exclude_radius = p.num("exclude", 0.0);
    const auto v = verify_artifacts(pred, recon->g, reference->g, vo);
    std::ostringstream out;
    out << "k,x,y,distance,matched\n";
    bool all = true;
    char buf[160];
    for (const auto& m : v.matches) {
      std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.6g,%d\n", m.prediction.k, m.prediction.x.x, m.prediction.x.y,
                    m.distance, int(m.matched));
      out << buf;
      all = all && m.matched;
    }
    std::snprintf(buf, sizeof buf, "# l2_rel=%.6g peaks=%zu unmatched_peaks=%d\n", v.metrics.l2_rel, v.peaks.size(),
                  v.unmatched_peaks);
    out << buf;
    *report = dup_string(out.str());
    if (all_matched)
      *all_matched = all ? 1 : 0;
  });
}

rl_status rl_fit(const rl_grid* img, const char* const* kv, int count, char** report, int* accepted) {
  return guarded([&] {
    need(img, "grid");
    need(report, "output string");
    const Params p(kv, count, {"kind", "axis", "pos", "p0", "window", "core", "refine", "sigma"});
    CrosscutSpec cs;
    const std::string axis = p.str("axis", "row");
    if (axis == "row")
      cs.axis = CrosscutAxis::row;
    else if (axis == "column")
      cs.axis = CrosscutAxis::column;
    else
      throw ArgumentError("fit axis must be row or column");
    cs.position = p.num("pos", 0.0);
    FitOptions fo;
    fo.window = p.num("window", 0.0);
    fo.core = p.num("core", 0.0);
    fo.refine = p.num("refine", 0.0);
    fo.sigma = p.num("sigma", 0.0);
    const auto fit = fit_singularity(crosscut(img->g, cs), parse_singularity_kind(p.required("kind")),
                                     p.num("p0", 0.0), fo);
    std::string text = "kind,c,p0,residual,window\n" + format_fit(fit) + "\n";
    if (!fit.accepted)
      text += "# rejected: " + fit.diagnostic + "\n";
    *report = dup_string(text);
    if (accepted)
      *accepted = fit.accepted ? 1 : 0;
  });
}

rl_status rl_crosscut(const rl_grid* img, const char* const* kv, int count, char** csv) {
  return guarded([&] {
    need(img, "grid");
    need(csv, "output string");
    const Params p(kv, count, {"axis", "pos", "origin", "angle"});
    CrosscutSpec cs;
    const std::string axis = p.str("axis", "row");
    if (axis == "row")
      cs.axis = CrosscutAxis::row;
    else if (axis == "column")
      cs.axis = CrosscutAxis::column;
    else if (axis == "line")
      cs.axis = CrosscutAxis::line;
    else
      throw ArgumentError("crosscut axis must be row, column or line");
    cs.position = p.num("pos", 0.0);
    cs.origin = p.vec("origin", {});
    cs.angle = p.num("angle", 0.0) * deg;
    std::ostringstream out;
    out << "coord,value\n";
    char buf[96];
    for (const auto& s : crosscut(img->g, cs)) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.coordinate, s.value);
      out << buf;
    }
    *csv = dup_string(out.str());
  });
}

rl_status rl_run_config(const char* path, const char* out_dir, char** report, int* all_pass) {
  return guarded([&] {
    need(path, "config path");
    need(report, "output string");
    const auto cfg = ExperimentConfig::load(path);
    const auto r = run_experiment(cfg, out_dir ? out_dir : "");
    *report = dup_string(format_report(r));
    if (all_pass)
      *all_pass = r.all_pass() ? 1 : 0;
  });
}

} // extern "C"
