#include "radonlab/phantoms.hpp"

#include "radonlab/error.hpp"

#include <cmath>

namespace radonlab {
namespace {

// erf(z) and erfc(z) are below 1e-12 of saturation once |z| exceeds this.
constexpr double erf_tail = 5.0;
// exp(-r^2 / 2) < 1e-12 beyond r = 7.44.
constexpr double gauss_tail = 7.44;

Vec2 to_local(const PhantomSpec& s, Vec2 x) {
  const Vec2 d = x - s.center;
  const double c = std::cos(s.angle), sn = std::sin(s.angle);
  return {c * d.x + sn * d.y, -sn * d.x + c * d.y};
}

double taper(const PhantomSpec& s, Vec2 x) {
  const double mu = s.taper_sharpness / s.rloc;
  return smooth_step(mu, s.rloc - (x - s.center).norm());
}

} // namespace

PhantomKind parse_phantom_kind(const std::string& s) {
  if (s == "coherent")
    return PhantomKind::coherent;
  if (s == "flat_edge" || s == "flat")
    return PhantomKind::flat_edge;
  if (s == "convex_edge" || s == "convex")
    return PhantomKind::convex_edge;
  if (s == "corner")
    return PhantomKind::corner;
  if (s == "disk")
    return PhantomKind::disk;
  throw ArgumentError("unknown phantom kind '" + s + "'");
}

const char* to_string(PhantomKind k) {
  switch (k) {
  case PhantomKind::coherent:
    return "coherent";
  case PhantomKind::flat_edge:
    return "flat_edge";
  case PhantomKind::convex_edge:
    return "convex_edge";
  case PhantomKind::corner:
    return "corner";
  case PhantomKind::disk:
    return "disk";
  }
  return "?";
}

void validate(const PhantomSpec& s) {
  require(s.h > 0.0, "phantom h must be positive");
  require(s.lambda > 0.0, "phantom lambda must be positive");
  require(s.rloc > 0.0, "phantom rloc must be positive");
  require(s.taper_sharpness > 0.0, "taper sharpness must be positive");
  if (s.kind == PhantomKind::coherent)
    require(s.xi0.norm() > 0.0, "coherent state needs a nonzero xi0");
  if (s.kind == PhantomKind::disk)
    require(s.radius > 0.0, "disk radius must be positive");
}

double smooth_step(double lambda, double t) { return 0.5 * (1.0 + std::erf(lambda * t)); }

double evaluate(const PhantomSpec& s, Vec2 x) {
  switch (s.kind) {
  case PhantomKind::coherent: {
    const Vec2 d = x - s.center;
    return s.amplitude * std::exp(-d.dot(d) / (2.0 * s.h)) * std::cos(x.dot(s.xi0) / s.h);
  }
  case PhantomKind::disk:
    return s.amplitude * smooth_step(s.lambda, s.radius - (x - s.center).norm());
  case PhantomKind::flat_edge: {
    const double w = taper(s, x);
    if (w == 0.0)
      return 0.0;
    return s.amplitude * w * smooth_step(s.lambda, to_local(s, x).x - s.offset);
  }
  case PhantomKind::convex_edge: {
    const double w = taper(s, x);
    if (w == 0.0)
      return 0.0;
    const Vec2 u = to_local(s, x);
    return s.amplitude * w * smooth_step(s.lambda, u.x - s.a * u.y * u.y);
  }
  case PhantomKind::corner: {
    const double w = taper(s, x);
    if (w == 0.0)
      return 0.0;
    const Vec2 u = to_local(s, x);
    return s.amplitude * w * smooth_step(s.lambda, u.x) * smooth_step(s.lambda, u.y);
  }
  }
  return 0.0;
}

double local_support_radius(const PhantomSpec& s) {
  switch (s.kind) {
  case PhantomKind::coherent:
    return gauss_tail * std::sqrt(s.h);
  case PhantomKind::disk:
    return s.radius + erf_tail / s.lambda;
  default:
    return s.rloc + erf_tail * s.rloc / s.taper_sharpness;
  }
}

double support_radius(const PhantomSpec& s) { return s.center.norm() + local_support_radius(s); }

ImageGrid render(const PhantomSpec& spec, int n, double half_extent) {
  validate(spec);
  return make_grid(n, half_extent, [&](Vec2 x) { return evaluate(spec, x); });
}

ImageGrid coherent_state(const PhantomSpec& spec, int n, double half_extent) {
  require(spec.kind == PhantomKind::coherent, "coherent_state needs kind=coherent");
  return render(spec, n, half_extent);
}

ImageGrid edge_phantom(const PhantomSpec& spec, int n, double half_extent) {
  require(spec.kind == PhantomKind::flat_edge || spec.kind == PhantomKind::convex_edge ||
              spec.kind == PhantomKind::corner,
          "edge_phantom needs an edge kind");
  return render(spec, n, half_extent);
}

ImageGrid disk_phantom(Vec2 center, double radius, double lambda, int n, double half_extent) {
  PhantomSpec s;
  s.kind = PhantomKind::disk;
  s.center = center;
  s.radius = radius;
  s.lambda = lambda;
  return render(s, n, half_extent);
}

} // namespace radonlab
