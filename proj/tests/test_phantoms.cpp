#include "radonlab/error.hpp"
#include "radonlab/phantoms.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace radonlab;
using Catch::Approx;

namespace {

PhantomSpec coherent(Vec2 center, Vec2 xi0, double h) {
  PhantomSpec s;
  s.kind = PhantomKind::coherent;
  s.center = center;
  s.xi0 = xi0;
  s.h = h;
  return s;
}

PhantomSpec edge(PhantomKind kind, double lambda) {
  PhantomSpec s;
  s.kind = kind;
  s.lambda = lambda;
  s.rloc = 0.5;
  return s;
}

} // namespace

TEST_CASE("phantom specs are validated", "[phantoms]") {
  CHECK_THROWS_AS(render(coherent({0, 0}, {0, 0}, 0.1), 16, 1.0), ArgumentError);
  CHECK_THROWS_AS(render(coherent({0, 0}, {0, 1}, 0.0), 16, 1.0), ArgumentError);
  PhantomSpec s = edge(PhantomKind::flat_edge, -1.0);
  CHECK_THROWS_AS(render(s, 16, 1.0), ArgumentError);
  CHECK_THROWS_AS(parse_phantom_kind("shepp_logan"), ArgumentError);
  CHECK(parse_phantom_kind("convex") == PhantomKind::convex_edge);
  CHECK_THROWS_AS(edge_phantom(coherent({0, 0}, {0, 1}, 0.1), 16, 1.0), ArgumentError);
}

TEST_CASE("coherent state value, maximum and envelope", "[phantoms]") {
  const double h = 1.0 / 72.0;
  const PhantomSpec s = coherent({0.3, 0.0}, {0.0, 1.0}, h);
  CHECK(evaluate(s, s.center) == 1.0);

  const ImageGrid g = coherent_state(s, 256, 1.0);
  int br = 0, bc = 0;
  for (int r = 0; r < g.n(); ++r)
    for (int c = 0; c < g.n(); ++c)
      if (std::abs(g.at(r, c)) > std::abs(g.at(br, bc))) {
        br = r;
        bc = c;
      }
  CHECK((g.cell_center(br, bc) - s.center).norm() <= g.cell() * std::sqrt(2.0));

  // Along x . xi0 = 0 the carrier is 1 and only the envelope remains.
  for (double u : {-2.0, -0.7, 0.0, 0.4, 1.5, 3.0}) {
    const Vec2 x = s.center + Vec2{std::sqrt(h) * u, 0.0};
    CHECK(evaluate(s, x) == Approx(std::exp(-u * u / 2.0)).margin(1e-10));
  }
}

TEST_CASE("coherent state spectrum peaks at xi0 / h", "[phantoms]") {
  const PhantomSpec s = coherent({0.3, 0.0}, {0.0, 72.0}, 1.0);
  const ImageGrid g = coherent_state(s, 512, 1.0);
  const SpectralGrid F = fft2(g);
  double best = -1.0;
  Vec2 at{};
  for (int r = 0; r < F.n(); ++r)
    for (int c = 0; c < F.n(); ++c)
      if (F.xi(r, c).y > 0.0 && std::abs(F.at(r, c)) > best) {
        best = std::abs(F.at(r, c));
        at = F.xi(r, c);
      }
  const double lattice = std::numbers::pi / g.half_extent();
  CHECK(std::abs(at.x) <= lattice);
  CHECK(std::abs(at.y - 72.0) <= lattice);
}

TEST_CASE("smoothed edges saturate", "[phantoms]") {
  const PhantomSpec flat = edge(PhantomKind::flat_edge, 500.0);
  CHECK(evaluate(flat, {0.01, 0.0}) - evaluate(flat, {-0.01, 0.0}) == Approx(1.0).margin(1e-4));

  const PhantomSpec corner = edge(PhantomKind::corner, 500.0);
  CHECK(evaluate(corner, {0.05, 0.05}) == Approx(1.0).margin(1e-10));
  CHECK(evaluate(corner, {-0.05, -0.05}) == Approx(0.0).margin(1e-10));
  CHECK(evaluate(corner, {0.05, -0.05}) == Approx(0.0).margin(1e-10));

  // Rotating the frame rotates the edge normal.
  PhantomSpec turned = flat;
  turned.angle = std::numbers::pi / 2;
  CHECK(evaluate(turned, {0.0, 0.05}) == Approx(1.0).margin(1e-10));
  CHECK(evaluate(turned, {0.0, -0.05}) == Approx(0.0).margin(1e-10));
}

TEST_CASE("convex edge has vertex curvature 2a", "[phantoms]") {
  PhantomSpec s = edge(PhantomKind::convex_edge, 500.0);
  s.a = 1.5;
  // Locate the half-level crossing along x at fixed y by bisection.
  auto edge_x = [&](double y) {
    double lo = -0.3, hi = 0.3;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (evaluate(s, {mid, y}) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double d = 0.02;
  const double x0 = edge_x(0.0), xp = edge_x(d), xm = edge_x(-d);
  const double second = (xp - 2.0 * x0 + xm) / (d * d);
  const double slope = (xp - xm) / (2.0 * d);
  const double kappa = second / std::pow(1.0 + slope * slope, 1.5);
  CHECK(kappa == Approx(3.0).epsilon(1e-3));
}

TEST_CASE("disk phantom", "[phantoms]") {
  const double r = 0.3;
  PhantomSpec s;
  s.kind = PhantomKind::disk;
  s.center = {0.1, -0.2};
  s.radius = r;
  s.lambda = 200.0;
  CHECK(evaluate(s, s.center) == Approx(1.0).margin(1e-6));
  CHECK(evaluate(s, s.center + Vec2{2.0 * r, 0.0}) == Approx(0.0).margin(1e-6));

  // Midpoint quadrature on a fine raster.
  const ImageGrid g = disk_phantom(s.center, r, s.lambda, 1024, 1.0);
  double mass = 0.0;
  for (double v : g.values())
    mass += v;
  mass *= g.cell() * g.cell();
  CHECK(mass == Approx(std::numbers::pi * r * r).epsilon(0.01));
}

TEST_CASE("phantoms vanish outside their support radius", "[phantoms]") {
  PhantomSpec specs[5];
  specs[0] = coherent({0.3, 0.1}, {0.0, 1.0}, 1.0 / 72.0);
  specs[1] = edge(PhantomKind::flat_edge, 64.0);
  specs[2] = edge(PhantomKind::convex_edge, 64.0);
  specs[3] = edge(PhantomKind::corner, 64.0);
  specs[3].center = {0.0, 0.4};
  specs[4].kind = PhantomKind::disk;
  specs[4].center = {0.35, 0.2};
  specs[4].lambda = 32.0;
  for (const auto& s : specs) {
    INFO(to_string(s.kind));
    const double R = support_radius(s);
    const ImageGrid g = render(s, 256, 2.0);
    double outside = 0.0;
    for (int r = 0; r < g.n(); ++r)
      for (int c = 0; c < g.n(); ++c)
        if (g.cell_center(r, c).norm() > R)
          outside = std::max(outside, std::abs(g.at(r, c)));
    CHECK(outside < 1e-12);
    CHECK(R < 2.0);
  }
}

TEST_CASE("edges are monotone along the normal inside the plateau", "[phantoms]") {
  PhantomSpec s = edge(PhantomKind::flat_edge, 64.0);
  s.angle = 0.3;
  const Vec2 nu = direction(s.angle);
  double prev = -1.0;
  for (int i = -100; i <= 100; ++i) {
    const double v = evaluate(s, nu * (0.002 * i));
    CHECK(v >= prev);
    prev = v;
  }
}
