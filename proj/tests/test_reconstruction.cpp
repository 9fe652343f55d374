#include "radonlab/error.hpp"
#include "radonlab/phantoms.hpp"
#include "radonlab/radon.hpp"
#include "radonlab/reconstruction.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace radonlab;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

ImageGrid gaussian(double sigma, int n, double L, Vec2 c = {}) {
  return make_grid(n, L, [&](Vec2 x) {
    const Vec2 d = x - c;
    return std::exp(-d.dot(d) / (2.0 * sigma * sigma));
  });
}

ProjectionConfig proj(int m, int p_count, double R) {
  ProjectionConfig cfg;
  cfg.m = m;
  cfg.p_count = p_count;
  cfg.R = R;
  return cfg;
}

ReconConfig method(Method m, KernelKind k = KernelKind::lanczos3) {
  ReconConfig cfg;
  cfg.method = m;
  cfg.kernel = Kernel1D{k};
  return cfg;
}

bool in_ball(Vec2 x, double r) { return x.norm() <= r; }

} // namespace

TEST_CASE("dense-angle direct FBP reproduces a Gaussian", "[reconstruction]") {
  const ImageGrid f = gaussian(0.1, 256, 1.0);
  const Sinogram s = radon(f, proj(180, 512, 1.0));
  const ImageGrid r = fbp_direct(s, 256, 1.0, method(Method::direct));
  CHECK(l2_rel_masked(r, f, [](Vec2 x) { return in_ball(x, 0.8); }) < 0.02);
}

TEST_CASE("zero data reconstruct to zero", "[reconstruction]") {
  const Sinogram s(12, 128, 1.0);
  for (Method m : {Method::direct, Method::interp}) {
    const ImageGrid r = reconstruct(s, 32, 1.0, method(m));
    for (double v : r.values())
      CHECK(v == 0.0);
  }
  const ConvolutionIdentity id = verify_convolution_identity(s, method(Method::interp), 1.0 / 16, 0.8);
  CHECK(id.l2_rel == 0.0);
}

TEST_CASE("interpolation method rejects the dirac kernel", "[reconstruction]") {
  const Sinogram s(12, 128, 1.0);
  CHECK_THROWS_AS(fbp_interp(s, 32, 1.0, method(Method::interp, KernelKind::dirac)), ArgumentError);
  CHECK_THROWS_AS(reconstruct(s, 32, 1.0, method(Method::multiplier)), ArgumentError);
}

TEST_CASE("direct and interpolation methods agree above Nyquist", "[reconstruction]") {
  const ImageGrid f = gaussian(0.08, 256, 1.0, {0.1, -0.1});
  const Sinogram s = radon(f, proj(90, 512, 1.0));
  const ImageGrid d = fbp_direct(s, 256, 1.0, method(Method::direct));
  for (KernelKind k : {KernelKind::sinc, KernelKind::lanczos3, KernelKind::lanczos3_stretched}) {
    INFO(to_string(k));
    const ImageGrid i = fbp_interp(s, 256, 1.0, method(Method::interp, k));
    CHECK(l2_rel_masked(i, d, [](Vec2 x) { return in_ball(x, 1.0); }) < 0.02);
  }
}

TEST_CASE("reconstructions are linear in the data", "[reconstruction]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Sinogram a(8, 64, 1.0), b(8, 64, 1.0), c(8, 64, 1.0);
  for (size_t k = 0; k < a.values().size(); ++k) {
    a.values()[k] = u(rng);
    b.values()[k] = u(rng);
    c.values()[k] = 1.5 * a.values()[k] - 0.25 * b.values()[k];
  }
  for (Method m : {Method::direct, Method::interp}) {
    const ImageGrid ra = reconstruct(a, 32, 1.0, method(m));
    const ImageGrid rb = reconstruct(b, 32, 1.0, method(m));
    const ImageGrid rc = reconstruct(c, 32, 1.0, method(m));
    CHECK(compare(rc, 1.5 * ra - 0.25 * rb, 0.5).l2_rel < 1e-12);
  }
}

TEST_CASE("direct FBP is covariant under rotation by the angular step", "[reconstruction]") {
  const int m = 12;
  const double rot = pi / m;
  const Vec2 c{0.3, 0.1};
  const Vec2 c_rot{std::cos(rot) * c.x - std::sin(rot) * c.y, std::sin(rot) * c.x + std::cos(rot) * c.y};
  const Sinogram s = radon(gaussian(0.1, 256, 1.0, c), proj(m, 512, 1.0));
  const Sinogram s_rot = radon(gaussian(0.1, 256, 1.0, c_rot), proj(m, 512, 1.0));
  const Backprojector bp(s, method(Method::direct));
  const Backprojector bp_rot(s_rot, method(Method::direct));
  double err = 0.0, scale = 0.0;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      const Vec2 x{0.04 * i, 0.04 * j};
      const Vec2 back{std::cos(rot) * x.x + std::sin(rot) * x.y, -std::sin(rot) * x.x + std::cos(rot) * x.y};
      err = std::max(err, std::abs(bp_rot(x) - bp(back)));
      scale = std::max(scale, std::abs(bp(back)));
    }
  CHECK(err < 1e-3 * scale);
}

TEST_CASE("multiplier reconstruction basics", "[reconstruction]") {
  const ImageGrid f = gaussian(0.1, 64, 1.0, {0.2, 0.0});
  CHECK(compare(fbp_multiplier(f, 36, 0), f, 0.5).l2_rel == 0.0);

  // The cosine sum is even in xi, so reflecting the input reflects the output.
  const ImageGrid g = make_grid(64, 1.0, [](Vec2 x) {
    const Vec2 d = x - Vec2{0.3, -0.1};
    return std::exp(-20.0 * d.dot(d)) * std::cos(40.0 * x.y);
  });
  const ImageGrid g_ref = make_grid(64, 1.0, [&](Vec2 x) { return g.sample_linear(Vec2{-x.x, -x.y}); });
  const ImageGrid out = fbp_multiplier(g, 6, 2);
  const ImageGrid out_ref = fbp_multiplier(g_ref, 6, 2);
  double err = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      err = std::max(err, std::abs(out_ref.at(r, c) - out.at(63 - r, 63 - c)));
  CHECK(err < 1e-12 * 64);

  // Summing the single-k multipliers gives the full one.
  const ImageGrid sum = g + artifact_multiplier(g, 6, 1) + artifact_multiplier(g, 6, 2);
  CHECK(compare(sum, out, 0.5).l2_rel < 1e-12);
}

TEST_CASE("psi multiplier", "[reconstruction]") {
  PhantomSpec edge;
  edge.kind = PhantomKind::flat_edge;
  edge.angle = pi / 2; // horizontal edge, vertical normal
  edge.lambda = 64.0;
  edge.rloc = 0.5;
  const ImageGrid f = render(edge, 128, 1.0);
  CHECK(compare(psi_multiplier(f, parse_psi("one")), f, 0.5).l2_rel == 0.0);
  // Only the DC bin survives psi = 0; zero padding by 2 spreads it over 4x the area.
  const ImageGrid z = psi_multiplier(f, parse_psi("zero"));
  double mean = 0.0;
  for (double v : f.values())
    mean += v / (f.n() * f.n());
  for (double v : z.values())
    CHECK(v == Approx(mean / 4.0).epsilon(1e-9));

  // Above the taper's frequency scale the spectrum sits along the edge
  // normal, so a flat-topped vertical window keeps it.
  const double mu = edge.taper_sharpness / edge.rloc;
  const auto high = [&](const ImageGrid& g) {
    return apply_multiplier(g, [&](Vec2 xi) { return xi.norm() > 5.0 * mu ? 1.0 : 0.0; }, 2);
  };
  const auto everywhere = [](Vec2) { return true; };
  // High-pass first: psi(D) f has slow tails that cropping to the grid would cut.
  const ImageGrid ref = high(f);
  CHECK(l2_rel_masked(psi_multiplier(ref, parse_psi("cos2:90:75:45")), ref, everywhere) < 0.05);
  // The same window turned to the tangent removes it.
  CHECK(l2_rel_masked(psi_multiplier(ref, parse_psi("cos2:0:75:45")), ref, everywhere) > 0.9);

  const PsiWindow tukey = parse_psi("cos2:90:60:30");
  CHECK(tukey(pi / 2 + 0.5) == 1.0);
  CHECK(tukey(pi / 2 + pi / 4) == Approx(0.5).margin(1e-12));
  CHECK(tukey(pi / 2 - pi / 3) == 0.0);
  CHECK_THROWS_AS(parse_psi("cos2:90"), ArgumentError);
  CHECK_THROWS_AS(parse_psi("cos2:90:60:60"), ArgumentError);
  CHECK_THROWS_AS(parse_psi("cos2:90:60:10x"), ArgumentError);
}

TEST_CASE("refocus shifts rows by x0 . omega", "[reconstruction]") {
  Sinogram s(4, 256, 1.0);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 256; ++i)
      s.at(j, i) = std::exp(-std::pow(s.p(i) - 0.1 * j, 2) / 0.01);

  const Sinogram same = refocus(s, {0.0, 0.0});
  REQUIRE(same.p_count() == 256);
  for (size_t k = 0; k < s.values().size(); ++k)
    CHECK(same.values()[k] == Approx(s.values()[k]).margin(1e-12));

  const Sinogram moved = refocus(s, {0.5, 0.0});
  CHECK(moved.dp() == Approx(s.dp()));
  for (int i = 0; i < moved.p_count(); ++i) {
    const double p = moved.p(i);
    const double expect = std::exp(-std::pow(p + 0.5, 2) / 0.01);
    CHECK(moved.at(0, i) == Approx(expect).margin(1e-3));
  }
}

TEST_CASE("angular convolution preserves constants and the dirac is the identity", "[reconstruction]") {
  const ImageGrid f = gaussian(0.2, 64, 1.0, {0.3, 0.2});
  const ImageGrid same = angular_convolve(f, Kernel1D{KernelKind::dirac}, pi / 36);
  CHECK(compare(same, f, 0.5).l2_rel < 1e-12);

  const ImageGrid one = make_grid(64, 1.0, [](Vec2) { return 1.0; });
  const ImageGrid conv = angular_convolve(one, Kernel1D{KernelKind::lanczos3}, pi / 36);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c)
      if (one.cell_center(r, c).norm() < 0.8)
        CHECK(conv.at(r, c) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolation method equals the angular convolution of the direct one", "[reconstruction]") {
  PhantomSpec d;
  d.kind = PhantomKind::disk;
  d.center = {0.35, 0.2};
  d.radius = 0.3;
  d.lambda = 32.0;
  const Sinogram s = radon_phantom(d, proj(36, 512, 1.0));
  const ConvolutionIdentity id = verify_convolution_identity(s, method(Method::interp), 1.0 / 64, 0.9);
  const ConvolutionIdentity base =
      verify_convolution_identity(s, method(Method::interp), 1.0 / 64, 0.9, Kernel1D{KernelKind::dirac});
  CHECK(id.l2_rel < 0.02);
  CHECK(base.l2_rel > 5.0 * id.l2_rel);
}
