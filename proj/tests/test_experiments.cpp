#include "radonlab/error.hpp"
#include "radonlab/experiments.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace radonlab;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

constexpr double pi = std::numbers::pi;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("config parsing", "[experiments]") {
  const auto cfg = ExperimentConfig::parse("# comment\n"
                                           "experiment = coherent   # trailing\n"
                                           "\n"
                                           "grid.n = 64\n"
                                           "grid.L=1.5\n"
                                           "phantom.center = 0.3, -0.1\n"
                                           "output.images = false\n");
  CHECK(cfg.get("experiment", std::string()) == "coherent");
  CHECK(cfg.get("grid.n", 0) == 64);
  CHECK(cfg.get("grid.L", 0.0) == 1.5);
  CHECK(cfg.get("proj.m", 36) == 36);
  CHECK_FALSE(cfg.get("output.images", true));
  const Vec2 c = cfg.get("phantom.center", Vec2{});
  CHECK(c.x == 0.3);
  CHECK(c.y == -0.1);
  CHECK(cfg.has("grid.L"));
  CHECK_FALSE(cfg.has("proj.R"));

  CHECK_THROWS_WITH(ExperimentConfig::parse("grid.n = 64\nproj.mm = 3\n", "x.cfg"),
                    ContainsSubstring("x.cfg:2") && ContainsSubstring("unknown key 'proj.mm'"));
  CHECK_THROWS_AS(ExperimentConfig::parse("grid.n = 64\ngrid.n = 128\n"), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::parse("grid.n\n"), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::parse("grid.n =\n"), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::parse("grid.n = many\n").get("grid.n", 0), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::parse("grid.L = 1.5x\n").get("grid.L", 0.0), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::parse("phantom.center = 1\n").get("phantom.center", Vec2{}), ArgumentError);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/x.cfg"), IoError);

  auto mutable_cfg = cfg;
  mutable_cfg.set("proj.m", "12");
  CHECK(mutable_cfg.get("proj.m", 0) == 12);
  CHECK_THROWS_AS(mutable_cfg.set("bogus", "1"), ArgumentError);
}

TEST_CASE("shipped configs parse and name known experiments", "[experiments]") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(RADONLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg")
      continue;
    INFO(entry.path().string());
    const auto cfg = ExperimentConfig::load(entry.path().string());
    CHECK(cfg.has("experiment"));
    CHECK(cfg.has("name"));
    ++count;
  }
  CHECK(count == 8);
}

TEST_CASE("phantom keys map onto the spec", "[experiments]") {
  const auto cfg = ExperimentConfig::parse("phantom.kind = corner\n"
                                           "phantom.center = 0,0.5\n"
                                           "phantom.angle = 9\n"
                                           "phantom.lambda = 64\n");
  const PhantomSpec s = phantom_from_config(cfg);
  CHECK(s.kind == PhantomKind::corner);
  CHECK(s.center.y == 0.5);
  CHECK(s.angle == Approx(9.0 * pi / 180.0));
  CHECK(s.lambda == 64.0);
  CHECK_THROWS_AS(phantom_from_config(ExperimentConfig::parse("grid.n = 8\n")), ArgumentError);
}

TEST_CASE("analysis helpers", "[experiments]") {
  const ImageGrid one = make_grid(256, 1.0, [](Vec2) { return 1.0; });
  CHECK(ball_energy(one, {0.1, 0.0}, 0.5) == Approx(pi * 0.25).epsilon(0.01));

  // A band about the x axis of half-width w holds the fraction 2w / 2 of a
  // uniform field on [-1, 1]^2 when r_max covers the square.
  const std::vector<Vec2> axis{{-2.0, 0.0}, {2.0, 0.0}};
  CHECK(band_energy_fraction(one, axis, 0.25, 2.0) == Approx(0.25).epsilon(0.02));

  PhantomSpec convex;
  convex.kind = PhantomKind::convex_edge;
  convex.a = 1.5;
  convex.rloc = 0.5;
  const auto curve = edge_curve(convex, 0.01);
  REQUIRE(curve.size() > 10);
  for (const Vec2& p : curve) {
    CHECK(p.x == Approx(1.5 * p.y * p.y).margin(1e-12));
    CHECK(p.norm() <= convex.rloc + 1e-12);
  }

  PhantomSpec flat;
  flat.kind = PhantomKind::flat_edge;
  CHECK(conormal_coefficient(flat, 18) == Approx(1.0 / (2.0 * pi * 18.0)));
  CHECK(conormal_coefficient(convex, 18) == Approx(2.0 * std::sqrt(2.0) / (std::sqrt(3.0) * 4.0 * 18.0)));
  PhantomSpec disk;
  disk.kind = PhantomKind::disk;
  CHECK_THROWS_AS(conormal_coefficient(disk, 18), ArgumentError);
}

TEST_CASE("experiments reject unknown kinds and mismatched phantoms", "[experiments]") {
  test::TempDir dir("exp_bad");
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse("experiment = bogus\n"), dir.path().string()), ArgumentError);
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::parse("experiment = coherent\nphantom.kind = disk\n"),
                                 dir.path().string()),
                  ArgumentError);
}

TEST_CASE("fig4 experiment runs, passes and is deterministic", "[experiments]") {
  test::TempDir a("fig4a"), b("fig4b");
  const auto cfg = ExperimentConfig::load(std::string(RADONLAB_CONFIG_DIR) + "/fig4.cfg");
  const ExperimentReport ra = run_experiment(cfg, a.path().string());
  const ExperimentReport rb = run_experiment(cfg, b.path().string());
  CHECK(ra.all_pass());
  CHECK_FALSE(ra.checks.empty());
  REQUIRE(ra.outputs.size() == rb.outputs.size());
  for (size_t i = 0; i < ra.outputs.size(); ++i) {
    const auto name = std::filesystem::path(ra.outputs[i]).filename();
    INFO(name.string());
    CHECK(slurp(a.path() / name) == slurp(b.path() / name));
  }
  CHECK(std::filesystem::exists(a.path() / "fig4_prediction.csv"));
  const std::string text = format_report(ra);
  CHECK_THAT(text, ContainsSubstring("PASS fig4"));
}
