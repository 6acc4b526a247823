#include <doctest.h>

#include <cmath>

#include "capdrop/energy.hpp"
#include "capdrop/minimizer.hpp"
#include "support.hpp"

using namespace capdrop;
using namespace testsupport;

namespace {

PolyDroplet cap_on_flat_wall(const Container& c, double tau, double t, double x0, int segments) {
  const CapPolygon k = ideal_droplet_boundary({{2, tau}, t, x0}, segments);
  PolyDroplet p;
  p.vertices = k.vertices;
  p.contact = k.contact;
  p.boundary_params.assign(p.size(), 0.0);
  const double ref = c.project({x0, 0.0}).s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.contact[i]) p.boundary_params[i] = c.project_near(p.vertices[i], ref).s;
  return p;
}

Polyline closed(Polyline v) {
  v.push_back(v.front());
  return v;
}

// Square with `per_side` vertices per side.
PolyDroplet dense_square(Vec2 center, double side, int per_side) {
  Polyline v;
  const Vec2 corners[4] = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  for (int k = 0; k < 4; ++k) {
    const Vec2 a = corners[k], b = corners[(k + 1) % 4];
    for (int i = 0; i < per_side; ++i) v.push_back(center + side * (a + (static_cast<double>(i) / per_side) * (b - a)));
  }
  return free_droplet(v);
}

double max_turning_deviation(const MinimizeResult& r) {
  const Polyline f = free_boundary(r.droplet);
  std::vector<double> turn;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const Vec2 a = f[i] - f[i - 1], b = f[i + 1] - f[i];
    turn.push_back(std::atan2(cross(a, b), dot(a, b)));
  }
  double mean = 0.0;
  for (double t : turn) mean += t;
  mean /= static_cast<double>(turn.size());
  double worst = 0.0;
  for (double t : turn) worst = std::max(worst, std::abs(t - mean));
  return worst;
}

}  // namespace

TEST_SUITE("minimizer") {

TEST_CASE("seed on a flat wall is the scaled ideal droplet") {
  const auto c = flat_wall(0.0);
  const double m = 0.04, x0 = 1.5;
  const double s = c->project({x0, 0.0}).s;
  const PolyDroplet seed = seed_droplet(c, s, 0.3, m, 512);
  CHECK(polygon_area(seed) == doctest::Approx(m).epsilon(1e-10));
  CHECK_NOTHROW(validate_droplet(seed, *c));
  const CapPolygon k = ideal_droplet_boundary({{2, 0.3}, std::sqrt(m), x0}, 1024);
  CHECK(hausdorff_distance(closed(seed.vertices), closed(k.vertices)) <= 1e-4 * std::sqrt(m));
  for (std::size_t i = 0; i < seed.size(); ++i)
    if (seed.contact[i]) CHECK(std::abs(seed.vertices[i].y) <= c->snap_tolerance());
}

TEST_CASE("seed on the disk: chart distortion is O(m)") {
  const auto c = disk(0.5);
  std::vector<double> ratio;
  for (double m : {4e-3, 1e-3, 2.5e-4}) {
    const PolyDroplet seed = seed_droplet(c, 0.0, 0.5, m, 512);
    CHECK(polygon_area(seed) == doctest::Approx(m).epsilon(1e-10));
    // Rigid placement of sqrt(m) K at the base point (1, 0) with the wall tangent pointing up.
    const CapPolygon k = ideal_droplet_boundary({{2, 0.5}, std::sqrt(m), 0.0}, 4096);
    Polyline placed;
    for (const Vec2 v : k.vertices) placed.push_back({1.0 - v.y, v.x});
    ratio.push_back(hausdorff_distance(closed(seed.vertices), closed(placed)) / m);
  }
  CHECK(ratio[2] <= 1.5 * ratio[0]);
  CHECK(ratio[0] < 2.0);
  CHECK_THROWS_AS(seed_droplet(c, 0.0, 0.5, 0.5, 256), GeometryError);
}

TEST_CASE("disk run: circular free arc, Young's law and the lens oracle") {
  const MinimizeResult& r = disk_half_run();
  REQUIRE(r.converged);
  CHECK(r.monotone);
  CHECK(r.max_volume_error <= 1e-10);
  CHECK(polygon_area(r.droplet) == doctest::Approx(1e-3).epsilon(1e-10));
  CHECK(max_turning_deviation(r) <= 1e-3);
  const auto young = young_residual(r, *disk_half());
  REQUIRE(young.size() == 2);
  for (double y : young) CHECK(y <= 1e-2);
  const Lens lens = oracle_lens(1.0, 0.5, 1e-3);
  CHECK(r.energy.total == doctest::Approx(lens.energy).epsilon(1e-4));
  CHECK(r.energy.wetted / 0.5 == doctest::Approx(lens.wetted_length).epsilon(2e-3));
  CHECK(r.energy.lagrange_multiplier == doctest::Approx(1.0 / lens.free_radius).epsilon(1e-2));
}

TEST_CASE("an interior seed wets the wall when sigma is negative") {
  const auto c = disk(-0.5);
  MinimizeConfig cfg;
  cfg.volume = 1e-3;
  cfg.vertex_count = 128;
  SeedSpec inner;
  inner.kind = SeedSpec::Kind::Interior;
  inner.center = {0.0, 0.0};
  cfg.seeds = {inner};
  const MinimizeResult r = minimize(c, cfg);
  CHECK(r.droplet.contact_count() > 0);
  const double ball = 2.0 * std::sqrt(kPi * 1e-3);
  CHECK(r.energy.total < ball);
  CHECK(psi({2, -0.5}) < psi({2, 1.0 - 1e-12}));
  CHECK(r.energy.total == doctest::Approx(psi({2, -0.5}) * std::sqrt(1e-3)).epsilon(0.05));
}

TEST_CASE("configuration errors") {
  const auto c = disk(0.5);
  MinimizeConfig cfg;
  cfg.volume = c->area();
  CHECK_THROWS_AS(minimize(c, cfg), std::invalid_argument);
  cfg.volume = 1e-3;
  cfg.vertex_count = 16;
  CHECK_THROWS_AS(minimize(c, cfg), std::invalid_argument);
}

TEST_CASE("Young residual of exact and perturbed caps") {
  const auto c = flat_wall(0.3);
  const int segments = 512;
  const PolyDroplet cap = cap_on_flat_wall(*c, 0.3, 0.5, 0.0, segments);
  const auto exact = young_residual(cap, *c);
  REQUIRE(exact.size() == 2);
  for (double y : exact) CHECK(y <= 2.0 * kPi / segments);
  PolyDroplet bent = cap;
  const std::size_t start = *bent.run_start();
  const std::size_t before = (start + bent.size() - 1) % bent.size();
  bent.vertices[before].x -= 0.02;
  const auto perturbed = young_residual(bent, *c);
  CHECK(*std::max_element(perturbed.begin(), perturbed.end()) > 10.0 * exact[0] + 1e-3);
  CHECK(young_residual(interior_square({0.0, 1.0}, 0.5), *c).empty());
}

TEST_CASE("almost-minimality probe") {
  const MinimizeResult& r = disk_half_run();
  const auto& c = *disk_half();
  const double rho0 = 2e-3;
  std::vector<double> lam;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) lam.push_back(almost_minimality_probe(r, c, 400, rho0, seed));
  const double ref = lam[0];
  CHECK(std::isfinite(ref));
  CHECK(ref > 0.0);
  for (double l : lam) CHECK(l == doctest::Approx(ref).epsilon(0.2));
  const PolyDroplet corners = dense_square({-0.5, 0.0}, std::sqrt(1e-3), 64);
  const double few = almost_minimality_probe(corners, c, 20, rho0, 1);
  const double many = almost_minimality_probe(corners, c, 400, rho0, 1);
  CHECK(many >= few);
  CHECK(many > 10.0 * ref);
  CHECK_THROWS_AS(almost_minimality_probe(r, c, 0, rho0, 1), std::invalid_argument);
}

}  // TEST_SUITE
