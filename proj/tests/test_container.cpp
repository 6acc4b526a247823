#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace capdrop;
using namespace testsupport;

namespace {

// K(tau) scaled by t sitting on the flat bottom wall with its base centered at x0.
PolyDroplet cap_on_flat_wall(const Container& c, double tau, double t, double x0, int segments) {
  const CapPolygon k = ideal_droplet_boundary({{2, tau}, t, x0}, segments);
  PolyDroplet p;
  p.vertices = k.vertices;
  p.contact = k.contact;
  p.boundary_params.assign(p.size(), 0.0);
  const double ref = c.project({x0, 0.0}).s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.contact[i]) p.boundary_params[i] = c.project_near(p.vertices[i], ref).s;
  }
  return p;
}

double dense_hausdorff(const Polyline& a, const Polyline& b, int per_edge) {
  auto one_sided = [&](const Polyline& from, const Polyline& to) {
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < from.size(); ++i) {
      for (int k = 0; k <= per_edge; ++k) {
        const Vec2 x = from[i] + (static_cast<double>(k) / per_edge) * (from[i + 1] - from[i]);
        double d = 1e300;
        for (std::size_t j = 0; j + 1 < to.size(); ++j) {
          // Closest point on segment by clamped projection.
          const Vec2 e = to[j + 1] - to[j];
          const double s = std::clamp(dot(x - to[j], e) / dot(e, e), 0.0, 1.0);
          d = std::min(d, norm(x - (to[j] + s * e)));
        }
        best = std::max(best, d);
      }
    }
    return best;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace

TEST_SUITE("container_geometry") {

TEST_CASE("station data of a disk") {
  const auto c = disk(0.2, BulkPotential::zero(), 2.0);
  CHECK(c->length() == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(c->area() == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(c->diam() == doctest::Approx(4.0).epsilon(1e-6));
  for (int i = 0; i < c->station_count(); i += 97) {
    CHECK(norm(c->station_tangent(i)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(c->station_point(i)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c->station_curvature(i) == doctest::Approx(0.5).epsilon(1e-6));
    const Vec2 outward = c->station_normal(i);
    CHECK(dot(outward, c->station_point(i)) > 0.0);
    const int j = (i + 1) % c->station_count();
    CHECK(norm(c->station_point(j) - c->station_point(i)) == doctest::Approx(c->spacing()).epsilon(1e-6));
  }
  CHECK(c->curvature_bound() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(c->reach() <= 1.0 + 1e-9);
}

TEST_CASE("sigma field range, interpolation and Lipschitz bound") {
  const auto c = disk_cosine(0.3, 0.2);
  CHECK(c->sigma_min() == doctest::Approx(0.3));
  CHECK(c->sigma_max() == doctest::Approx(0.7).epsilon(1e-6));
  double worst = 0.0;
  for (int i = 0; i < c->station_count(); ++i) {
    const int j = (i + 1) % c->station_count();
    worst = std::max(worst, std::abs(c->station_sigma(j) - c->station_sigma(i)) / c->spacing());
  }
  CHECK(worst <= c->sigma_lipschitz() * (1 + 1e-12));
  CHECK(c->sigma_lipschitz() == doctest::Approx(0.2).epsilon(1e-3));
  // Piecewise-linear integral against Simpson on the interpolant.
  const double s0 = 5.9, s1 = 6.9;
  const double ref = simpson([&](double s) { return c->sigma(s); }, s0, s1, 200000);
  CHECK(c->sigma_integral(s0, s1) == doctest::Approx(ref).epsilon(1e-9));
  CHECK(c->sigma_integral(0.0, c->length()) == doctest::Approx(0.5 * c->length()).epsilon(1e-9));
  CHECK(c->sigma_integral(1.0, 1.0 + 3 * c->length()) == doctest::Approx(1.5 * c->length()).epsilon(1e-9));
  CHECK_THROWS_AS(Container(disk_curve({0, 0}, 1), 512, constant_sigma(1.0), BulkPotential::zero()), std::invalid_argument);
  CHECK_THROWS_AS(Container(disk_curve({0, 0}, 1), 100, constant_sigma(0.0), BulkPotential::zero()), std::invalid_argument);
}

TEST_CASE("projection onto the wall") {
  const auto c = disk(0.0);
  const BoundaryPoint in = c->project({0.5, 0.5});
  CHECK(in.s == doctest::Approx(kPi / 4).epsilon(1e-9));
  CHECK(in.signed_distance == doctest::Approx(std::sqrt(0.5) - 1.0).epsilon(1e-9));
  const BoundaryPoint out = c->project({0.0, -1.5});
  CHECK(out.s == doctest::Approx(1.5 * kPi).epsilon(1e-9));
  CHECK(out.signed_distance == doctest::Approx(0.5).epsilon(1e-9));
  const BoundaryPoint near = c->project_near({std::cos(-0.01) * 0.9, std::sin(-0.01) * 0.9}, 0.0);
  CHECK(near.s == doctest::Approx(-0.01).epsilon(1e-9));
}

TEST_CASE("lowest sigma stations") {
  const auto c = disk_cosine(0.3, 0.2);
  const auto idx = c->lowest_sigma_stations(4, 1.0);
  REQUIRE(idx.size() == 4);
  CHECK(idx.front() == 0);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const double gap = std::abs(c->station_s(idx[a]) - c->station_s(idx[b]));
      CHECK(std::min(gap, c->length() - gap) >= 1.0 - 1e-12);
    }
}

TEST_CASE("polygon area") {
  CHECK(polygon_area(free_droplet({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) == doctest::Approx(1.0));
  CHECK(polygon_area(free_droplet({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
  const CapPolygon k = ideal_droplet_boundary({{2, 0.0}, 1.0, 0.0}, 4096);
  CHECK(std::abs(polygon_area(free_droplet(k.vertices)) - 1.0) <= 1e-5);
  CHECK_THROWS_AS(polygon_area(free_droplet({{0, 0}, {1, 1}, {1, 0}, {0, 1}})), GeometryError);
}

TEST_CASE("droplet validation") {
  const auto c = flat_wall(0.0);
  PolyDroplet ok = cap_on_flat_wall(*c, 0.2, 0.1, 0.0, 64);
  CHECK_NOTHROW(validate_droplet(ok, *c));
  SUBCASE("two wetted runs") {
    PolyDroplet p = ok;
    const std::size_t n = p.size();
    // Mark a free vertex as contact after moving it onto the wall.
    p.vertices[n / 2 + 2] = {p.vertices[n / 2 + 2].x, 0.0};
    p.contact[n / 2 + 2] = true;
    CHECK_THROWS_AS(validate_droplet(p, *c), GeometryError);
  }
  SUBCASE("clockwise") {
    PolyDroplet p = free_droplet({{0, 1}, {1, 1}, {1, 2}, {0, 2}});
    std::reverse(p.vertices.begin(), p.vertices.end());
    CHECK_THROWS_AS(validate_droplet(p, *c), GeometryError);
  }
  SUBCASE("outside the container") {
    CHECK_THROWS_AS(validate_droplet(free_droplet({{0, 3}, {1, 3}, {1, 5}, {0, 5}}), *c), GeometryError);
  }
  SUBCASE("contact vertex off the wall") {
    PolyDroplet p = ok;
    p.vertices[1].y += 1e-6;
    CHECK_THROWS_AS(validate_droplet(p, *c), GeometryError);
  }
}

TEST_CASE("split perimeter") {
  const auto c = flat_wall(0.0);
  const PolyDroplet sq = interior_square({0.0, 1.0}, 0.5);
  const PerimeterSplit inside = split_perimeter(sq, *c);
  CHECK(inside.free_length == doctest::Approx(2.0));
  CHECK(inside.wetted_length == 0.0);

  const double t = 0.2;
  const PolyDroplet cap = cap_on_flat_wall(*c, 0.0, t, 1.0, 512);
  const PerimeterSplit s = split_perimeter(cap, *c);
  const double base = t * 2.0 * std::sqrt(2.0 / kPi);  // chord of K(0) at scale t
  CHECK(s.wetted_length == doctest::Approx(base).epsilon(1e-12));
  CHECK(s.free_length + s.wetted_length == doctest::Approx(perimeter(cap.vertices)).epsilon(1e-12));

  PolyDroplet full = cap;
  full.contact.assign(full.size(), true);
  CHECK_THROWS_AS(split_perimeter(full, *c), GeometryError);
}

TEST_CASE("free boundary runs from the end of the wetted run to its start") {
  const auto c = flat_wall(0.0);
  const PolyDroplet cap = cap_on_flat_wall(*c, 0.3, 0.2, 0.0, 64);
  const Polyline f = free_boundary(cap);
  const auto start = *cap.run_start();
  std::size_t end = start;
  while (cap.contact[(end + 1) % cap.size()]) end = (end + 1) % cap.size();
  CHECK(f.front() == cap.vertices[end]);
  CHECK(f.back() == cap.vertices[start]);
  CHECK(f.size() == cap.size() - cap.contact_count() + 2);
}

TEST_CASE("Hausdorff distance") {
  const Polyline seg{{0, 0}, {1, 0}};
  CHECK(hausdorff_distance(seg, seg) == 0.0);
  const double h = 0.37;
  CHECK(hausdorff_distance(seg, Polyline{{0, h}, {1, h}}) == doctest::Approx(h).epsilon(1e-14));
  const Polyline sq{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}};
  Polyline big;
  for (const Vec2 v : sq) big.push_back(1.1 * v);
  const double oracle = dense_hausdorff(sq, big, 2000);
  CHECK(hausdorff_distance(sq, big) == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(oracle == doctest::Approx(0.05 * std::sqrt(2.0)).epsilon(1e-6));
  CHECK(hausdorff_distance(sq, big, Exec::Serial) == hausdorff_distance(sq, big, Exec::Parallel));
  CHECK_THROWS_AS(hausdorff_distance(Polyline{}, seg), std::invalid_argument);
}

TEST_CASE("boundary charts") {
  SUBCASE("disk: inward normal offset maps to (0, d)") {
    const auto c = disk(0.0);
    for (double s0 : {0.0, 1.0, 4.0}) {
      const BoundaryChart chart = chart_at(c, s0);
      CHECK(norm(chart.forward({0, 0}) - c->point(s0)) < 1e-15);
      for (double d : {0.01, 0.1, 0.3}) {
        const Vec2 x = c->point(s0) - d * c->outward_normal(s0);
        const Vec2 uv = chart.inverse(x);
        CHECK(std::abs(uv.x) < 1e-12);
        CHECK(uv.y == doctest::Approx(d).epsilon(1e-9));
      }
      std::mt19937_64 rng(3);
      std::uniform_real_distribution<double> u(-0.2, 0.2), v(0.0, 0.3);
      for (int k = 0; k < 50; ++k) {
        const Vec2 x = chart.forward({u(rng), v(rng)});
        CHECK(norm(chart.forward(chart.inverse(x)) - x) < 1e-9);
      }
      // Derivative at the base point is an orientation-preserving isometry.
      const double e = 1e-6;
      const Vec2 du = (chart.forward({e, 0}) - chart.forward({-e, 0})) / (2 * e);
      const Vec2 dv = (chart.forward({0, e}) - chart.forward({0, -e})) / (2 * e);
      CHECK(norm(du) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(norm(dv) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(dot(du, dv)) < 1e-6);
      CHECK(cross(du, dv) > 0.0);
    }
  }
  SUBCASE("flat wall: the chart is a translation") {
    const auto c = flat_wall(0.0);
    const double s0 = c->project({1.0, 0.0}).s;
    const BoundaryChart chart = chart_at(c, s0);
    for (Vec2 uv : {Vec2{0.3, 0.2}, Vec2{-1.0, 0.5}, Vec2{0.0, 1.0}}) {
      const Vec2 x = chart.forward(uv);
      CHECK(x.x == doctest::Approx(1.0 + uv.x).epsilon(1e-12));
      CHECK(x.y == doctest::Approx(uv.y).epsilon(1e-12));
    }
  }
}

TEST_CASE("blow-up and blow-down") {
  SUBCASE("flat wall: rigid motion plus dilation") {
    const auto c = flat_wall(0.0);
    const PolyDroplet p = cap_on_flat_wall(*c, 0.2, 0.05, 2.0, 128);
    const double s0 = c->project({2.0, 0.0}).s;
    const PolyDroplet h = blow_up(p, chart_at(c, s0), 0.05);
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(h.vertices[i].x == doctest::Approx((p.vertices[i].x - 2.0) / 0.05).epsilon(1e-9));
      CHECK(h.vertices[i].y == doctest::Approx(p.vertices[i].y / 0.05).epsilon(1e-9));
      if (h.contact[i]) CHECK(h.vertices[i].y == 0.0);
    }
  }
  SUBCASE("disk: chart image of t K blows up to K") {
    const auto c = disk(0.0);
    const CapPolygon k = ideal_droplet_boundary({{2, 0.4}, 1.0, 0.0}, 256);
    PolyDroplet h;
    h.vertices = k.vertices;
    h.contact = k.contact;
    for (std::size_t i = 0; i < h.size(); ++i) h.boundary_params.push_back(h.contact[i] ? h.vertices[i].x : 0.0);
    const double s0 = 2.0;
    const BoundaryChart chart = chart_at(c, s0);
    std::vector<double> rigid;
    for (double t : {0.08, 0.04, 0.02}) {
      const PolyDroplet e = blow_down(h, chart, t);
      CHECK_NOTHROW(validate_droplet(e, *c));
      const PolyDroplet back = blow_up(e, chart, t);
      double worst = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, norm(back.vertices[i] - h.vertices[i]));
      CHECK(worst < 1e-9);
      // Without straightening: rigid motion and dilation only.
      const Vec2 y = c->point(s0), tangent = c->tangent(s0), inward = -c->outward_normal(s0);
      Polyline naive;
      for (const Vec2 x : e.vertices) naive.push_back({dot(x - y, tangent) / t, dot(x - y, inward) / t});
      naive.push_back(naive.front());
      Polyline kk = h.vertices;
      kk.push_back(kk.front());
      rigid.push_back(hausdorff_distance(naive, kk) / t);
    }
    // hd = O(t): the ratio stays bounded as t halves.
    CHECK(rigid[2] <= 1.2 * rigid[0]);
    CHECK(rigid[2] > 0.0);
  }
  SUBCASE("droplet beyond the chart reach") {
    const auto c = disk(0.0);
    CHECK_THROWS_AS(blow_up(interior_square({0.0, 0.0}, 0.2), chart_at(c, 0.0), 1.0), GeometryError);
    CHECK_THROWS_AS(blow_up(interior_square({0.8, 0.0}, 0.1), chart_at(c, 0.0), 0.0), std::invalid_argument);
  }
}

}  // TEST_SUITE
