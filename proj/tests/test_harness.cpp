#include <doctest.h>

#include <cmath>

#include "capdrop/energy.hpp"
#include "support.hpp"

using namespace capdrop;
using namespace testsupport;

namespace {

std::vector<SweepRecord> synthetic(double sigma0, double c, const std::vector<double>& masses) {
  std::vector<SweepRecord> out;
  for (double m : masses) {
    SweepRecord r;
    r.m = m;
    r.sigma0 = sigma0;
    r.normalized_gamma = psi({2, sigma0}) * (1.0 + c * std::sqrt(m));
    r.gamma = r.normalized_gamma * std::sqrt(m);
    r.diameter = 3.0 * std::sqrt(m);
    r.hd_blowup = 0.1 * std::pow(m, 0.3);
    r.converged = true;
    out.push_back(r);
  }
  return out;
}

const std::vector<double> kMasses{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

double angle_of(double s) { return std::remainder(s, 2.0 * kPi); }

}  // namespace

TEST_SUITE("asymptotics_harness") {

TEST_CASE("linear fits") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0}, y{1.0, 3.0, 5.0, 7.0};
  const FitReport f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> flat{4.0, 4.0, 4.0, 4.0};
  const FitReport g = linear_fit(x, flat);
  CHECK(g.slope == 0.0);
  CHECK(g.intercept == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(g.r_squared >= 0.0);
  CHECK(g.r_squared <= 1.0);
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(linear_fit(flat, y), std::invalid_argument);
}

TEST_CASE("gamma expansion fit on synthetic records") {
  const auto recs = synthetic(0.5, 0.7, kMasses);
  const FitReport f = fit_gamma_expansion(recs);
  CHECK(f.intercept == doctest::Approx(psi({2, 0.5})).epsilon(1e-12));
  CHECK(f.slope == doctest::Approx(0.7 * psi({2, 0.5})).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.pass);
  const auto flat = synthetic(0.5, 0.0, kMasses);
  const FitReport g = fit_gamma_expansion(flat);
  CHECK(g.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.intercept == doctest::Approx(psi({2, 0.5})).epsilon(1e-14));
  auto broken = recs;
  broken[2].converged = false;
  CHECK_FALSE(fit_gamma_expansion(broken).pass);
  auto shifted = recs;
  for (auto& r : shifted) r.normalized_gamma *= 1.05;
  CHECK_FALSE(fit_gamma_expansion(shifted).pass);
  CHECK_THROWS_AS(fit_gamma_expansion(std::span(recs).first(3)), std::invalid_argument);
}

TEST_CASE("scaling checks on synthetic records") {
  auto recs = synthetic(0.5, 0.0, kMasses);
  const FitReport d = scaling_check(recs, "diameter", 0.5);
  CHECK(d.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.pass);
  CHECK(scaling_check(recs, "hd_blowup", 0.125).pass);
  CHECK_FALSE(scaling_check(recs, "hd_blowup", 0.5).pass);
  CHECK_THROWS_AS(scaling_check(recs, "no_such_field", 0.5), std::invalid_argument);
  recs[1].hd_blowup = 0.0;
  CHECK_THROWS_AS(scaling_check(recs, "hd_blowup", 0.125), std::invalid_argument);
  CHECK_THROWS_AS(scaling_check(std::span(recs).first(3), "diameter", 0.5), std::invalid_argument);
}

TEST_CASE("lower-bound constant") {
  auto recs = synthetic(0.5, 0.0, kMasses);
  for (auto& r : recs) r.sigma0_local = 0.5;
  CHECK(lower_bound_constant(recs) == 0.0);
  recs[0].gamma *= 0.9;
  const double c = lower_bound_constant(recs);
  CHECK(c == doctest::Approx(0.1 / recs[0].diameter).epsilon(1e-12));
}

TEST_CASE("disk sweep with constant sigma") {
  const auto& recs = disk_half_sweep();
  REQUIRE(recs.size() == kMasses.size());
  for (const auto& r : recs) {
    CHECK(r.converged);
    CHECK(r.young_max <= 3e-2);
    CHECK(std::isfinite(r.hd_blowup));
    CHECK(r.sigma_gap == doctest::Approx(0.0).epsilon(1e-12));
  }
  const FitReport f = fit_gamma_expansion(recs);
  CHECK(f.pass);
  CHECK(f.intercept == doctest::Approx(psi({2, 0.5})).epsilon(0.03));
  const double last = recs.back().normalized_gamma;
  CHECK(std::abs(last - psi({2, 0.5})) <= 0.03 * psi({2, 0.5}));
  // Approaches psi(0.5) monotonically (from below on a convex wall).
  for (std::size_t i = 1; i < recs.size(); ++i)
    CHECK(std::abs(recs[i].normalized_gamma - psi({2, 0.5})) < std::abs(recs[i - 1].normalized_gamma - psi({2, 0.5})));
  const FitReport d = scaling_check(recs, "diameter", 0.5);
  CHECK(d.pass);
  CHECK(d.slope == doctest::Approx(0.5).epsilon(0.05));
  CHECK(scaling_check(recs, "hd_blowup", 0.125).pass);
}

TEST_CASE("non-converged masses are recorded, not dropped") {
  MinimizeConfig cfg;
  cfg.vertex_count = 64;
  cfg.max_iters = 3;
  cfg.lowest_sigma_seeds = 1;
  cfg.interior_seed = false;
  const std::vector<double> masses{1e-2, 1e-3, 1e-4, 1e-5};
  const auto recs = sweep(disk_half(), masses, cfg);
  REQUIRE(recs.size() == masses.size());
  bool any = false;
  for (const auto& r : recs) any = any || !r.converged;
  CHECK(any);
  CHECK_FALSE(fit_gamma_expansion(recs).pass);
}

TEST_CASE("sweep preconditions") {
  MinimizeConfig cfg;
  cfg.vertex_count = 64;
  const std::vector<double> ascending{1e-4, 1e-3};
  CHECK_THROWS_AS(sweep(disk_half(), ascending, cfg), std::invalid_argument);
  const std::vector<double> huge{1.0};
  CHECK_THROWS_AS(sweep(disk_half(), huge, cfg), std::invalid_argument);
  const std::vector<double> ok{1e-3};
  CHECK_THROWS_AS(sweep(disk(0.95), ok, cfg), std::invalid_argument);
}

TEST_CASE("the potential does not select the contact point") {
  const auto& flat = disk_cosine_sweep();
  MinimizeConfig cfg;
  cfg.vertex_count = 128;
  cfg.lowest_sigma_seeds = 2;
  cfg.interior_seed = false;
  const std::vector<double> masses{1e-3, 1e-4};
  const auto heavy = sweep(disk_cosine(0.3, 0.2, BulkPotential::linear(0.0, 0.0, 10.0)), masses, cfg);
  REQUIRE(heavy.size() == 2);
  CHECK(heavy[0].converged);
  CHECK(heavy[1].converged);
  // Without g the droplet sits at the sigma minimum; with g it drifts by O(sqrt m).
  CHECK(std::abs(angle_of(flat[2].p_m)) < 1e-6);
  CHECK(std::abs(angle_of(flat[4].p_m)) < 1e-6);
  const double a3 = std::abs(angle_of(heavy[0].p_m)), a4 = std::abs(angle_of(heavy[1].p_m));
  CHECK(a4 < a3);
  CHECK(a4 <= 0.6 * a3);
  CHECK(heavy[1].sigma_gap < heavy[0].sigma_gap);
}

TEST_CASE("blow-up of an exact cap") {
  const auto c = flat_wall(0.3);
  const double m = 0.01;
  const PolyDroplet seed = seed_droplet(c, c->project({0.5, 0.0}).s, 0.3, m, 1024);
  CHECK(blowup_hausdorff(seed, c, 0.3) <= 1e-3);
  CHECK(blowup_hausdorff(seed, c, -0.3) > 0.05);
  CHECK_THROWS_AS(blowup_hausdorff(interior_square({0.0, 1.0}, 0.2), c, 0.3), GeometryError);
}

TEST_CASE("stability family members") {
  PerturbationFamily stretch;
  const PolyDroplet k = family_member(0.0, stretch, 1.0);
  CHECK(polygon_area(k) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(deficit(k, 0.0) <= 1e-4);
  const PolyDroplet s = family_member(0.0, stretch, 1.2);
  CHECK(polygon_area(s) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(contains_half_cap(s, 0.0));
  CHECK_FALSE(contains_half_cap(family_member(0.0, stretch, 3.0), 0.0));
  PerturbationFamily bump;
  bump.kind = PerturbationFamily::Kind::Bump;
  const PolyDroplet b = family_member(0.3, bump, 0.05, 0.3);
  CHECK(polygon_area(b) == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.contact[i]) CHECK(b.vertices[i].y == 0.0);
  CHECK(deficit(b, 0.3) > 0.0);
}

TEST_CASE("stability probe") {
  PerturbationFamily stretch;
  stretch.segments = 1024;
  const StabilityResult a = stability_probe(0.0, stretch, 8, StabilityForm::HalfSpace, 1);
  CHECK(a.min_ratio > 0.0);
  CHECK(std::isfinite(a.min_ratio));
  CHECK(a.samples.size() == 8);
  for (const auto& smp : a.samples) {
    CHECK(smp.excess > 0.0);
    CHECK(smp.ratio >= a.min_ratio);
  }
  // The nearest member to K still has a finite positive ratio.
  PerturbationFamily near = stretch;
  near.lambda_max = 1.011;
  const StabilityResult n = stability_probe(0.0, near, 2, StabilityForm::HalfSpace, 1);
  CHECK(n.min_ratio > 0.0);
  CHECK(std::isfinite(n.min_ratio));
  PerturbationFamily identity = stretch;
  identity.lambda_min = 1.0;
  CHECK_THROWS_AS(stability_probe(0.0, identity, 4, StabilityForm::HalfSpace, 1), std::invalid_argument);
  PerturbationFamily wild = stretch;
  wild.lambda_min = 3.0;
  wild.lambda_max = 4.0;
  CHECK_THROWS_AS(stability_probe(0.0, wild, 4, StabilityForm::HalfSpace, 1), std::invalid_argument);
  PerturbationFamily bump;
  bump.kind = PerturbationFamily::Kind::Bump;
  bump.segments = 1024;
  CHECK(stability_probe(0.2, bump, 6, StabilityForm::HalfSpace, 2).min_ratio > 0.0);
}

}  // TEST_SUITE
