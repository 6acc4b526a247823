#pragma once

// Fixtures and independent oracles shared by the test binaries.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "capdrop/harness.hpp"
#include "capdrop/sessile_reference.hpp"

namespace testsupport {

using namespace capdrop;

constexpr double kPi = 3.14159265358979323846;

ContainerPtr disk(double sigma, BulkPotential g = BulkPotential::zero(), double radius = 1.0);
ContainerPtr disk_cosine(double base, double amplitude, BulkPotential g = BulkPotential::zero());
ContainerPtr ellipse(double sigma, double a, double b);
/// Long stadium whose bottom side is the flat segment [-8, 8] x {0}.
ContainerPtr flat_wall(double sigma, BulkPotential g = BulkPotential::zero());

// --- oracles --------------------------------------------------------------------

/// Composite Simpson rule with `panels` (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// V, A, A0 for any n by Simpson on theta with rho = sin(theta).
double oracle_cap_volume(int n, double tau);
double oracle_lateral_area(int n, double tau);

/// max of x . nu over a dense sample of S(tau) (arc and chord).
double oracle_support(double tau, Vec2 nu, int samples = 200000);

/// Minimum energy of a circular lens droplet of area m inside a disk of
/// radius R with constant adhesion sigma (free arc + sigma * wetted arc),
/// minimized over the free radius. Returns energy, and via out-params the
/// wetted half-angle seen from the container center and the free radius.
struct Lens {
  double energy = 0.0;
  double free_radius = 0.0;
  double wall_half_angle = 0.0;
  double free_length = 0.0;
  double wetted_length = 0.0;
};
Lens oracle_lens(double R, double sigma, double m);

/// Random polygon in the closed upper half-plane: a star polygon around a
/// point above the axis, clipped to {y >= 0}; vertices on the axis are
/// flagged as contact.
PolyDroplet random_half_plane_polygon(std::mt19937_64& rng);

/// Polygon with `n` vertices approximating the circle of given center/radius.
Polyline circle_polygon(Vec2 center, double radius, int n);

/// Droplet on the wall of `c`: interior square of side `side` centered at p.
PolyDroplet interior_square(Vec2 center, double side);

// --- cached runs ----------------------------------------------------------------

/// Disk R = 1, sigma = 0.5, m = 1e-3, 512 vertices, default seeds.
const MinimizeResult& disk_half_run();
ContainerPtr disk_half();

/// Mass sweep on the disk with sigma = 0.5 at 128 vertices, masses
/// {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}.
const std::vector<SweepRecord>& disk_half_sweep();

/// Same masses on the disk with sigma(theta) = 0.3 + 0.2 (1 - cos theta).
const std::vector<SweepRecord>& disk_cosine_sweep();

/// Fresh temporary directory for file-based tests.
std::string temp_dir(const std::string& tag);

}  // namespace testsupport
