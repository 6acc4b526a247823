#pragma once

// Reference quantities for a droplet resting on a flat wall in R^n.
//
// The ball B is cut by the plane {x_n = -tau}; S(tau) is the part above the
// cut. The unit-volume ideal droplet K(tau) is S(tau) lifted so that the cut
// sits on {x_n = 0} and rescaled to volume one. Its free surface meets the
// wall with nu_wall . nu_drop = tau.

#include <span>
#include <vector>

#include "capdrop/geometry.hpp"

namespace capdrop {

struct CapGeometry {
  int n = 2;
  double tau = 0.0;
};

/// Throws std::domain_error unless n >= 2 and -1 < tau < 1.
void validate(const CapGeometry& geom);

struct CapScalars {
  double volume = 0.0;
  double lateral_area = 0.0;
  double base_area = 0.0;
  double psi = 0.0;
  double psi_prime = 0.0;
  double phi = 0.0;
};

/// Volume of the unit ball in R^k (omega_1 = 2, omega_2 = pi, ...).
double unit_ball_volume(int k);

double cap_volume(const CapGeometry& geom);
double cap_lateral_area(const CapGeometry& geom);
double cap_base_area(const CapGeometry& geom);
/// Auxiliary positive factor of psi': n (omega_n / 2 + sign(tau) |slab|).
double cap_phi(const CapGeometry& geom);
/// Minimal wall-weighted surface energy at unit volume.
double psi(const CapGeometry& geom);
double psi_prime(const CapGeometry& geom);
CapScalars cap_scalars(const CapGeometry& geom);

/// Closed forms for n = 2 and n = 3, used to cross-check the quadrature path.
namespace closed_form {
double cap_volume(int n, double tau);
double cap_lateral_area(int n, double tau);
}  // namespace closed_form

struct IdealDroplet {
  CapGeometry geometry;
  double scale = 1.0;   // linear scale r; volume r^n
  double offset = 0.0;  // horizontal shift along the wall (n = 2)
};

/// Planar droplet polygon, counterclockwise. The flat wetted base comes first
/// (from the left rim to the right rim, all flagged as contact) followed by
/// the free arc back towards the left rim.
struct CapPolygon {
  Polyline vertices;
  std::vector<bool> contact;
};

/// Circle carrying the free arc of z + r K(tau) in the plane: center and radius.
struct CapCircle {
  Vec2 center;
  double radius = 0.0;
  double half_base = 0.0;  // half width of the wetted base
};
CapCircle ideal_droplet_circle(const IdealDroplet& d);

/// `segments` edges in total, split between base and arc in proportion to
/// their lengths (at least one on the base). Requires n = 2 and segments >= 4.
CapPolygon ideal_droplet_boundary(const IdealDroplet& d, int segments);

/// Free arc only (including both rim points), `segments` edges.
Polyline ideal_droplet_arc(const IdealDroplet& d, int segments);

/// Support function of S(tau) evaluated on a unit vector of R^n.
double support_function(const CapGeometry& geom, std::span<const double> nu);
double support_function(double tau, Vec2 nu);

/// Anisotropic perimeter: sum over edges of support_function(outward normal)
/// times edge length. Counterclockwise simple polygon required.
double anisotropic_energy(const CapGeometry& geom, std::span<const Vec2> poly);

}  // namespace capdrop
