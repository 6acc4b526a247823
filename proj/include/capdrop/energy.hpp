#pragma once

// Gauss free energy of droplets in a container, and the half-plane stability
// functionals (deficit, asymmetry) measured against the ideal droplet.

#include <functional>

#include "capdrop/container.hpp"
#include "capdrop/sessile_reference.hpp"

namespace capdrop {

struct EnergyBreakdown {
  double free_surface = 0.0;
  double wetted = 0.0;
  double bulk = 0.0;
  double total = 0.0;
  /// Mean of discrete curvature plus g over free vertices; only meaningful
  /// for a converged minimizer.
  double lagrange_multiplier = 0.0;
};

/// Integral of g over a counterclockwise polygon: fan triangulation with the
/// edge-midpoint rule on each triangle (exact for affine g).
double bulk_integral(std::span<const Vec2> poly, const BulkPotential& g);

/// Free length + integral of sigma along the wetted arcs + integral of g.
/// The sigma integral is exact for the piecewise-linear station interpolant.
EnergyBreakdown gauss_energy(const PolyDroplet& p, const Container& c);

/// Curvature-plus-potential multiplier estimate over free vertices.
double lagrange_multiplier_estimate(const PolyDroplet& p, const BulkPotential& g);

// --- Half-plane functionals -------------------------------------------------

/// Free edge length + tau * length of edges joining consecutive contact
/// vertices (which must lie on {y = 0}).
double half_space_energy(const PolyDroplet& h, double tau);

double deficit(const PolyDroplet& h, double tau);

enum class OverlapBackend { Exact, Raster };

/// Area of h symmetric-difference (z e_1 + r K(tau)); h must lie in the closed
/// upper half-plane.
double cap_mismatch(const PolyDroplet& h, double tau, double r, double z, OverlapBackend backend,
                    int raster_res = 2048);

/// Area of h symmetric-difference (w + r K(tau)) for a general shift w in the plane.
double cap_mismatch_shifted(const PolyDroplet& h, double tau, double r, Vec2 w);

struct StabilityReport {
  double deficit = 0.0;
  double asymmetry = 0.0;
  double optimal_shift = 0.0;
};

StabilityReport asymmetry(const PolyDroplet& h, double tau, OverlapBackend backend = OverlapBackend::Exact);

/// Minimize f on [lo, hi]: golden section refined to `tol`, checked against a
/// uniform grid of `grid` points; when the grid finds a value lower by more
/// than `disagreement`, the search restarts around the grid minimum.
struct ScalarMin {
  double x = 0.0;
  double value = 0.0;
};
ScalarMin minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol, int grid = 64,
                          double disagreement = 1e-3);

}  // namespace capdrop
