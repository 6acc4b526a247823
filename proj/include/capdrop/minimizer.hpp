#pragma once

// Volume-constrained minimization of the Gauss free energy over polygonal
// droplets whose wetted run slides along the container wall.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capdrop/container.hpp"
#include "capdrop/energy.hpp"

namespace capdrop {

struct SeedSpec {
  enum class Kind {
    Boundary,        // ideal droplet at arc length s with contact parameter tau
    Interior,        // round droplet centered at `center`
    RandomBoundary,  // `count` boundary points drawn from the seed's RNG stream
    Droplet,         // explicit starting polygon (warm start)
  };
  Kind kind = Kind::Boundary;
  double s = 0.0;
  std::optional<double> tau;  // defaults to sigma(s)
  Vec2 center{};
  int count = 1;
  std::optional<PolyDroplet> droplet;
};

struct MinimizeConfig {
  int vertex_count = 512;
  double volume = 1e-3;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  double grad_tol = 1e-8;
  int max_iters = 20000;
  int remesh_interval = 25;
  /// Explicit seeds; when empty the default set is used: the
  /// `lowest_sigma_seeds` lowest-sigma stations plus one interior ball.
  std::vector<SeedSpec> seeds;
  int lowest_sigma_seeds = 8;
  bool interior_seed = true;
  std::uint64_t rng_seed = 1;
  int jobs = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const MinimizeConfig& cfg, const Container& c);

struct SeedOutcome {
  std::string label;
  double energy = 0.0;
  bool converged = false;
  bool wetted = false;
  int iterations = 0;
  std::string diagnostic;
};

struct MinimizeResult {
  PolyDroplet droplet;
  EnergyBreakdown energy;
  double contact_s = 0.0;  // midpoint of the wetted arc
  Vec2 contact_point{};
  std::vector<double> young_residuals;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::size_t seed_index = 0;
  std::vector<SeedOutcome> seeds;

  // Descent bookkeeping for the winning seed.
  bool monotone = true;
  double max_volume_error = 0.0;  // max |area - m| / m after projections
  std::vector<double> energy_trace;
};

/// Chart image of t K(tau) at boundary arc length s with t = sqrt(m), k
/// vertices, area renormalized to m by a normal offset of the free vertices.
/// Throws when the droplet would not fit in the chart reach.
PolyDroplet seed_droplet(ContainerPtr c, double s, double tau_guess, double m, int k);

/// Rescale a droplet about its wetted-arc midpoint (in chart coordinates) so
/// that its area becomes approximately m.
PolyDroplet rescale_droplet(ContainerPtr c, const PolyDroplet& p, double m);

MinimizeResult minimize(ContainerPtr c, const MinimizeConfig& cfg);

/// |nu_A . nu_E - sigma| at both ends of the wetted run, using the adjacent
/// free edge's outward normal. Empty when there is no contact.
std::vector<double> young_residual(const PolyDroplet& p, const Container& c);
std::vector<double> young_residual(const MinimizeResult& r, const Container& c);

/// Empirical almost-minimality constant: max over random local competitors
/// (normal bumps of one sign supported in balls of radius < rho0, volume not
/// preserved) of (F(E) - F(E')) / |E sym-diff E'|, clipped below at 0.
double almost_minimality_probe(const PolyDroplet& p, const Container& c, int trials, double rho0,
                               std::uint64_t rng_seed);
double almost_minimality_probe(const MinimizeResult& r, const Container& c, int trials, double rho0,
                               std::uint64_t rng_seed);

}  // namespace capdrop
