#pragma once

// Mass sweeps of minimizers, fits of their small-mass behaviour, and the
// half-plane stability probe over perturbation families of K(tau).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "capdrop/minimizer.hpp"

namespace capdrop {

struct SweepRecord {
  double m = 0.0;
  double gamma = 0.0;
  double normalized_gamma = 0.0;  // gamma / m^{1/2}
  double p_m = 0.0;               // arc length of the wetted-arc midpoint
  Vec2 p_m_point{};
  double sigma0 = 0.0;            // global minimum of sigma
  double sigma0_local = 0.0;      // minimum of sigma within one diameter of p_m
  double sigma_gap = 0.0;         // sigma(p_m) - sigma0
  double diameter = 0.0;
  double hd_blowup = 0.0;
  double young_max = 0.0;
  bool converged = false;
  int iterations = 0;
  std::size_t seed_index = 0;
  PolyDroplet droplet;
};

/// Runs the masses in order (strictly decreasing, each in (0, area/4)); the
/// first uses cfg.seeds, every later one starts from the previous minimizer
/// rescaled to the new mass.
std::vector<SweepRecord> sweep(ContainerPtr c, std::span<const double> masses, const MinimizeConfig& cfg);

/// Blow-up of a droplet at its wetted midpoint with scale m^{1/2}, compared
/// with the free arc of K(tau) (identity or reflection, whichever is closer).
double blowup_hausdorff(const PolyDroplet& p, ContainerPtr c, double tau);

struct FitReport {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  bool pass = false;
};

/// Least-squares line y = intercept + slope * x. r_squared is 1 for
/// constant y.
FitReport linear_fit(std::span<const double> x, std::span<const double> y);

/// normalized_gamma against m^{1/2}; passes when the intercept is within 3%
/// of psi(sigma0) and r^2 >= 0.9. Requires at least 4 records.
FitReport fit_gamma_expansion(std::span<const SweepRecord> records);

/// Named record fields: gamma, normalized_gamma, sigma_gap, diameter,
/// hd_blowup, young_max.
double record_field(const SweepRecord& r, const std::string& field);

/// log(field) against log(m); slope is the fitted exponent, pass iff it is at
/// least exponent - 0.1. Requires at least 4 records and positive values.
FitReport scaling_check(std::span<const SweepRecord> records, const std::string& field, double exponent);

/// Smallest C with gamma >= psi(sigma0_local) m^{1/2} (1 - C diameter) on
/// every record (0 when the bound already holds with C = 0).
double lower_bound_constant(std::span<const SweepRecord> records);

// --- Stability probe ----------------------------------------------------------

struct PerturbationFamily {
  enum class Kind { Stretch, Bump };
  Kind kind = Kind::Stretch;
  double lambda_min = 1.01;  // stretch x -> (lambda x1, x2 / lambda)
  double lambda_max = 1.3;
  double bump_min = 0.01;    // bump amplitude range, relative to the radius
  double bump_max = 0.1;
  int segments = 4096;
};

enum class StabilityForm { HalfSpace, Wulff };

struct StabilitySample {
  double parameter = 0.0;  // lambda or bump amplitude
  double excess = 0.0;     // energy excess over the ideal droplet
  double mismatch = 0.0;   // optimal symmetric difference
  double ratio = 0.0;
};

struct StabilityResult {
  double min_ratio = 0.0;
  std::vector<StabilitySample> samples;
  int rejected = 0;  // members violating K/2 inside F
};

/// Polygonal family member with unit area, inside the closed upper
/// half-plane, contact vertices on {y = 0}.
PolyDroplet family_member(double tau, const PerturbationFamily& family, double parameter, double position = 0.5);

/// Whether K(tau)/2 lies inside F (all vertices of the halved polygon).
bool contains_half_cap(const PolyDroplet& f, double tau);

/// min over `samples` random members of excess / mismatch^2. The half-space
/// form uses F_{H,tau}(F) - psi(tau) and the mismatch over horizontal
/// shifts; the Wulff form uses Phi(F) - Phi(K) and planar shifts.
StabilityResult stability_probe(double tau, const PerturbationFamily& family, int samples, StabilityForm form,
                                std::uint64_t rng_seed);

}  // namespace capdrop
