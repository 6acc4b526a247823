#include "capdrop/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "capdrop/sessile_reference.hpp"

namespace capdrop {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wetted_midpoint(const PolyDroplet& p) {
  const auto start = p.run_start();
  if (!start) throw GeometryError("droplet has no wetted arc");
  const std::size_t n = p.size();
  std::size_t end = *start;
  while (p.contact[(end + 1) % n]) end = (end + 1) % n;
  return 0.5 * (p.boundary_params[*start] + p.boundary_params[end]);
}

double local_sigma_min(const Container& c, Vec2 center, double radius) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.station_count(); ++i) {
    if (norm(c.station_point(i) - center) <= radius) best = std::min(best, c.station_sigma(i));
  }
  return std::isfinite(best) ? best : c.sigma_min();
}

}  // namespace

double blowup_hausdorff(const PolyDroplet& p, ContainerPtr c, double tau) {
  const double area = std::abs(signed_area(p.vertices));
  const BoundaryChart chart = chart_at(c, wetted_midpoint(p));
  const PolyDroplet h = blow_up(p, chart, std::sqrt(area));
  const Polyline free = free_boundary(h);
  const Polyline arc = ideal_droplet_arc({{2, tau}, 1.0, 0.0}, 4096);
  Polyline mirrored = free;
  for (Vec2& v : mirrored) v.x = -v.x;
  return std::min(hausdorff_distance(free, arc), hausdorff_distance(mirrored, arc));
}

std::vector<SweepRecord> sweep(ContainerPtr c, std::span<const double> masses, const MinimizeConfig& cfg) {
  if (!c) throw std::invalid_argument("sweep: null container");
  if (masses.empty()) throw std::invalid_argument("sweep: masses must not be empty");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0 && masses[i] < 0.25 * c->area())) {
      throw std::invalid_argument("sweep: masses must lie in (0, area/4)");
    }
    if (i > 0 && !(masses[i] < masses[i - 1])) throw std::invalid_argument("sweep: masses must be strictly decreasing");
  }
  for (int i = 0; i < c->station_count(); ++i) {
    if (std::abs(c->station_sigma(i)) > 0.9) throw std::invalid_argument("sweep: sigma must satisfy |sigma| <= 0.9");
  }
  std::vector<SweepRecord> out;
  std::optional<PolyDroplet> previous;
  for (const double m : masses) {
    MinimizeConfig run = cfg;
    run.volume = m;
    if (previous) {
      SeedSpec warm;
      warm.kind = SeedSpec::Kind::Droplet;
      warm.droplet = previous;
      run.seeds = {warm};
    }
    const MinimizeResult res = minimize(c, run);
    SweepRecord r;
    r.m = m;
    r.gamma = res.energy.total;
    r.normalized_gamma = r.gamma / std::sqrt(m);
    r.p_m = res.contact_s;
    r.p_m_point = res.contact_point;
    r.sigma0 = c->sigma_min();
    r.diameter = diameter(res.droplet.vertices);
    r.sigma0_local = local_sigma_min(*c, r.p_m_point, r.diameter);
    r.sigma_gap = c->sigma(r.p_m) - r.sigma0;
    r.converged = res.converged;
    r.iterations = res.iterations;
    r.seed_index = res.seed_index;
    r.droplet = res.droplet;
    if (res.droplet.run_start()) {
      r.hd_blowup = blowup_hausdorff(res.droplet, c, std::clamp(r.sigma0, -0.99, 0.99));
      for (double y : res.young_residuals) r.young_max = std::max(r.young_max, y);
    } else {
      r.converged = false;
      r.hd_blowup = std::numeric_limits<double>::quiet_NaN();
      r.young_max = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(r);
    previous = res.droplet;
  }
  return out;
}

FitReport linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("linear_fit: x values are all equal");
  FitReport f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return f;
}

FitReport fit_gamma_expansion(std::span<const SweepRecord> records) {
  if (records.size() < 4) throw std::invalid_argument("fit_gamma_expansion: need at least 4 records");
  std::vector<double> x, y;
  for (const auto& r : records) {
    x.push_back(std::sqrt(r.m));
    y.push_back(r.normalized_gamma);
  }
  FitReport f = linear_fit(x, y);
  const double target = psi({2, records.front().sigma0});
  const bool all_converged = std::all_of(records.begin(), records.end(), [](const SweepRecord& r) { return r.converged; });
  f.pass = all_converged && std::abs(f.intercept - target) <= 0.03 * target && f.r_squared >= 0.9;
  return f;
}

double record_field(const SweepRecord& r, const std::string& field) {
  if (field == "gamma") return r.gamma;
  if (field == "normalized_gamma") return r.normalized_gamma;
  if (field == "sigma_gap") return r.sigma_gap;
  if (field == "diameter") return r.diameter;
  if (field == "hd_blowup") return r.hd_blowup;
  if (field == "young_max") return r.young_max;
  throw std::invalid_argument("unknown record field '" + field + "'");
}

FitReport scaling_check(std::span<const SweepRecord> records, const std::string& field, double exponent) {
  if (records.size() < 4) throw std::invalid_argument("scaling_check: need at least 4 records");
  std::vector<double> x, y;
  for (const auto& r : records) {
    const double v = record_field(r, field);
    if (!(v > 0.0)) throw std::invalid_argument("scaling_check: field '" + field + "' has a nonpositive value");
    x.push_back(std::log(r.m));
    y.push_back(std::log(v));
  }
  FitReport f = linear_fit(x, y);
  f.pass = f.slope >= exponent - 0.1;
  return f;
}

double lower_bound_constant(std::span<const SweepRecord> records) {
  double c = 0.0;
  for (const auto& r : records) {
    const double bound = psi({2, r.sigma0_local}) * std::sqrt(r.m);
    const double shortfall = 1.0 - r.gamma / bound;
    if (shortfall > 0.0) c = std::max(c, shortfall / r.diameter);
  }
  return c;
}

PolyDroplet family_member(double tau, const PerturbationFamily& family, double parameter, double position) {
  const CapPolygon cap = ideal_droplet_boundary({{2, tau}, 1.0, 0.0}, family.segments);
  PolyDroplet f;
  f.vertices = cap.vertices;
  f.contact = cap.contact;
  f.boundary_params.assign(f.size(), 0.0);
  if (family.kind == PerturbationFamily::Kind::Stretch) {
    if (!(parameter > 0.0)) throw std::invalid_argument("stretch parameter must be positive");
    for (Vec2& v : f.vertices) v = {parameter * v.x, v.y / parameter};
  } else {
    // One-signed bump on the free arc centred at the given fraction of it.
    const CapCircle circle = ideal_droplet_circle({{2, tau}, 1.0, 0.0});
    std::vector<std::size_t> arc;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (!f.contact[i]) arc.push_back(i);
    const double centre = std::clamp(position, 0.1, 0.9) * static_cast<double>(arc.size() - 1);
    const double half_width = 0.15 * static_cast<double>(arc.size());
    for (std::size_t k = 0; k < arc.size(); ++k) {
      const double r = (static_cast<double>(k) - centre) / half_width;
      if (std::abs(r) >= 1.0) continue;
      Vec2& v = f.vertices[arc[k]];
      const Vec2 radial = normalized(v - circle.center);
      v = v + (parameter * circle.radius * (1.0 - r * r) * (1.0 - r * r)) * radial;
    }
  }
  const double scale = 1.0 / std::sqrt(std::abs(signed_area(f.vertices)));
  for (Vec2& v : f.vertices) v = scale * v;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.contact[i]) {
      f.vertices[i].y = 0.0;
      f.boundary_params[i] = f.vertices[i].x;
    }
  }
  return f;
}

bool contains_half_cap(const PolyDroplet& f, double tau) {
  const CapPolygon half = ideal_droplet_boundary({{2, tau}, 0.5, 0.0}, 512);
  for (std::size_t i = 0; i < half.vertices.size(); ++i) {
    Vec2 v = half.vertices[i];
    // Base points sit on the wall; test them just above it.
    if (half.contact[i]) v.y += 1e-9;
    if (!point_in_polygon(v, f.vertices)) return false;
  }
  return true;
}

StabilityResult stability_probe(double tau, const PerturbationFamily& family, int samples, StabilityForm form,
                                std::uint64_t rng_seed) {
  validate(CapGeometry{2, tau});
  if (samples < 1) throw std::invalid_argument("stability_probe: samples must be positive");
  if (family.segments < 64) throw std::invalid_argument("stability_probe: family needs at least 64 segments");
  double lo = family.lambda_min, hi = family.lambda_max;
  if (family.kind == PerturbationFamily::Kind::Bump) {
    lo = family.bump_min;
    hi = family.bump_max;
  }
  if (!(hi >= lo)) throw std::invalid_argument("stability_probe: empty parameter range");
  if (family.kind == PerturbationFamily::Kind::Stretch && !(lo > 1.0)) {
    throw std::invalid_argument("stability_probe: stretch factors must exceed 1 (lambda = 1 is K itself)");
  }
  if (family.kind == PerturbationFamily::Kind::Bump && !(lo > 0.0)) {
    throw std::invalid_argument("stability_probe: bump amplitudes must be positive");
  }

  const CapGeometry geom{2, tau};
  const double psi_tau = psi(geom);
  const CapPolygon k_poly = ideal_droplet_boundary({geom, 1.0, 0.0}, family.segments);
  const double phi_k = anisotropic_energy(geom, k_poly.vertices);
  const CapCircle circle = ideal_droplet_circle({geom, 1.0, 0.0});
  const double height = circle.center.y + circle.radius;

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> param(lo, hi);
  std::uniform_real_distribution<double> where(0.2, 0.8);

  StabilityResult out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double p = param(rng);
    const double pos = where(rng);
    const PolyDroplet f = family_member(tau, family, p, pos);
    if (!contains_half_cap(f, tau)) {
      ++out.rejected;
      continue;
    }
    StabilitySample s;
    s.parameter = p;
    if (form == StabilityForm::HalfSpace) {
      s.excess = half_space_energy(f, tau) - psi_tau;
      s.mismatch = asymmetry(f, tau).asymmetry;
    } else {
      s.excess = anisotropic_energy(geom, f.vertices) - phi_k;
      double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
      for (const Vec2 v : f.vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
      }
      auto inner = [&](double wy) {
        auto g = [&](double wx) { return cap_mismatch_shifted(f, tau, 1.0, {wx, wy}); };
        return minimize_scalar(g, xmin, xmax, 1e-6, 0).value;
      };
      s.mismatch = minimize_scalar(inner, -0.5 * height, 0.5 * height, 1e-6, 8).value;
    }
    s.ratio = s.excess / (s.mismatch * s.mismatch);
    out.min_ratio = std::min(out.min_ratio, s.ratio);
    out.samples.push_back(s);
  }
  if (out.samples.empty()) throw std::invalid_argument("stability_probe: every family member violates K/2 inside F");
  return out;
}

}  // namespace capdrop
