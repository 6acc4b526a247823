#include "capdrop/sessile_reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "capdrop/kernels.hpp"

namespace capdrop {

namespace {

constexpr double kPi = std::numbers::pi;

// Adaptive G7/K15 on the theta-integrals; after rho = sin(theta) both
// integrands are smooth powers of cos(theta), including n = 2 where the rho
// form of A has endpoint singularities.
double integrate_cos_power(int power, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [power](double t) { return std::pow(std::cos(t), power); };
  double err = 0.0;
  const double val = gauss_kronrod<double, 15>::integrate(f, lo, hi, 20, 1e-14, &err);
  if (!(err <= 1e-12)) {
    throw std::runtime_error("cap quadrature did not reach 1e-12 (error estimate " + std::to_string(err) + ")");
  }
  return val;
}

}  // namespace

void validate(const CapGeometry& geom) {
  if (geom.n < 2) throw std::domain_error("cap geometry: dimension n must be >= 2");
  if (!(geom.tau > -1.0 && geom.tau < 1.0)) {
    throw std::domain_error("cap geometry: tau must lie in the open interval (-1, 1)");
  }
}

double unit_ball_volume(int k) {
  if (k < 0) throw std::domain_error("unit_ball_volume: negative dimension");
  return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double cap_volume(const CapGeometry& geom) {
  validate(geom);
  return unit_ball_volume(geom.n - 1) * integrate_cos_power(geom.n, -std::asin(geom.tau), 0.5 * kPi);
}

double cap_lateral_area(const CapGeometry& geom) {
  validate(geom);
  return (geom.n - 1) * unit_ball_volume(geom.n - 1) *
         integrate_cos_power(geom.n - 2, -std::asin(geom.tau), 0.5 * kPi);
}

double cap_base_area(const CapGeometry& geom) {
  validate(geom);
  return unit_ball_volume(geom.n - 1) * std::pow(1.0 - geom.tau * geom.tau, 0.5 * (geom.n - 1));
}

double cap_phi(const CapGeometry& geom) {
  validate(geom);
  const double t = std::abs(geom.tau);
  const double slab = cap_volume({geom.n, 0.0}) - cap_volume({geom.n, -t});
  const double sign = geom.tau > 0.0 ? 1.0 : (geom.tau < 0.0 ? -1.0 : 0.0);
  return geom.n * (0.5 * unit_ball_volume(geom.n) + sign * slab);
}

double psi(const CapGeometry& geom) {
  const double v = cap_volume(geom);
  const double a = cap_lateral_area(geom);
  const double a0 = cap_base_area(geom);
  return (a + geom.tau * a0) / std::pow(v, (geom.n - 1.0) / geom.n);
}

double psi_prime(const CapGeometry& geom) {
  const double v = cap_volume(geom);
  const double a0 = cap_base_area(geom);
  return a0 * cap_phi(geom) / (geom.n * std::pow(v, 2.0 - 1.0 / geom.n));
}

CapScalars cap_scalars(const CapGeometry& geom) {
  CapScalars s;
  s.volume = cap_volume(geom);
  s.lateral_area = cap_lateral_area(geom);
  s.base_area = cap_base_area(geom);
  s.phi = cap_phi(geom);
  s.psi = (s.lateral_area + geom.tau * s.base_area) / std::pow(s.volume, (geom.n - 1.0) / geom.n);
  s.psi_prime = s.base_area * s.phi / (geom.n * std::pow(s.volume, 2.0 - 1.0 / geom.n));
  return s;
}

namespace closed_form {

double cap_volume(int n, double tau) {
  validate({n, tau});
  if (n == 2) return 0.5 * kPi + std::asin(tau) + tau * std::sqrt(1.0 - tau * tau);
  if (n == 3) return kPi * (2.0 / 3.0 + tau - tau * tau * tau / 3.0);
  throw std::domain_error("closed-form cap volume only for n = 2, 3");
}

double cap_lateral_area(int n, double tau) {
  validate({n, tau});
  if (n == 2) return kPi + 2.0 * std::asin(tau);
  if (n == 3) return 2.0 * kPi * (1.0 + tau);
  throw std::domain_error("closed-form cap lateral area only for n = 2, 3");
}

}  // namespace closed_form

CapCircle ideal_droplet_circle(const IdealDroplet& d) {
  validate(d.geometry);
  if (d.geometry.n != 2) throw std::invalid_argument("ideal droplet polygons exist only for n = 2");
  if (!(d.scale > 0.0)) throw std::invalid_argument("ideal droplet scale must be positive");
  const double tau = d.geometry.tau;
  const double inv_root_v = 1.0 / std::sqrt(closed_form::cap_volume(2, tau));
  CapCircle c;
  c.radius = d.scale * inv_root_v;
  c.center = {d.offset, tau * c.radius};
  c.half_base = c.radius * std::sqrt(1.0 - tau * tau);
  return c;
}

CapPolygon ideal_droplet_boundary(const IdealDroplet& d, int segments) {
  if (segments < 4) throw std::invalid_argument("ideal droplet polygon needs at least 4 segments");
  const CapCircle c = ideal_droplet_circle(d);
  const double tau = d.geometry.tau;
  const double sweep = kPi + 2.0 * std::asin(tau);
  const double base_len = 2.0 * c.half_base;
  const double arc_len = c.radius * sweep;
  int n_base = static_cast<int>(std::lround(segments * base_len / (base_len + arc_len)));
  n_base = std::clamp(n_base, 1, segments - 2);
  const int n_arc = segments - n_base;

  CapPolygon out;
  out.vertices.reserve(static_cast<std::size_t>(segments));
  const double left = d.offset - c.half_base;
  for (int k = 0; k <= n_base; ++k) {
    const double x = (k == n_base) ? d.offset + c.half_base : left + base_len * k / n_base;
    out.vertices.push_back({x, 0.0});
    out.contact.push_back(true);
  }
  const double theta0 = -std::asin(tau);
  for (int j = 1; j < n_arc; ++j) {
    const double th = theta0 + sweep * j / n_arc;
    out.vertices.push_back({c.center.x + c.radius * std::cos(th), c.center.y + c.radius * std::sin(th)});
    out.contact.push_back(false);
  }
  return out;
}

Polyline ideal_droplet_arc(const IdealDroplet& d, int segments) {
  if (segments < 1) throw std::invalid_argument("arc needs at least one segment");
  const CapCircle c = ideal_droplet_circle(d);
  const double tau = d.geometry.tau;
  const double sweep = kPi + 2.0 * std::asin(tau);
  const double theta0 = -std::asin(tau);
  Polyline arc;
  arc.reserve(static_cast<std::size_t>(segments) + 1);
  arc.push_back({d.offset + c.half_base, 0.0});
  for (int j = 1; j < segments; ++j) {
    const double th = theta0 + sweep * j / segments;
    arc.push_back({c.center.x + c.radius * std::cos(th), c.center.y + c.radius * std::sin(th)});
  }
  arc.push_back({d.offset - c.half_base, 0.0});
  return arc;
}

double support_function(const CapGeometry& geom, std::span<const double> nu) {
  validate(geom);
  if (nu.size() != static_cast<std::size_t>(geom.n)) {
    throw std::invalid_argument("support_function: direction has wrong dimension");
  }
  double len2 = 0.0;
  for (const double c : nu) len2 += c * c;
  if (std::abs(std::sqrt(len2) - 1.0) > 1e-12) {
    throw std::invalid_argument("support_function: direction must be a unit vector");
  }
  const double nu_n = nu.back();
  if (nu_n >= -geom.tau) return 1.0;
  const double horizontal = std::sqrt(std::max(0.0, len2 - nu_n * nu_n));
  return std::sqrt(1.0 - geom.tau * geom.tau) * horizontal - geom.tau * nu_n;
}

double support_function(double tau, Vec2 nu) {
  const double comps[2] = {nu.x, nu.y};
  return support_function(CapGeometry{2, tau}, comps);
}

double anisotropic_energy(const CapGeometry& geom, std::span<const Vec2> poly) {
  validate(geom);
  if (geom.n != 2) throw std::invalid_argument("anisotropic_energy: polygons are planar (n = 2)");
  if (!is_simple_polygon(poly)) throw GeometryError("anisotropic_energy: polygon is not simple");
  const bool ccw = signed_area(poly) > 0.0;
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    const double len = norm(e);
    const Vec2 outward = (ccw ? rot_cw(e) : rot_ccw(e)) / len;
    // Renormalize: the unit check in support_function is strict.
    total += support_function(geom.tau, normalized(outward)) * len;
  }
  return total;
}

}  // namespace capdrop
