#include "capdrop/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capdrop {

double bulk_integral(std::span<const Vec2> poly, const BulkPotential& g) {
  if (g.is_zero() || poly.size() < 3) return 0.0;
  const Vec2 o = poly[0];
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[i + 1];
    const double area = 0.5 * cross(a - o, b - o);
    total += area * (g(0.5 * (o + a)) + g(0.5 * (a + b)) + g(0.5 * (b + o))) / 3.0;
  }
  return total;
}

double lagrange_multiplier_estimate(const PolyDroplet& p, const BulkPotential& g) {
  const std::size_t n = p.size();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p.contact[i]) continue;
    const Vec2 prev = p.vertices[(i + n - 1) % n], cur = p.vertices[i], next = p.vertices[(i + 1) % n];
    const Vec2 e0 = cur - prev, e1 = next - cur;
    const double turn = std::atan2(cross(e0, e1), dot(e0, e1));
    const double kappa = turn / (0.5 * (norm(e0) + norm(e1)));
    const double gm = 0.5 * (g(0.5 * (prev + cur)) + g(0.5 * (cur + next)));
    sum += kappa + gm;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

EnergyBreakdown gauss_energy(const PolyDroplet& p, const Container& c) {
  validate_droplet(p, c);
  EnergyBreakdown e;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (p.contact[i] && p.contact[j]) {
      e.wetted += c.sigma_integral(p.boundary_params[i], p.boundary_params[j]);
    } else {
      e.free_surface += norm(p.vertices[j] - p.vertices[i]);
    }
  }
  e.bulk = bulk_integral(p.vertices, c.potential());
  e.total = e.free_surface + e.wetted + e.bulk;
  e.lagrange_multiplier = lagrange_multiplier_estimate(p, c.potential());
  return e;
}

namespace {

void require_half_plane(const PolyDroplet& h) {
  if (h.contact.size() != h.vertices.size()) throw std::invalid_argument("half-plane droplet: flags size mismatch");
  double scale = 0.0;
  for (const Vec2 v : h.vertices) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  const double tol = 1e-9 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.vertices[i].y < -tol) throw GeometryError("half-plane droplet: vertex below the wall");
    if (h.contact[i] && std::abs(h.vertices[i].y) > tol) {
      throw GeometryError("half-plane droplet: contact vertex off {y = 0}");
    }
  }
}

double checked_area(const PolyDroplet& h) {
  const double a = std::abs(signed_area(h.vertices));
  if (!(a > 0.0)) throw GeometryError("half-plane droplet: zero area");
  return a;
}

}  // namespace

double half_space_energy(const PolyDroplet& h, double tau) {
  require_half_plane(h);
  const std::size_t n = h.size();
  double free_len = 0.0, wet_len = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double len = norm(h.vertices[j] - h.vertices[i]);
    if (h.contact[i] && h.contact[j]) {
      wet_len += len;
    } else {
      free_len += len;
    }
  }
  return free_len + tau * wet_len;
}

double deficit(const PolyDroplet& h, double tau) {
  const double area = checked_area(h);
  return half_space_energy(h, tau) / (psi({2, tau}) * std::sqrt(area)) - 1.0;
}

double cap_mismatch(const PolyDroplet& h, double tau, double r, double z, OverlapBackend backend, int raster_res) {
  const CapCircle circle = ideal_droplet_circle({{2, tau}, r, z});
  if (backend == OverlapBackend::Raster) {
    return raster_symdiff_cap(h.vertices, circle.center, circle.radius, 0.0, raster_res);
  }
  // h lies in the upper half-plane, so h intersected with the cap equals h
  // intersected with the full disk.
  const double area = std::abs(signed_area(h.vertices));
  const double overlap = polygon_disk_intersection_area(h.vertices, circle.center, circle.radius);
  return std::max(0.0, area + r * r - 2.0 * overlap);
}

double cap_mismatch_shifted(const PolyDroplet& h, double tau, double r, Vec2 w) {
  const CapCircle circle = ideal_droplet_circle({{2, tau}, r, w.x});
  const double area = std::abs(signed_area(h.vertices));
  const Polyline clipped = clip_above(h.vertices, w.y);
  const double overlap =
      clipped.size() >= 3 ? polygon_disk_intersection_area(clipped, circle.center + Vec2{0.0, w.y}, circle.radius) : 0.0;
  return std::max(0.0, area + r * r - 2.0 * overlap);
}

ScalarMin minimize_scalar(const std::function<double(double)>& f, double lo, double hi, double tol, int grid,
                          double disagreement) {
  if (!(hi > lo)) return {lo, f(lo)};
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto golden = [&](double a, double b) {
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = f(d);
      }
    }
    const double x = 0.5 * (a + b);
    return ScalarMin{x, f(x)};
  };
  ScalarMin best = golden(lo, hi);
  if (grid < 2) return best;
  const double step = (hi - lo) / (grid - 1);
  ScalarMin coarse{lo, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < grid; ++k) {
    const double x = lo + step * k;
    const double v = f(x);
    if (v < coarse.value) coarse = {x, v};
  }
  if (coarse.value < best.value - disagreement) {
    best = golden(std::max(lo, coarse.x - step), std::min(hi, coarse.x + step));
    if (coarse.value < best.value) best = coarse;
  }
  return best;
}

StabilityReport asymmetry(const PolyDroplet& h, double tau, OverlapBackend backend) {
  require_half_plane(h);
  const double area = checked_area(h);
  const double r = std::sqrt(area);
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  for (const Vec2 v : h.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
  }
  auto mismatch = [&](double z) { return cap_mismatch(h, tau, r, z, backend) / area; };
  const ScalarMin m = minimize_scalar(mismatch, xmin, xmax, 1e-6 * std::max(1.0, xmax - xmin));
  StabilityReport rep;
  rep.deficit = deficit(h, tau);
  rep.asymmetry = m.value;
  rep.optimal_shift = m.x;
  return rep;
}

}  // namespace capdrop
