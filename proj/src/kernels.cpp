#include "capdrop/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

namespace capdrop {
namespace kernels {

namespace {

double vertex_pass(std::span<const Vec2> from, std::span<const Vec2> to) {
  double best = 0.0;
  for (const Vec2 p : from) best = std::max(best, point_polyline_distance(p, to));
  return best;
}

double box_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double dx = std::max({0.0, std::min(c.x, d.x) - std::max(a.x, b.x), std::min(a.x, b.x) - std::max(c.x, d.x)});
  const double dy = std::max({0.0, std::min(c.y, d.y) - std::max(a.y, b.y), std::min(a.y, b.y) - std::max(c.y, d.y)});
  return std::hypot(dx, dy);
}

double candidate_distance(Vec2 p, std::span<const Vec2> to, const std::vector<std::size_t>& cand) {
  double d = std::numeric_limits<double>::infinity();
  for (const std::size_t j : cand) d = std::min(d, point_segment_distance(p, to[j - 1], to[j]));
  return d;
}

// Distance to each segment of `to` is convex along [a,b], so the sup over a
// sub-interval is at most min_j max(d_j(t0), d_j(t1)).
double convex_bound(Vec2 p, Vec2 q, std::span<const Vec2> to, const std::vector<std::size_t>& cand) {
  double bound = std::numeric_limits<double>::infinity();
  for (const std::size_t j : cand) {
    bound = std::min(bound, std::max(point_segment_distance(p, to[j - 1], to[j]),
                                     point_segment_distance(q, to[j - 1], to[j])));
  }
  return bound;
}

// Largest distance to `to` along segment [a,b], never below `floor`.
double segment_sup(Vec2 a, Vec2 b, std::span<const Vec2> to, double floor, double tol) {
  struct Interval {
    double t0, t1, f0, f1;
  };
  const double len = norm(b - a);
  const double fa = point_polyline_distance(a, to), fb = point_polyline_distance(b, to);
  if (to.size() == 1) return std::max(floor, std::max(fa, fb));
  // Segments farther than this from [a,b] are never the nearest one.
  const double reach = std::min(fa, fb) + 0.5 * len;
  std::vector<std::size_t> cand;
  for (std::size_t j = 1; j < to.size(); ++j)
    if (box_distance(a, b, to[j - 1], to[j]) <= reach) cand.push_back(j);
  double best = std::max(floor, std::max(fa, fb));
  std::vector<Interval> stack;
  stack.push_back({0.0, 1.0, fa, fb});
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double lipschitz = 0.5 * (iv.f0 + iv.f1 + len * (iv.t1 - iv.t0));
    if (lipschitz <= best + tol) continue;
    const Vec2 p = a + iv.t0 * (b - a), q = a + iv.t1 * (b - a);
    if (convex_bound(p, q, to, cand) <= best + tol) continue;
    const double tm = 0.5 * (iv.t0 + iv.t1);
    const double fm = candidate_distance(a + tm * (b - a), to, cand);
    best = std::max(best, fm);
    stack.push_back({iv.t0, tm, iv.f0, fm});
    stack.push_back({tm, iv.t1, fm, iv.f1});
  }
  return best;
}

double vertex_pass_omp(std::span<const Vec2> from, std::span<const Vec2> to) {
  double best = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(from.size());
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    best = std::max(best, point_polyline_distance(from[static_cast<std::size_t>(i)], to));
  }
  return best;
}

}  // namespace

double one_sided_hausdorff_serial(std::span<const Vec2> from, std::span<const Vec2> to, double tol) {
  const double floor = vertex_pass(from, to);
  double best = floor;
  for (std::size_t i = 1; i < from.size(); ++i) {
    best = std::max(best, segment_sup(from[i - 1], from[i], to, floor, tol));
  }
  return best;
}

double one_sided_hausdorff_omp(std::span<const Vec2> from, std::span<const Vec2> to, double tol) {
  const double floor = vertex_pass_omp(from, to);
  double best = floor;
  const auto n = static_cast<std::ptrdiff_t>(from.size());
#pragma omp parallel for reduction(max : best) schedule(dynamic, 8)
  for (std::ptrdiff_t i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    best = std::max(best, segment_sup(from[k - 1], from[k], to, floor, tol));
  }
  return best;
}

namespace {

struct Raster {
  double x0, y0, dx, dy;
  int res;
};

Raster make_raster(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut, int res) {
  double xmin = center.x - radius, xmax = center.x + radius;
  double ymin = std::max(center.y - radius, y_cut), ymax = center.y + radius;
  for (const Vec2 p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return {xmin, ymin, (xmax - xmin) / res, (ymax - ymin) / res, res};
}

// Number of pixel centers x0 + (i + 1/2) dx, 0 <= i < res, inside [a, b).
long count_centers(const Raster& r, double a, double b) {
  if (b <= a) return 0;
  const double ia = std::ceil((a - r.x0) / r.dx - 0.5);
  const double ib = std::ceil((b - r.x0) / r.dx - 0.5);
  const double lo = std::clamp(ia, 0.0, static_cast<double>(r.res));
  const double hi = std::clamp(ib, 0.0, static_cast<double>(r.res));
  return hi > lo ? static_cast<long>(hi - lo) : 0;
}

long row_count(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut, const Raster& r,
               int row, std::vector<double>& xs) {
  const double y = r.y0 + (row + 0.5) * r.dy;
  xs.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  double ca = 0.0, cb = 0.0;
  const double h = y - center.y;
  if (y > y_cut && std::abs(h) < radius) {
    const double w = std::sqrt(radius * radius - h * h);
    ca = center.x - w;
    cb = center.x + w;
  }
  long in_poly = 0, in_both = 0;
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    in_poly += count_centers(r, xs[k], xs[k + 1]);
    in_both += count_centers(r, std::max(xs[k], ca), std::min(xs[k + 1], cb));
  }
  const long in_cap = count_centers(r, ca, cb);
  return in_poly + in_cap - 2 * in_both;
}

}  // namespace

double raster_symdiff_cap_serial(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut,
                                 int res) {
  const Raster r = make_raster(poly, center, radius, y_cut, res);
  std::vector<double> xs;
  long total = 0;
  for (int row = 0; row < res; ++row) total += row_count(poly, center, radius, y_cut, r, row, xs);
  return static_cast<double>(total) * r.dx * r.dy;
}

double raster_symdiff_cap_omp(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut,
                              int res) {
  const Raster r = make_raster(poly, center, radius, y_cut, res);
  long total = 0;
#pragma omp parallel reduction(+ : total)
  {
    std::vector<double> xs;
#pragma omp for schedule(static)
    for (int row = 0; row < res; ++row) total += row_count(poly, center, radius, y_cut, r, row, xs);
  }
  return static_cast<double>(total) * r.dx * r.dy;
}

namespace {

bool edges_clash(std::span<const Vec2> poly, std::size_t i, std::size_t j) {
  const std::size_t n = poly.size();
  // Adjacent edges share a vertex; they clash only when folding back.
  if (j == i + 1 || (i == 0 && j == n - 1)) {
    const std::size_t shared = (j == i + 1) ? j : i;
    const Vec2 p = poly[shared];
    const Vec2 u = poly[(shared + n - 1) % n] - p;
    const Vec2 v = poly[(shared + 1) % n] - p;
    return cross(u, v) == 0.0 && dot(u, v) > 0.0;
  }
  return segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]);
}

bool has_degenerate_edge(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (poly[i] == poly[(i + 1) % n]) return true;
  return false;
}

}  // namespace

bool is_simple_serial(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3 || has_degenerate_edge(poly)) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edges_clash(poly, i, j)) return false;
  return true;
}

bool is_simple_omp(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3 || has_degenerate_edge(poly)) return false;
  int clashes = 0;
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(+ : clashes) schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (edges_clash(poly, i, j)) {
        ++clashes;
        break;
      }
    }
  }
  return clashes == 0;
}

}  // namespace kernels

double one_sided_hausdorff(std::span<const Vec2> from, std::span<const Vec2> to, double tol, Exec exec) {
  return exec == Exec::Serial ? kernels::one_sided_hausdorff_serial(from, to, tol)
                              : kernels::one_sided_hausdorff_omp(from, to, tol);
}

double raster_symdiff_cap(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut, int res,
                          Exec exec) {
  return exec == Exec::Serial ? kernels::raster_symdiff_cap_serial(poly, center, radius, y_cut, res)
                              : kernels::raster_symdiff_cap_omp(poly, center, radius, y_cut, res);
}

bool is_simple_polygon(std::span<const Vec2> poly, Exec exec) {
  return exec == Exec::Serial ? kernels::is_simple_serial(poly) : kernels::is_simple_omp(poly);
}

}  // namespace capdrop
