#include "capdrop/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace capdrop {

double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  // Relative to the first vertex: small polygons far from the origin keep
  // their digits.
  const Vec2 o = poly[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    twice += cross(poly[i] - o, poly[i + 1] - o);
  }
  return 0.5 * twice;
}

double perimeter(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  double len = 0.0;
  for (std::size_t i = 0; i < n; ++i) len += norm(poly[(i + 1) % n] - poly[i]);
  return len;
}

double polyline_length(std::span<const Vec2> line) {
  double len = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) len += norm(line[i] - line[i - 1]);
  return len;
}

double diameter(std::span<const Vec2> pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, norm2(pts[i] - pts[j]));
  return std::sqrt(best);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double point_polyline_distance(Vec2 p, std::span<const Vec2> line) {
  if (line.size() == 1) return norm(p - line[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < line.size(); ++i)
    best = std::min(best, point_segment_distance(p, line[i - 1], line[i]));
  return best;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Signed area of the triangle (0, a, b) intersected with the disk |x| < r.
double triangle_disk_area(Vec2 a, Vec2 b, double r) {
  const Vec2 d = b - a;
  const double qa = norm2(d);
  std::array<double, 4> ts{0.0, 0.0, 0.0, 1.0};
  std::size_t nt = 1;
  if (qa > 0.0) {
    const double qb = 2.0 * dot(a, d);
    const double qc = norm2(a) - r * r;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      const double t1 = (-qb - sq) / (2.0 * qa);
      const double t2 = (-qb + sq) / (2.0 * qa);
      if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
      if (t2 > 0.0 && t2 < 1.0) ts[nt++] = t2;
    }
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const Vec2 p = a + ts[k] * d;
    const Vec2 q = a + ts[k + 1] * d;
    const Vec2 mid = 0.5 * (p + q);
    if (norm2(mid) <= r * r) {
      area += 0.5 * cross(p, q);
    } else {
      area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
    }
  }
  return area;
}

}  // namespace

double polygon_disk_intersection_area(std::span<const Vec2> poly, Vec2 center, double radius) {
  const std::size_t n = poly.size();
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    area += triangle_disk_area(poly[i] - center, poly[(i + 1) % n] - center, radius);
  }
  return std::abs(area);
}

Polyline clip_above(std::span<const Vec2> poly, double y_cut) {
  Polyline out;
  const std::size_t n = poly.size();
  out.reserve(n + 4);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 cur = poly[i];
    const Vec2 nxt = poly[(i + 1) % n];
    const bool cin = cur.y >= y_cut;
    const bool nin = nxt.y >= y_cut;
    if (cin) out.push_back(cur);
    if (cin != nin) {
      const double t = (y_cut - cur.y) / (nxt.y - cur.y);
      out.push_back({cur.x + t * (nxt.x - cur.x), y_cut});
    }
  }
  return out;
}

}  // namespace capdrop
