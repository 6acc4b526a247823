#pragma once

// Planar primitives shared by every module: points, segments, polygons.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace capdrop {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
/// Rotation by -90 degrees. For a counterclockwise boundary with tangent t,
/// rot_cw(t) is the outward normal.
constexpr Vec2 rot_cw(Vec2 a) { return {a.y, -a.x}; }
constexpr Vec2 rot_ccw(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : a;
}

using Polyline = std::vector<Vec2>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signed shoelace area; positive for counterclockwise order.
double signed_area(std::span<const Vec2> poly);
double perimeter(std::span<const Vec2> poly);
double polyline_length(std::span<const Vec2> line);
double diameter(std::span<const Vec2> pts);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double point_polyline_distance(Vec2 p, std::span<const Vec2> line);

/// Proper or improper intersection of closed segments [a,b] and [c,d].
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Even-odd point-in-polygon test (boundary points may go either way).
bool point_in_polygon(Vec2 p, std::span<const Vec2> poly);

/// Area of poly intersected with the disk of given center and radius.
/// Poly may be any simple polygon; orientation only affects the sign, the
/// returned value is the absolute area.
double polygon_disk_intersection_area(std::span<const Vec2> poly, Vec2 center, double radius);

/// Clip a polygon to the half-plane {y >= y_cut} (Sutherland-Hodgman).
Polyline clip_above(std::span<const Vec2> poly, double y_cut);

}  // namespace capdrop
