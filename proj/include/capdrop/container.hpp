#pragma once

// Planar containers with C^{1,1} boundary, boundary-straightening charts and
// polygonal droplets that may wet a single arc of the container wall.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "capdrop/geometry.hpp"
#include "capdrop/kernels.hpp"

namespace capdrop {

/// Bulk potential density g: zero, affine, or bilinear on a regular grid.
class BulkPotential {
 public:
  enum class Kind { Zero, Linear, Grid };

  static BulkPotential zero() { return {}; }
  /// g(x) = c0 + cx * x + cy * y
  static BulkPotential linear(double c0, double cx, double cy);
  /// values[j][i] sits at origin + (i * dx, j * dy); clamped outside the grid.
  static BulkPotential grid(Vec2 origin, double dx, double dy, std::vector<std::vector<double>> values);

  double operator()(Vec2 p) const;
  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

 private:
  Kind kind_ = Kind::Zero;
  double c0_ = 0.0, cx_ = 0.0, cy_ = 0.0;
  Vec2 origin_{};
  double dx_ = 1.0, dy_ = 1.0;
  std::vector<std::vector<double>> values_;
};

/// A closed curve through a periodic parameter interval [0, period).
struct ParametricCurve {
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> derivative;
  double period = 1.0;
};

ParametricCurve disk_curve(Vec2 center, double radius);
ParametricCurve ellipse_curve(Vec2 center, double semi_x, double semi_y);
/// Rectangle [-half_length, half_length] x [0, 2 radius] with semicircular caps
/// on the short sides; the bottom side lies on {y = 0}.
ParametricCurve stadium_curve(double half_length, double radius);
/// Periodic cubic spline through counterclockwise samples (chord-length knots).
ParametricCurve spline_curve(std::span<const Vec2> samples);

/// Adhesion coefficient as a function of arc length s in [0, L).
using SigmaField = std::function<double(double s, double length)>;

SigmaField constant_sigma(double value);
/// base + amplitude * (1 - cos(2 pi s / L - phase))
SigmaField cosine_sigma(double base, double amplitude, double phase);

struct BoundaryPoint {
  double s = 0.0;                // arc length (unwrapped when returned by a projection)
  Vec2 point{};
  double signed_distance = 0.0;  // positive outside the container
};

/// Immutable container: arc-length stations with tangents, outward normals,
/// finite-difference curvature and per-station adhesion values. Positions
/// between stations use cubic Hermite interpolation, sigma is piecewise linear.
class Container {
 public:
  Container(const ParametricCurve& curve, int stations, const SigmaField& sigma, BulkPotential g);
  /// Station values given directly (table form).
  Container(const ParametricCurve& curve, int stations, std::vector<double> sigma_table, BulkPotential g);

  int station_count() const { return static_cast<int>(points_.size()); }
  double length() const { return length_; }
  double spacing() const { return spacing_; }
  double wrap(double s) const;

  Vec2 station_point(int i) const { return points_[static_cast<std::size_t>(i)]; }
  Vec2 station_tangent(int i) const { return tangents_[static_cast<std::size_t>(i)]; }
  Vec2 station_normal(int i) const { return rot_cw(tangents_[static_cast<std::size_t>(i)]); }
  double station_curvature(int i) const { return curvature_[static_cast<std::size_t>(i)]; }
  double station_sigma(int i) const { return sigma_[static_cast<std::size_t>(i)]; }
  double station_s(int i) const { return spacing_ * i; }

  Vec2 point(double s) const;
  /// d/ds of point(s); unit length at stations, 1 + O(h^2) between them.
  Vec2 derivative(double s) const;
  Vec2 tangent(double s) const { return normalized(derivative(s)); }
  Vec2 outward_normal(double s) const { return rot_cw(tangent(s)); }

  double sigma(double s) const;
  /// Exact integral of the piecewise-linear sigma over [s0, s1], s1 >= s0.
  double sigma_integral(double s0, double s1) const;
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }
  double sigma_lipschitz() const { return sigma_lipschitz_; }
  double curvature_bound() const { return curvature_bound_; }

  const BulkPotential& potential() const { return g_; }
  double g(Vec2 x) const { return g_(x); }

  double diam() const { return diam_; }
  double area() const { return area_; }
  double snap_tolerance() const { return 1e-9 * diam_; }
  /// Normal-coordinate reach: min(0.5 / curvature_bound, half the narrowest
  /// gap between boundary points that are far apart in arc length).
  double reach() const { return reach_; }

  /// Nearest boundary point (global search).
  BoundaryPoint project(Vec2 x) const;
  /// Nearest boundary point by Newton iteration started at arc length `hint`;
  /// the returned s is unwrapped relative to the hint.
  BoundaryPoint project_near(Vec2 x, double hint) const;
  bool contains(Vec2 x, double tol = 0.0) const { return project(x).signed_distance <= tol; }

  /// Indices of the k lowest-sigma stations, pairwise at least `min_gap` apart
  /// in arc length; ties go to the smaller index.
  std::vector<int> lowest_sigma_stations(int k, double min_gap) const;

 private:
  void build_geometry(const ParametricCurve& curve, int stations);
  void finish();
  double newton_project(Vec2 x, double s) const;

  std::vector<Vec2> points_;
  std::vector<Vec2> tangents_;
  std::vector<double> curvature_;
  std::vector<double> sigma_;
  std::vector<double> sigma_cum_;
  double length_ = 0.0;
  double spacing_ = 0.0;
  double sigma_min_ = 0.0, sigma_max_ = 0.0, sigma_lipschitz_ = 0.0;
  double curvature_bound_ = 0.0;
  double diam_ = 0.0, area_ = 0.0, reach_ = 0.0;
  BulkPotential g_;
};

using ContainerPtr = std::shared_ptr<const Container>;

/// Straightening chart at a boundary point: (u, v) -> point(s0 + u) - v * outward_normal(s0 + u).
/// The wall maps to {v = 0}, the container side to {v > 0}.
class BoundaryChart {
 public:
  BoundaryChart(ContainerPtr container, double s0);

  double base_s() const { return s0_; }
  Vec2 base_point() const { return origin_; }
  double reach() const { return reach_; }
  const Container& container() const { return *container_; }

  Vec2 forward(Vec2 uv) const;
  Vec2 inverse(Vec2 x) const;
  bool within_reach(Vec2 x) const;

 private:
  ContainerPtr container_;
  double s0_;
  Vec2 origin_;
  double reach_;
};

/// Errors: reach below 10x snap tolerance.
BoundaryChart chart_at(ContainerPtr container, double s);

/// Counterclockwise droplet polygon. Contact vertices lie on the wall and
/// carry their arc-length coordinate (unwrapped, increasing along the run).
struct PolyDroplet {
  Polyline vertices;
  std::vector<bool> contact;
  std::vector<double> boundary_params;

  std::size_t size() const { return vertices.size(); }
  std::size_t contact_count() const;
  /// Index of the first contact vertex of the (single) run, or nullopt.
  std::optional<std::size_t> run_start() const;
};

/// Polygon without contact vertices.
PolyDroplet free_droplet(Polyline vertices);

double polygon_area(const PolyDroplet& p);

/// Throws GeometryError on non-simple polygons, clockwise order, wetting split
/// into several runs, fully wetted polygons, contact vertices off the wall or
/// free vertices outside the container.
void validate_droplet(const PolyDroplet& p, const Container& c);

struct PerimeterSplit {
  double free_length = 0.0;
  double wetted_length = 0.0;
};

PerimeterSplit split_perimeter(const PolyDroplet& p, const Container& c);

/// Free boundary (closure of A intersected with the droplet boundary) as an
/// open polyline running from the end of the wetted run back to its start.
/// The whole closed boundary when there is no contact.
Polyline free_boundary(const PolyDroplet& p);

/// Symmetric Hausdorff distance between polylines (open; close a polygon by
/// repeating its first vertex).
double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b, Exec exec = Exec::Parallel);

/// Map into the half-plane: chart^{-1}(x) / scale. Contact vertices land on
/// {y = 0} exactly with x = (s - s0) / scale.
PolyDroplet blow_up(const PolyDroplet& p, const BoundaryChart& chart, double scale);
/// Inverse of blow_up.
PolyDroplet blow_down(const PolyDroplet& h, const BoundaryChart& chart, double scale);

}  // namespace capdrop
