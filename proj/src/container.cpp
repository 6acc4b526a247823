#include "capdrop/container.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace capdrop {

namespace {

constexpr double kPi = std::numbers::pi;

// 7-point Gauss-Legendre on [a, b].
double gauss_length(const ParametricCurve& c, double a, double b) {
  static constexpr double x[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
                                  0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
  static constexpr double w[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                  0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                  0.1294849661688697};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = 0; k < 7; ++k) sum += w[k] * norm(c.derivative(mid + half * x[k]));
  return sum * half;
}

double periodic_mod(double v, double period) { return v - period * std::floor(v / period); }

}  // namespace

// ---------------------------------------------------------------------------
// BulkPotential

BulkPotential BulkPotential::linear(double c0, double cx, double cy) {
  BulkPotential g;
  g.kind_ = Kind::Linear;
  g.c0_ = c0;
  g.cx_ = cx;
  g.cy_ = cy;
  return g;
}

BulkPotential BulkPotential::grid(Vec2 origin, double dx, double dy, std::vector<std::vector<double>> values) {
  if (!(dx > 0.0 && dy > 0.0)) throw std::invalid_argument("g.grid: spacing must be positive");
  if (values.size() < 2 || values.front().size() < 2) {
    throw std::invalid_argument("g.grid: need at least a 2 x 2 table");
  }
  for (const auto& row : values) {
    if (row.size() != values.front().size()) throw std::invalid_argument("g.grid: ragged table");
  }
  BulkPotential g;
  g.kind_ = Kind::Grid;
  g.origin_ = origin;
  g.dx_ = dx;
  g.dy_ = dy;
  g.values_ = std::move(values);
  return g;
}

double BulkPotential::operator()(Vec2 p) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Linear:
      return c0_ + cx_ * p.x + cy_ * p.y;
    case Kind::Grid: {
      const auto ny = static_cast<double>(values_.size() - 1);
      const auto nx = static_cast<double>(values_.front().size() - 1);
      const double fx = std::clamp((p.x - origin_.x) / dx_, 0.0, nx);
      const double fy = std::clamp((p.y - origin_.y) / dy_, 0.0, ny);
      const auto i = static_cast<std::size_t>(std::min(std::floor(fx), nx - 1.0));
      const auto j = static_cast<std::size_t>(std::min(std::floor(fy), ny - 1.0));
      const double a = fx - static_cast<double>(i), b = fy - static_cast<double>(j);
      return (1 - a) * (1 - b) * values_[j][i] + a * (1 - b) * values_[j][i + 1] +
             (1 - a) * b * values_[j + 1][i] + a * b * values_[j + 1][i + 1];
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Curves

ParametricCurve disk_curve(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("container.radius must be positive");
  return {[=](double t) { return center + radius * Vec2{std::cos(t), std::sin(t)}; },
          [=](double t) { return radius * Vec2{-std::sin(t), std::cos(t)}; }, 2.0 * kPi};
}

ParametricCurve ellipse_curve(Vec2 center, double semi_x, double semi_y) {
  if (!(semi_x > 0.0 && semi_y > 0.0)) throw std::invalid_argument("container semi-axes must be positive");
  return {[=](double t) { return center + Vec2{semi_x * std::cos(t), semi_y * std::sin(t)}; },
          [=](double t) { return Vec2{-semi_x * std::sin(t), semi_y * std::cos(t)}; }, 2.0 * kPi};
}

ParametricCurve stadium_curve(double half_length, double radius) {
  if (!(half_length > 0.0 && radius > 0.0)) throw std::invalid_argument("stadium dimensions must be positive");
  const double a = half_length, r = radius;
  const double cap = kPi * r;
  const double period = 4.0 * a + 2.0 * cap;
  // Arc-length parametrization starting at the bottom midpoint (0, 0).
  auto eval = [=](double t, bool want_derivative) -> Vec2 {
    double s = periodic_mod(t + a, period);  // s = 0 at (-a, 0)
    if (s < 2 * a) return want_derivative ? Vec2{1, 0} : Vec2{-a + s, 0};
    s -= 2 * a;
    if (s < cap) {
      const double th = -0.5 * kPi + s / r;
      return want_derivative ? Vec2{-std::sin(th), std::cos(th)} : Vec2{a + r * std::cos(th), r + r * std::sin(th)};
    }
    s -= cap;
    if (s < 2 * a) return want_derivative ? Vec2{-1, 0} : Vec2{a - s, 2 * r};
    s -= 2 * a;
    const double th = 0.5 * kPi + s / r;
    return want_derivative ? Vec2{-std::sin(th), std::cos(th)} : Vec2{-a + r * std::cos(th), r + r * std::sin(th)};
  };
  return {[=](double t) { return eval(t, false); }, [=](double t) { return eval(t, true); }, period};
}

ParametricCurve spline_curve(std::span<const Vec2> samples) {
  const std::size_t n = samples.size();
  if (n < 8) throw std::invalid_argument("container.points: need at least 8 samples");
  std::vector<Vec2> pts(samples.begin(), samples.end());
  if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
  std::vector<double> h(n), knots(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = norm(pts[(i + 1) % n] - pts[i]);
    if (!(h[i] > 0.0)) throw std::invalid_argument("container.points: repeated sample");
    knots[i + 1] = knots[i] + h[i];
  }
  // Periodic cubic spline: solve for second derivatives at the knots.
  using Sp = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rx(static_cast<Eigen::Index>(n)), ry(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    const auto I = static_cast<int>(i);
    trip.emplace_back(I, static_cast<int>(im), h[im]);
    trip.emplace_back(I, I, 2.0 * (h[im] + h[i]));
    trip.emplace_back(I, static_cast<int>(ip), h[i]);
    const Vec2 rhs = 6.0 * ((pts[ip] - pts[i]) / h[i] - (pts[i] - pts[im]) / h[im]);
    rx[I] = rhs.x;
    ry[I] = rhs.y;
  }
  Sp mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Sp> lu;
  lu.compute(mat);
  if (lu.info() != Eigen::Success) throw std::invalid_argument("container.points: spline system singular");
  const Eigen::VectorXd mx = lu.solve(rx), my = lu.solve(ry);
  auto second = std::make_shared<std::vector<Vec2>>(n);
  for (std::size_t i = 0; i < n; ++i) (*second)[i] = {mx[static_cast<Eigen::Index>(i)], my[static_cast<Eigen::Index>(i)]};
  auto pp = std::make_shared<std::vector<Vec2>>(std::move(pts));
  auto kk = std::make_shared<std::vector<double>>(std::move(knots));
  const double period = kk->back();
  auto locate = [kk, period](double t, double& local, double& hh) {
    const double tt = periodic_mod(t, period);
    auto it = std::upper_bound(kk->begin(), kk->end(), tt);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - kk->begin()) - 1));
    i = std::min(i, kk->size() - 2);
    local = tt - (*kk)[i];
    hh = (*kk)[i + 1] - (*kk)[i];
    return i;
  };
  auto pos = [pp, second, locate, n](double t) {
    double x, hh;
    const std::size_t i = locate(t, x, hh);
    const std::size_t j = (i + 1) % n;
    const Vec2 p0 = (*pp)[i], p1 = (*pp)[j], m0 = (*second)[i], m1 = (*second)[j];
    const double a = hh - x;
    return (m0 * (a * a * a) + m1 * (x * x * x)) / (6.0 * hh) + (p0 / hh - m0 * (hh / 6.0)) * a +
           (p1 / hh - m1 * (hh / 6.0)) * x;
  };
  auto der = [pp, second, locate, n](double t) {
    double x, hh;
    const std::size_t i = locate(t, x, hh);
    const std::size_t j = (i + 1) % n;
    const Vec2 p0 = (*pp)[i], p1 = (*pp)[j], m0 = (*second)[i], m1 = (*second)[j];
    const double a = hh - x;
    return (m1 * (x * x) - m0 * (a * a)) / (2.0 * hh) + (p1 - p0) / hh - (m1 - m0) * (hh / 6.0);
  };
  return {pos, der, period};
}

SigmaField constant_sigma(double value) {
  return [value](double, double) { return value; };
}

SigmaField cosine_sigma(double base, double amplitude, double phase) {
  return [=](double s, double length) { return base + amplitude * (1.0 - std::cos(2.0 * kPi * s / length - phase)); };
}

// ---------------------------------------------------------------------------
// Container

Container::Container(const ParametricCurve& curve, int stations, const SigmaField& sigma, BulkPotential g)
    : g_(std::move(g)) {
  build_geometry(curve, stations);
  sigma_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) sigma_[i] = sigma(spacing_ * static_cast<double>(i), length_);
  finish();
}

Container::Container(const ParametricCurve& curve, int stations, std::vector<double> sigma_table, BulkPotential g)
    : g_(std::move(g)) {
  build_geometry(curve, stations);
  if (sigma_table.size() != points_.size()) {
    // Resample a table of any length onto the stations (piecewise linear, periodic).
    if (sigma_table.size() < 2) throw std::invalid_argument("sigma.values: need at least 2 entries");
    std::vector<double> out(points_.size());
    const auto m = static_cast<double>(sigma_table.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double f = m * static_cast<double>(i) / static_cast<double>(points_.size());
      const auto k = static_cast<std::size_t>(std::floor(f));
      const double w = f - static_cast<double>(k);
      out[i] = (1 - w) * sigma_table[k % sigma_table.size()] + w * sigma_table[(k + 1) % sigma_table.size()];
    }
    sigma_table = std::move(out);
  }
  sigma_ = std::move(sigma_table);
  finish();
}

void Container::build_geometry(const ParametricCurve& curve, int stations) {
  if (stations < 256) throw std::invalid_argument("container.stations must be >= 256");
  const int sub = std::max(stations, 1024);
  const double dt = curve.period / sub;
  std::vector<double> cum(static_cast<std::size_t>(sub) + 1, 0.0);
  for (int k = 0; k < sub; ++k) cum[k + 1] = cum[k] + gauss_length(curve, k * dt, (k + 1) * dt);
  length_ = cum.back();
  spacing_ = length_ / stations;
  points_.resize(static_cast<std::size_t>(stations));
  tangents_.resize(points_.size());
  for (int i = 0; i < stations; ++i) {
    const double target = spacing_ * i;
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const auto k = static_cast<int>(std::clamp<std::ptrdiff_t>((it - cum.begin()) - 1, 0, sub - 1));
    const double t0 = k * dt;
    double t = t0 + dt * (target - cum[k]) / std::max(cum[k + 1] - cum[k], 1e-300);
    for (int iter = 0; iter < 8; ++iter) {
      const double f = cum[k] + gauss_length(curve, t0, t) - target;
      t -= f / norm(curve.derivative(t));
      if (std::abs(f) < 1e-15 * length_) break;
    }
    points_[i] = curve.position(t);
    tangents_[i] = normalized(curve.derivative(t));
  }
  if (signed_area(points_) <= 0.0) throw std::invalid_argument("container boundary must be counterclockwise");

  const std::size_t n = points_.size();
  curvature_.resize(n);
  auto turn = [&](std::size_t i, int off) {
    const Vec2 a = tangents_[i];
    const Vec2 b = tangents_[(i + n + static_cast<std::size_t>(n + off)) % n];
    return std::atan2(cross(a, b), dot(a, b));
  };
  for (std::size_t i = 0; i < n; ++i) {
    curvature_[i] = (-turn(i, 2) + 8.0 * turn(i, 1) - 8.0 * turn(i, -1) + turn(i, -2)) / (12.0 * spacing_);
  }
}

void Container::finish() {
  const std::size_t n = points_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma_[i] > -1.0 && sigma_[i] < 1.0)) {
      throw std::invalid_argument("sigma must lie in (-1, 1) at every station (station " + std::to_string(i) +
                                  " has " + std::to_string(sigma_[i]) + ")");
    }
  }
  sigma_min_ = *std::min_element(sigma_.begin(), sigma_.end());
  sigma_max_ = *std::max_element(sigma_.begin(), sigma_.end());
  sigma_cum_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    sigma_cum_[i + 1] = sigma_cum_[i] + 0.5 * (sigma_[i] + sigma_[(i + 1) % n]) * spacing_;
  sigma_lipschitz_ = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sigma_lipschitz_ = std::max(sigma_lipschitz_, std::abs(sigma_[(i + 1) % n] - sigma_[i]) / spacing_);
  curvature_bound_ = 0.0;
  for (const double k : curvature_) curvature_bound_ = std::max(curvature_bound_, std::abs(k));

  diam_ = diameter(points_);
  area_ = signed_area(points_);

  // Injectivity: boundary points far apart along the curve must stay apart in the plane.
  const double far = curvature_bound_ > 0.0 ? kPi / curvature_bound_ : 0.25 * length_;
  double gap = std::numeric_limits<double>::infinity();
  const std::size_t stride = n > 2048 ? 2 : 1;
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = i + 1; j < n; j += stride) {
      const double arc = std::min(j - i, n - (j - i)) * spacing_;
      if (arc < std::min(far, 0.5 * length_ - spacing_)) continue;
      gap = std::min(gap, norm(points_[i] - points_[j]));
    }
  }
  const double curvature_reach = curvature_bound_ > 0.0 ? 0.5 / curvature_bound_ : 0.25 * diam_;
  reach_ = std::min(curvature_reach, 0.5 * gap);
}

double Container::wrap(double s) const { return periodic_mod(s, length_); }

Vec2 Container::point(double s) const {
  const double w = wrap(s) / spacing_;
  const std::size_t n = points_.size();
  const auto i = std::min(static_cast<std::size_t>(w), n - 1);
  const double t = w - static_cast<double>(i);
  const std::size_t j = (i + 1) % n;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * points_[i] + ((t3 - 2 * t2 + t) * spacing_) * tangents_[i] +
         (-2 * t3 + 3 * t2) * points_[j] + ((t3 - t2) * spacing_) * tangents_[j];
}

Vec2 Container::derivative(double s) const {
  const double w = wrap(s) / spacing_;
  const std::size_t n = points_.size();
  const auto i = std::min(static_cast<std::size_t>(w), n - 1);
  const double t = w - static_cast<double>(i);
  const std::size_t j = (i + 1) % n;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) / spacing_) * points_[i] + (3 * t2 - 4 * t + 1) * tangents_[i] +
         ((-6 * t2 + 6 * t) / spacing_) * points_[j] + (3 * t2 - 2 * t) * tangents_[j];
}

double Container::sigma(double s) const {
  const double w = wrap(s) / spacing_;
  const std::size_t n = sigma_.size();
  const auto i = std::min(static_cast<std::size_t>(w), n - 1);
  const double t = w - static_cast<double>(i);
  return (1 - t) * sigma_[i] + t * sigma_[(i + 1) % n];
}

double Container::sigma_integral(double s0, double s1) const {
  if (s1 < s0) throw std::invalid_argument("sigma_integral: reversed interval");
  const std::size_t n = sigma_.size();
  const double periods = std::floor((s1 - s0) / length_);
  double total = periods * sigma_cum_[n];
  double rest = (s1 - s0) - periods * length_;
  // Walk the cells from wrap(s0); sums stay at the size of the result.
  const double a = wrap(s0);
  auto k = std::min(static_cast<std::size_t>(a / spacing_), n - 1);
  double d = a - static_cast<double>(k) * spacing_;
  auto partial = [&](std::size_t cell, double from, double len) {
    const double slope = (sigma_[(cell + 1) % n] - sigma_[cell]) / spacing_;
    return len * (sigma_[cell] + slope * (from + 0.5 * len));
  };
  if (rest <= 0.0) return total;
  const double first = std::min(rest, spacing_ - d);
  total += partial(k, d, first);
  rest -= first;
  k = (k + 1) % n;
  auto whole = static_cast<std::size_t>(rest / spacing_);
  if (whole > 64) {
    // Long arcs: prefix sums are accurate relative to the result.
    const std::size_t end = k + whole;
    total += end <= n ? sigma_cum_[end] - sigma_cum_[k] : sigma_cum_[n] - sigma_cum_[k] + sigma_cum_[end - n];
    rest -= static_cast<double>(whole) * spacing_;
    k = end % n;
    whole = 0;
  }
  for (; whole > 0; --whole) {
    total += 0.5 * spacing_ * (sigma_[k] + sigma_[(k + 1) % n]);
    rest -= spacing_;
    k = (k + 1) % n;
  }
  while (rest > 0.0) {
    const double step = std::min(rest, spacing_);
    total += partial(k, 0.0, step);
    rest -= step;
    k = (k + 1) % n;
  }
  return total;
}

double Container::newton_project(Vec2 x, double s) const {
  // Minimize |x - point(s)|^2 / 2 near s.
  const double h = spacing_;
  const double lo = s - h, hi = s + h;
  for (int iter = 0; iter < 40; ++iter) {
    const Vec2 p = point(s);
    const Vec2 d1 = derivative(s);
    const double eps = 1e-4 * h;
    const Vec2 d2 = (derivative(s + eps) - derivative(s - eps)) / (2.0 * eps);
    const double f = -dot(x - p, d1);
    const double fp = norm2(d1) - dot(x - p, d2);
    double step = fp > 0.0 ? -f / fp : -f;
    step = std::clamp(step, -h, h);
    s = std::clamp(s + step, lo - h, hi + h);
    if (std::abs(step) < 1e-15 * std::max(1.0, length_)) break;
  }
  return s;
}

BoundaryPoint Container::project(Vec2 x) const {
  const std::size_t n = points_.size();
  const std::size_t stride = 8;
  double coarse = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; i += stride) coarse = std::min(coarse, norm(points_[i] - x));
  const double window = coarse + static_cast<double>(stride) * spacing_;
  BoundaryPoint best;
  best.signed_distance = std::numeric_limits<double>::infinity();
  double best_abs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; i += stride) {
    if (norm(points_[i] - x) > window) continue;
    std::size_t near = i;
    double dnear = norm(points_[i] - x);
    for (std::size_t k = 1; k <= stride; ++k) {
      for (const std::size_t j : {(i + k) % n, (i + n - k) % n}) {
        const double d = norm(points_[j] - x);
        if (d < dnear) {
          dnear = d;
          near = j;
        }
      }
    }
    const double s = newton_project(x, spacing_ * static_cast<double>(near));
    const Vec2 p = point(s);
    const double dist = norm(x - p);
    if (dist < best_abs) {
      best_abs = dist;
      best.s = wrap(s);
      best.point = p;
      best.signed_distance = dot(x - p, outward_normal(s));
    }
  }
  return best;
}

BoundaryPoint Container::project_near(Vec2 x, double hint) const {
  double s = hint;
  for (int iter = 0; iter < 200; ++iter) {
    const double step = dot(x - point(s), tangent(s));
    s += step;
    if (std::abs(step) < 0.25 * spacing_) break;
  }
  // Refine on stations around the first guess.
  const double base = std::round(s / spacing_);
  double best_s = s;
  double best_d = norm(point(s) - x);
  for (int k = -8; k <= 8; ++k) {
    const double cand = (base + k) * spacing_;
    const double d = norm(point(cand) - x);
    if (d < best_d) {
      best_d = d;
      best_s = cand;
    }
  }
  s = newton_project(x, best_s);
  BoundaryPoint bp;
  bp.s = s;
  bp.point = point(s);
  bp.signed_distance = dot(x - bp.point, outward_normal(s));
  return bp;
}

std::vector<int> Container::lowest_sigma_stations(int k, double min_gap) const {
  std::vector<int> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sigma_[static_cast<std::size_t>(a)] < sigma_[static_cast<std::size_t>(b)]; });
  std::vector<int> picked;
  for (const int idx : order) {
    if (static_cast<int>(picked.size()) >= k) break;
    bool ok = true;
    for (const int p : picked) {
      const double d = std::abs(idx - p) * spacing_;
      if (std::min(d, length_ - d) < min_gap) {
        ok = false;
        break;
      }
    }
    if (ok) picked.push_back(idx);
  }
  return picked;
}

// ---------------------------------------------------------------------------
// Charts

BoundaryChart::BoundaryChart(ContainerPtr container, double s0)
    : container_(std::move(container)), s0_(s0), origin_(container_->point(s0)), reach_(container_->reach()) {}

Vec2 BoundaryChart::forward(Vec2 uv) const {
  const double s = s0_ + uv.x;
  return container_->point(s) - uv.y * container_->outward_normal(s);
}

Vec2 BoundaryChart::inverse(Vec2 x) const {
  const BoundaryPoint bp = container_->project_near(x, s0_);
  return {bp.s - s0_, -bp.signed_distance};
}

bool BoundaryChart::within_reach(Vec2 x) const { return norm(x - origin_) <= 2.0 * reach_; }

BoundaryChart chart_at(ContainerPtr container, double s) {
  if (!container) throw std::invalid_argument("chart_at: null container");
  if (container->reach() < 10.0 * container->snap_tolerance()) {
    throw GeometryError("chart_at: boundary reach below 10x snap tolerance");
  }
  return BoundaryChart(std::move(container), s);
}

// ---------------------------------------------------------------------------
// Droplets

std::size_t PolyDroplet::contact_count() const {
  return static_cast<std::size_t>(std::count(contact.begin(), contact.end(), true));
}

std::optional<std::size_t> PolyDroplet::run_start() const {
  const std::size_t n = contact.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (contact[i] && !contact[(i + n - 1) % n]) return i;
  }
  return std::nullopt;
}

PolyDroplet free_droplet(Polyline vertices) {
  PolyDroplet p;
  p.contact.assign(vertices.size(), false);
  p.boundary_params.assign(vertices.size(), 0.0);
  p.vertices = std::move(vertices);
  return p;
}

double polygon_area(const PolyDroplet& p) {
  if (!is_simple_polygon(p.vertices)) throw GeometryError("polygon_area: polygon is not simple");
  return std::abs(signed_area(p.vertices));
}

namespace {

void check_shape(const PolyDroplet& p) {
  if (p.contact.size() != p.vertices.size() || p.boundary_params.size() != p.vertices.size()) {
    throw GeometryError("droplet: flags/params size mismatch");
  }
}

void check_run(const PolyDroplet& p) {
  const std::size_t n = p.size();
  std::size_t starts = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (p.contact[i] && !p.contact[(i + n - 1) % n]) ++starts;
  if (p.contact_count() == n) throw GeometryError("droplet: fully wetted polygon");
  if (starts > 1) throw GeometryError("droplet: wetting split into several arcs");
}

void check_contacts_on_wall(const PolyDroplet& p, const Container& c) {
  const double tol = c.snap_tolerance();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.contact[i]) continue;
    const double off = norm(c.point(p.boundary_params[i]) - p.vertices[i]);
    if (off > tol) {
      throw GeometryError("droplet: contact vertex " + std::to_string(i) + " is " + std::to_string(off) +
                          " off the wall");
    }
  }
}

}  // namespace

void validate_droplet(const PolyDroplet& p, const Container& c) {
  check_shape(p);
  if (!is_simple_polygon(p.vertices)) throw GeometryError("droplet: polygon is not simple");
  if (signed_area(p.vertices) <= 0.0) throw GeometryError("droplet: vertices must be counterclockwise");
  check_run(p);
  check_contacts_on_wall(p, c);
  if (auto start = p.run_start()) {
    const std::size_t n = p.size();
    for (std::size_t k = *start; p.contact[(k + 1) % n]; k = (k + 1) % n) {
      if (!(p.boundary_params[(k + 1) % n] > p.boundary_params[k])) {
        throw GeometryError("droplet: contact parameters must increase along the wetted run");
      }
    }
  }
  const double tol = c.snap_tolerance();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.contact[i]) continue;
    if (c.project(p.vertices[i]).signed_distance > tol) {
      throw GeometryError("droplet: vertex " + std::to_string(i) + " lies outside the container");
    }
  }
}

PerimeterSplit split_perimeter(const PolyDroplet& p, const Container& c) {
  check_shape(p);
  check_run(p);
  check_contacts_on_wall(p, c);
  PerimeterSplit out;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (p.contact[i] && p.contact[j]) {
      const double arc = p.boundary_params[j] - p.boundary_params[i];
      if (!(arc > 0.0)) throw GeometryError("split_perimeter: wetted edge with non-increasing arc length");
      out.wetted_length += arc;
    } else {
      out.free_length += norm(p.vertices[j] - p.vertices[i]);
    }
  }
  return out;
}

Polyline free_boundary(const PolyDroplet& p) {
  const std::size_t n = p.size();
  Polyline line;
  const auto start = p.run_start();
  if (!start) {
    line = p.vertices;
    if (!line.empty()) line.push_back(line.front());
    return line;
  }
  std::size_t end = *start;
  while (p.contact[(end + 1) % n]) end = (end + 1) % n;
  for (std::size_t k = end;; k = (k + 1) % n) {
    line.push_back(p.vertices[k]);
    if (k != end && p.contact[k]) break;
  }
  return line;
}

double hausdorff_distance(std::span<const Vec2> a, std::span<const Vec2> b, Exec exec) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty polyline");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& line : {a, b}) {
    for (const Vec2 p : line) {
      lo = std::min({lo, p.x, p.y});
      hi = std::max({hi, p.x, p.y});
    }
  }
  const double tol = 1e-14 * std::max(hi - lo, 1e-300);
  return std::max(one_sided_hausdorff(a, b, tol, exec), one_sided_hausdorff(b, a, tol, exec));
}

PolyDroplet blow_up(const PolyDroplet& p, const BoundaryChart& chart, double scale) {
  check_shape(p);
  if (!(scale > 0.0)) throw std::invalid_argument("blow_up: scale must be positive");
  PolyDroplet out;
  out.contact = p.contact;
  out.vertices.resize(p.size());
  out.boundary_params.assign(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!chart.within_reach(p.vertices[i])) throw GeometryError("blow_up: droplet exceeds chart reach");
    if (p.contact[i]) {
      const double u = (p.boundary_params[i] - chart.base_s()) / scale;
      out.vertices[i] = {u, 0.0};
      out.boundary_params[i] = u;
    } else {
      out.vertices[i] = chart.inverse(p.vertices[i]) / scale;
    }
  }
  return out;
}

PolyDroplet blow_down(const PolyDroplet& h, const BoundaryChart& chart, double scale) {
  check_shape(h);
  if (!(scale > 0.0)) throw std::invalid_argument("blow_down: scale must be positive");
  PolyDroplet out;
  out.contact = h.contact;
  out.vertices.resize(h.size());
  out.boundary_params.assign(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.contact[i]) {
      const double s = chart.base_s() + scale * h.vertices[i].x;
      out.vertices[i] = chart.container().point(s);
      out.boundary_params[i] = s;
    } else {
      out.vertices[i] = chart.forward(scale * h.vertices[i]);
    }
  }
  return out;
}

}  // namespace capdrop
