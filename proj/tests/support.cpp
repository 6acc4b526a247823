#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <unistd.h>

namespace testsupport {

ContainerPtr disk(double sigma, BulkPotential g, double radius) {
  return std::make_shared<const Container>(disk_curve({0.0, 0.0}, radius), 4096, constant_sigma(sigma), std::move(g));
}

ContainerPtr disk_cosine(double base, double amplitude, BulkPotential g) {
  return std::make_shared<const Container>(disk_curve({0.0, 0.0}, 1.0), 4096, cosine_sigma(base, amplitude, 0.0),
                                           std::move(g));
}

ContainerPtr ellipse(double sigma, double a, double b) {
  return std::make_shared<const Container>(ellipse_curve({0.0, 0.0}, a, b), 4096, constant_sigma(sigma),
                                           BulkPotential::zero());
}

ContainerPtr flat_wall(double sigma, BulkPotential g) {
  return std::make_shared<const Container>(stadium_curve(8.0, 2.0), 8192, constant_sigma(sigma), std::move(g));
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

namespace {

double ball_volume(int k) { return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0); }

}  // namespace

double oracle_cap_volume(int n, double tau) {
  // rho = sin(theta), d rho = cos(theta) d theta.
  const double w = ball_volume(n - 1);
  auto f = [&](double th) { return w * std::pow(std::cos(th), n); };
  return simpson(f, std::asin(-tau), 0.5 * kPi, 20000);
}

double oracle_lateral_area(int n, double tau) {
  const double w = ball_volume(n - 1);
  auto f = [&](double th) { return (n - 1) * w * std::pow(std::cos(th), n - 2); };
  return simpson(f, std::asin(-tau), 0.5 * kPi, 20000);
}

double oracle_support(double tau, Vec2 nu, int samples) {
  double best = -std::numeric_limits<double>::infinity();
  const double half = std::sqrt(1.0 - tau * tau);
  // Arc of the unit circle above y = -tau.
  const double t0 = -std::asin(tau);  // angle of the right rim, measured from +x
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (kPi - 2.0 * t0) * i / samples;
    best = std::max(best, std::cos(t) * nu.x + std::sin(t) * nu.y);
  }
  // Chord y = -tau.
  for (int i = 0; i <= samples; ++i) {
    const double x = -half + 2.0 * half * i / samples;
    best = std::max(best, x * nu.x - tau * nu.y);
  }
  return best;
}

Lens oracle_lens(double R, double sigma, double m) {
  struct Shape {
    double a0, a1, d;
  };
  auto angles = [&](double r, double d) {
    const double c0 = std::clamp((d * d + R * R - r * r) / (2.0 * d * R), -1.0, 1.0);
    const double c1 = std::clamp((d * d + r * r - R * R) / (2.0 * d * r), -1.0, 1.0);
    return Shape{std::acos(c0), std::acos(c1), d};
  };
  auto lens_area = [&](double r, const Shape& s) { return R * R * s.a0 + r * r * s.a1 - s.d * R * std::sin(s.a0); };
  auto solve = [&](double r) {
    double lo = std::abs(R - r), hi = R + r;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (lens_area(r, angles(r, mid)) > m) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return angles(r, 0.5 * (lo + hi));
  };
  auto energy = [&](double log_r) {
    const double r = std::exp(log_r);
    const Shape s = solve(r);
    return 2.0 * r * s.a1 + sigma * 2.0 * R * s.a0;
  };
  double lo = std::log(std::sqrt(m / kPi) * 1.0001), hi = std::log(50.0 * std::sqrt(m));
  // Bracket on a grid, then golden section.
  const int grid = 400;
  int best = 0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double e = energy(lo + (hi - lo) * k / grid);
    if (e < best_e) {
      best_e = e;
      best = k;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / grid, b = lo + (hi - lo) * std::min(grid, best + 1) / grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = energy(c), fd = energy(d);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = energy(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = energy(d);
    }
  }
  const double r = std::exp(0.5 * (a + b));
  const Shape s = solve(r);
  Lens out;
  out.free_radius = r;
  out.wall_half_angle = s.a0;
  out.free_length = 2.0 * r * s.a1;
  out.wetted_length = 2.0 * R * s.a0;
  out.energy = out.free_length + sigma * out.wetted_length;
  return out;
}

PolyDroplet random_half_plane_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 0.2 + 0.8 * u(rng);
  const Vec2 center{2.0 * u(rng) - 1.0, h};
  const int k = 8 + static_cast<int>(32 * u(rng));
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) angles.push_back(2.0 * kPi * u(rng));
  std::sort(angles.begin(), angles.end());
  Polyline star;
  for (double t : angles) {
    const double r = h * (0.6 + 1.4 * u(rng));
    star.push_back(center + Vec2{r * std::cos(t), r * std::sin(t)});
  }
  const Polyline clipped = clip_above(star, 0.0);
  PolyDroplet p;
  for (Vec2 v : clipped) {
    const bool on_axis = std::abs(v.y) <= 1e-12;
    if (on_axis) v.y = 0.0;
    if (!p.vertices.empty() && norm(v - p.vertices.back()) < 1e-12) continue;
    p.vertices.push_back(v);
    p.contact.push_back(on_axis);
    p.boundary_params.push_back(on_axis ? v.x : 0.0);
  }
  return p;
}

Polyline circle_polygon(Vec2 center, double radius, int n) {
  Polyline out;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * i / n;
    out.push_back(center + Vec2{radius * std::cos(t), radius * std::sin(t)});
  }
  return out;
}

PolyDroplet interior_square(Vec2 c, double side) {
  const double h = 0.5 * side;
  return free_droplet({{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}});
}

ContainerPtr disk_half() {
  static const ContainerPtr c = disk(0.5);
  return c;
}

const MinimizeResult& disk_half_run() {
  static const MinimizeResult r = [] {
    MinimizeConfig cfg;
    cfg.volume = 1e-3;
    cfg.vertex_count = 512;
    return minimize(disk_half(), cfg);
  }();
  return r;
}

namespace {

const std::vector<double> kMasses{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

}  // namespace

const std::vector<SweepRecord>& disk_half_sweep() {
  static const std::vector<SweepRecord> r = [] {
    MinimizeConfig cfg;
    cfg.vertex_count = 128;
    return sweep(disk_half(), kMasses, cfg);
  }();
  return r;
}

const std::vector<SweepRecord>& disk_cosine_sweep() {
  static const std::vector<SweepRecord> r = [] {
    MinimizeConfig cfg;
    cfg.vertex_count = 128;
    return sweep(disk_cosine(0.3, 0.2), kMasses, cfg);
  }();
  return r;
}

std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("capdrop_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace testsupport
