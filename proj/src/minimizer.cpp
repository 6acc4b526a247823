#include "capdrop/minimizer.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "capdrop/sessile_reference.hpp"

namespace capdrop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Mass weight of the metric, in units of 1/m. Small, so that rigid sliding
// along the wall takes long steps.
constexpr double kSlideMass = 1e-3;
// Free edges longer than this ratio of the shortest trigger a remesh.
constexpr double kRemeshRatio = 1.001;
// Near convergence the discrete optimum need not have equal edges.
constexpr double kLooseRemeshRatio = 1.5;
// Seeds whose energies differ by less than this count as tied.
constexpr double kEnergyTie = 1e-9;

// Droplet state in container coordinates. A wetted shape has nw contact
// vertices equally spaced in arc length on [sa, sb] followed by the free
// vertices, running from the sb end back to the sa end. A free shape is a
// closed polygon of free vertices.
struct Shape {
  bool wetted = false;
  double sa = 0.0, sb = 0.0;
  int nw = 0;
  Polyline free;

  int k() const { return static_cast<int>(free.size()); }
  int size() const { return nw + k(); }
  double contact_s(int j) const { return nw > 1 ? sa + (sb - sa) * j / (nw - 1) : sa; }
};

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

Polyline assemble(const Shape& sh, const Container& c) {
  Polyline v;
  v.reserve(static_cast<std::size_t>(sh.size()));
  for (int j = 0; j < sh.nw; ++j) v.push_back(c.point(sh.contact_s(j)));
  v.insert(v.end(), sh.free.begin(), sh.free.end());
  return v;
}

PolyDroplet to_droplet(const Shape& sh, const Container& c) {
  PolyDroplet p;
  p.vertices = assemble(sh, c);
  p.contact.assign(p.vertices.size(), false);
  p.boundary_params.assign(p.vertices.size(), 0.0);
  const double shift = sh.wetted ? std::floor(sh.sa / c.length()) * c.length() : 0.0;
  for (int j = 0; j < sh.nw; ++j) {
    p.contact[static_cast<std::size_t>(j)] = true;
    p.boundary_params[static_cast<std::size_t>(j)] = sh.contact_s(j) - shift;
  }
  return p;
}

Shape from_droplet(const PolyDroplet& p) {
  Shape sh;
  const std::size_t n = p.size();
  const auto start = p.run_start();
  if (!start) {
    sh.free = p.vertices;
    return sh;
  }
  sh.wetted = true;
  std::size_t i = *start;
  sh.sa = p.boundary_params[i];
  int nw = 1;
  while (p.contact[(i + 1) % n]) {
    i = (i + 1) % n;
    ++nw;
  }
  sh.sb = p.boundary_params[i];
  sh.nw = nw;
  for (std::size_t k = (i + 1) % n; k != *start; k = (k + 1) % n) sh.free.push_back(p.vertices[k]);
  if (nw < 2 || sh.free.empty()) throw GeometryError("droplet: wetted run needs two contact and one free vertex");
  return sh;
}

std::vector<Vec2> free_normals(const Shape& sh, const Polyline& v) {
  const std::size_t n = v.size();
  std::vector<Vec2> out(static_cast<std::size_t>(sh.k()));
  for (int m = 0; m < sh.k(); ++m) {
    const std::size_t i = static_cast<std::size_t>(sh.nw + m);
    out[static_cast<std::size_t>(m)] = normalized(rot_cw(v[(i + 1) % n] - v[(i + n - 1) % n]));
  }
  return out;
}

// Search space around a base shape: free vertices move along fixed normals,
// contact ends along the wall, plus a rigid slide (one variable along the wall
// for a wetted shape, two translations for a free one). Tangential spacing is
// left to remeshing.
struct Column {
  int var;
  Vec2 jac;
};

struct Frame {
  Shape base;
  Polyline vertices;
  std::vector<Vec2> normals;
  Vec2 slide{};  // wall tangent at the wetted midpoint
  int nvars = 0;

  int ib() const { return 0; }
  int ia() const { return base.k() + 1; }
  int is() const { return base.k() + 2; }
  int delta(int m) const { return (base.wetted ? 1 : 0) + m; }
};

Frame make_frame(const Shape& sh, const Container& c) {
  Frame f;
  f.base = sh;
  f.vertices = assemble(sh, c);
  f.normals = free_normals(sh, f.vertices);
  f.nvars = sh.k() + (sh.wetted ? 3 : 2);
  if (sh.wetted) f.slide = c.tangent(0.5 * (sh.sa + sh.sb));
  return f;
}

// Jacobian columns of polygon vertex i.
void vertex_columns(const Frame& f, int i, const Container& c, std::vector<Column>& out) {
  out.clear();
  const Shape& sh = f.base;
  if (sh.wetted && i < sh.nw) {
    const Vec2 d = c.derivative(sh.contact_s(i));
    const double wb = static_cast<double>(i) / (sh.nw - 1), wa = 1.0 - wb;
    if (wb != 0.0) out.push_back({f.ib(), wb * d});
    if (wa != 0.0) out.push_back({f.ia(), wa * d});
    out.push_back({f.is(), d});
    return;
  }
  const int m = i - sh.nw;
  out.push_back({f.delta(m), f.normals[static_cast<std::size_t>(m)]});
  if (sh.wetted) {
    out.push_back({f.is(), f.slide});
  } else {
    out.push_back({sh.k(), {1.0, 0.0}});
    out.push_back({sh.k() + 1, {0.0, 1.0}});
  }
}

Shape apply(const Frame& f, const Vec& x) {
  Shape sh = f.base;
  Vec2 shift{};
  if (sh.wetted) {
    const double slide = x[f.is()];
    sh.sb += x[f.ib()] + slide;
    sh.sa += x[f.ia()] + slide;
    shift = slide * f.slide;
  } else {
    shift = {x[sh.k()], x[sh.k() + 1]};
  }
  for (int m = 0; m < sh.k(); ++m) {
    const std::size_t mm = static_cast<std::size_t>(m);
    sh.free[mm] += x[f.delta(m)] * f.normals[mm] + shift;
  }
  return sh;
}

struct Energy {
  double total = 0.0;
  double free_length = 0.0;
  double area = 0.0;
};

Energy shape_energy(const Shape& sh, const Polyline& v, const Container& c) {
  Energy e;
  const std::size_t n = v.size();
  const std::size_t first = sh.wetted ? static_cast<std::size_t>(sh.nw - 1) : 0;
  for (std::size_t i = first; i < n; ++i) e.free_length += norm(v[(i + 1) % n] - v[i]);
  e.area = signed_area(v);
  e.total = e.free_length + bulk_integral(v, c.potential());
  if (sh.wetted) e.total += c.sigma_integral(sh.sa, sh.sb);
  return e;
}

struct Gradient {
  Vec energy;
  Vec area;
};

Gradient frame_gradient(const Frame& f, const Container& c) {
  const Shape& sh = f.base;
  const Polyline& v = f.vertices;
  const std::size_t n = v.size();
  std::vector<Vec2> ge(n), ga(n);
  const std::size_t first = sh.wetted ? static_cast<std::size_t>(sh.nw - 1) : 0;
  for (std::size_t i = first; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2 u = normalized(v[j] - v[i]);
    ge[i] -= u;
    ge[j] += u;
  }
  if (!c.potential().is_zero()) {
    const BulkPotential& g = c.potential();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const Vec2 nv = rot_cw(v[j] - v[i]);
      const double gm = g(0.5 * (v[i] + v[j]));
      ge[i] += nv * ((g(v[i]) + 2.0 * gm) / 6.0);
      ge[j] += nv * ((g(v[j]) + 2.0 * gm) / 6.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) ga[i] = 0.5 * rot_cw(v[(i + 1) % n] - v[(i + n - 1) % n]);

  Gradient out{Vec::Zero(f.nvars), Vec::Zero(f.nvars)};
  std::vector<Column> cols;
  for (std::size_t i = 0; i < n; ++i) {
    vertex_columns(f, static_cast<int>(i), c, cols);
    for (const Column& col : cols) {
      out.energy[col.var] += dot(col.jac, ge[i]);
      out.area[col.var] += dot(col.jac, ga[i]);
    }
  }
  if (sh.wetted) {
    const double sb = c.sigma(sh.sb), sa = c.sigma(sh.sa);
    out.energy[f.ib()] += sb;
    out.energy[f.ia()] -= sa;
    out.energy[f.is()] += sb - sa;
  }
  return out;
}

// H^1-type metric on the free chain: Laplacian with 1/edge weights plus a
// mass term, pulled back to the frame variables.
SpMat sobolev_metric(const Frame& f, const Container& c, double mass_coeff) {
  const Shape& sh = f.base;
  std::vector<int> chain;
  if (sh.wetted) chain.push_back(sh.nw - 1);
  for (int m = 0; m < sh.k(); ++m) chain.push_back(sh.nw + m);
  if (sh.wetted) chain.push_back(0);
  const std::size_t nn = chain.size();
  const std::size_t edges = sh.wetted ? nn - 1 : nn;

  std::vector<std::vector<Column>> cols(nn);
  for (std::size_t a = 0; a < nn; ++a) vertex_columns(f, chain[a], c, cols[a]);

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nn * 40);
  auto block = [&](std::size_t a, std::size_t b, double w) {
    for (const Column& p : cols[a])
      for (const Column& q : cols[b]) {
        const double val = w * dot(p.jac, q.jac);
        if (val != 0.0) t.emplace_back(p.var, q.var, val);
      }
  };
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t a = e, b = (e + 1) % nn;
    const double len = std::max(norm(f.vertices[static_cast<std::size_t>(chain[b])] -
                                     f.vertices[static_cast<std::size_t>(chain[a])]),
                                1e-300);
    const double w = 1.0 / len;
    block(a, a, w + 0.5 * mass_coeff * len);
    block(b, b, w + 0.5 * mass_coeff * len);
    block(a, b, -w);
    block(b, a, -w);
  }
  SpMat p(f.nvars, f.nvars);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}


// Restore the area by a uniform normal offset of the free vertices.
bool project_area(Shape& sh, const Container& c, double m) {
  const Polyline v0 = assemble(sh, c);
  const std::vector<Vec2> nrm = free_normals(sh, v0);
  const Polyline base = sh.free;
  double delta = 0.0, best_delta = 0.0, best_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    for (int j = 0; j < sh.k(); ++j) {
      const std::size_t jj = static_cast<std::size_t>(j);
      sh.free[jj] = base[jj] + delta * nrm[jj];
    }
    const Polyline v = assemble(sh, c);
    const double a = signed_area(v);
    const double err = std::abs(a - m);
    if (err < best_err) {
      best_err = err;
      best_delta = delta;
    } else if (best_err <= 1e-12 * m) {
      break;  // rounding floor reached
    }
    if (err <= 4.0 * kEps * m) break;
    double da = 0.0;
    const std::size_t n = v.size();
    for (int j = 0; j < sh.k(); ++j) {
      const std::size_t i = static_cast<std::size_t>(sh.nw + j);
      da += dot(0.5 * rot_cw(v[(i + 1) % n] - v[(i + n - 1) % n]), nrm[static_cast<std::size_t>(j)]);
    }
    if (!(std::abs(da) > 0.0)) break;
    delta -= (a - m) / da;
  }
  for (int j = 0; j < sh.k(); ++j) {
    const std::size_t jj = static_cast<std::size_t>(j);
    sh.free[jj] = base[jj] + best_delta * nrm[jj];
  }
  return best_err <= 1e-12 * m;
}

Polyline resample_open(const Polyline& q, int count) {
  std::vector<double> cum(q.size(), 0.0);
  for (std::size_t i = 1; i < q.size(); ++i) cum[i] = cum[i - 1] + norm(q[i] - q[i - 1]);
  const double total = cum.back();
  Polyline out;
  out.reserve(static_cast<std::size_t>(count));
  std::size_t seg = 0;
  for (int i = 1; i <= count; ++i) {
    const double t = total * i / (count + 1);
    while (seg + 2 < q.size() && cum[seg + 1] < t) ++seg;
    const double l = cum[seg + 1] - cum[seg];
    const double f = l > 0.0 ? (t - cum[seg]) / l : 0.0;
    out.push_back(q[seg] + f * (q[seg + 1] - q[seg]));
  }
  return out;
}

Polyline resample_closed(const Polyline& p, int count) {
  Polyline q = p;
  q.push_back(p.front());
  Polyline inner = resample_open(q, count - 1);
  inner.insert(inner.begin(), p.front());
  return inner;
}

double edge_ratio(const Polyline& q) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const double l = norm(q[i + 1] - q[i]);
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

Polyline free_chain(const Shape& sh, const Polyline& v) {
  Polyline q;
  if (sh.wetted) q.push_back(v[static_cast<std::size_t>(sh.nw - 1)]);
  q.insert(q.end(), sh.free.begin(), sh.free.end());
  q.push_back(sh.wetted ? v[0] : sh.free.front());
  return q;
}

// Equal-length free edges and a vertex split proportional to the wetted and
// free lengths. Returns false when nothing needed to change.
bool remesh(Shape& sh, const Container& c, int total, bool force, double ratio = kRemeshRatio) {
  const Polyline v = assemble(sh, c);
  const Polyline q = free_chain(sh, v);
  if (!sh.wetted) {
    if (!force && sh.k() == total && edge_ratio(q) < ratio) return false;
    sh.free = resample_closed(sh.free, total);
    return true;
  }
  const double lw = sh.sb - sh.sa, lf = polyline_length(q);
  const int ew = std::clamp(static_cast<int>(std::lround(total * lw / (lw + lf))), 1, total - 4);
  const int cur = sh.nw - 1;
  if (!force && sh.size() == total && std::abs(ew - cur) < 2 && edge_ratio(q) < ratio) return false;
  sh.nw = ew + 1;
  sh.free = resample_open(q, total - sh.nw);
  return true;
}

// Smallest distance between free-chain vertices at least three steps apart,
// relative to the mean edge.
double pinch_ratio(const Polyline& q) {
  const std::size_t n = q.size();
  if (n < 5) return std::numeric_limits<double>::infinity();
  const double mean = polyline_length(q) / static_cast<double>(n - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 3; j < n; ++j) best = std::min(best, norm(q[i] - q[j]));
  }
  return best / mean;
}

class Problem {
 public:
  Problem(const Container& c, const MinimizeConfig& cfg) : c_(c), cfg_(cfg), m_(cfg.volume) {
    rho_ = std::sqrt(m_);
    interior_center_ = {};
  }

  void set_interior_guard(Vec2 center, double clearance) {
    interior_center_ = center;
    interior_clearance_ = clearance;
  }

  bool valid(const Shape& sh) const {
    const Polyline v = assemble(sh, c_);
    if (sh.wetted) {
      if (!(sh.sb - sh.sa > 1e-9 * c_.length()) || sh.sb - sh.sa > 0.5 * c_.length()) return false;
    }
    const std::size_t n = v.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += norm(v[(i + 1) % n] - v[i]);
    mean /= static_cast<double>(n);
    for (int mm = 0; mm < sh.k(); ++mm) {
      const std::size_t i = static_cast<std::size_t>(sh.nw + mm);
      const Vec2 e0 = v[i] - v[(i + n - 1) % n], e1 = v[(i + 1) % n] - v[i];
      const double l0 = norm(e0), l1 = norm(e1);
      if (l0 < 1e-6 * mean || l1 < 1e-6 * mean) return false;
      if (dot(e0, e1) < -0.9 * l0 * l1) return false;
    }
    return inside(sh);
  }

  bool inside(const Shape& sh) const {
    if (sh.wetted) {
      const double smid = 0.5 * (sh.sa + sh.sb);
      const Vec2 o = c_.point(smid), in = -c_.outward_normal(smid);
      const double kappa = c_.curvature_bound();
      for (const Vec2 x : sh.free) {
        const Vec2 d = x - o;
        if (dot(d, in) > kappa * norm2(d) + 1e-12 * c_.diam()) continue;
        if (c_.project_near(x, smid).signed_distance > 0.0) return false;
      }
      return true;
    }
    for (const Vec2 x : sh.free) {
      if (norm(x - interior_center_) < interior_clearance_) continue;
      if (c_.project(x).signed_distance > 0.0) return false;
    }
    return true;
  }

  struct Outcome {
    Shape shape;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    bool monotone = true;
    double max_volume_error = 0.0;
    std::vector<double> trace;
    std::string diagnostic;
  };

  Outcome descend(Shape sh) const {
    Outcome out;
    remesh(sh, c_, cfg_.vertex_count, true);
    if (!project_area(sh, c_, m_)) throw GeometryError("minimize: area projection failed on the seed");
    Polyline v = assemble(sh, c_);
    if (!valid(sh)) throw GeometryError("minimize: seed droplet is not admissible");
    Energy e = shape_energy(sh, v, c_);
    out.trace.push_back(e.total);
    track_volume(out, v);

    Eigen::SimplicialLDLT<SpMat> solver;
    int pattern_size = -1;
    double alpha_prev = cfg_.initial_step;
    const double mass = kSlideMass / m_;
    int it = 0;
    for (; it < cfg_.max_iters; ++it) {
      if (it > 0 && cfg_.remesh_interval > 0 && it % cfg_.remesh_interval == 0) {
        const double pr = pinch_ratio(free_chain(sh, v));
        if (pr < 0.1) {
          out.diagnostic = "pinch-off: free arc self-distance below a tenth of the edge length";
          break;
        }
        Shape trial = sh;
        const double ratio = out.grad_norm < 1e3 * cfg_.grad_tol ? kLooseRemeshRatio : kRemeshRatio;
        if (remesh(trial, c_, cfg_.vertex_count, false, ratio) && project_area(trial, c_, m_) && valid(trial)) {
          sh = std::move(trial);
          v = assemble(sh, c_);
          e = shape_energy(sh, v, c_);
          track_volume(out, v);
          out.trace.push_back(e.total);
        }
      }

      const Frame frame = make_frame(sh, c_);
      const Gradient g = frame_gradient(frame, c_);
      const SpMat p = sobolev_metric(frame, c_, mass);
      if (frame.nvars != pattern_size) {
        solver.analyzePattern(p);
        pattern_size = frame.nvars;
      }
      solver.factorize(p);
      if (solver.info() != Eigen::Success) {
        out.diagnostic = "metric factorization failed";
        break;
      }
      const Vec d2 = solver.solve(g.area);
      const double lambda = g.energy.dot(d2) / g.area.dot(d2);
      const Vec r = g.energy - lambda * g.area;
      out.grad_norm = r.lpNorm<Eigen::Infinity>();
      if (out.grad_norm < cfg_.grad_tol) {
        out.converged = true;
        break;
      }
      const Vec dir = -solver.solve(r);
      const double slope = r.dot(dir);
      if (!(slope < 0.0)) {
        out.diagnostic = "search direction is not a descent direction";
        break;
      }
      const double dmax = dir.lpNorm<Eigen::Infinity>();
      const double noise = 64.0 * kEps * (std::abs(e.total) + e.free_length);
      double alpha = std::min(cfg_.initial_step, 2.0 * alpha_prev);
      if (dmax > 0.0) alpha = std::min(alpha, 0.25 * rho_ / dmax);
      const bool flat_allowed = alpha * std::abs(slope) < noise;
      bool accepted = false;
      Shape next;
      Energy en;
      for (int ls = 0; ls < 60; ++ls, alpha *= cfg_.shrink) {
        next = apply(frame, alpha * dir);
        if (!valid(next) || !project_area(next, c_, m_) || !valid(next)) continue;
        const Polyline vn = assemble(next, c_);
        en = shape_energy(next, vn, c_);
        const double merit0 = e.total - lambda * (e.area - m_);
        const double merit1 = en.total - lambda * (en.area - m_);
        const bool armijo = merit1 <= merit0 + cfg_.armijo * alpha * slope;
        const bool flat = flat_allowed && merit1 <= merit0 + noise;
        if (armijo || flat) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        out.diagnostic = "line search stalled";
        break;
      }
      if (en.total > e.total + noise + std::abs(lambda) * 2e-12 * m_) out.monotone = false;
      alpha_prev = alpha;
      sh = std::move(next);
      v = assemble(sh, c_);
      e = en;
      out.trace.push_back(e.total);
      track_volume(out, v);
    }
    if (it >= cfg_.max_iters && !out.converged) out.diagnostic = "iteration cap reached";
    out.iterations = it;
    out.shape = std::move(sh);
    out.energy = e.total;
    return out;
  }

 private:
  void track_volume(Outcome& out, const Polyline& v) const {
    out.max_volume_error = std::max(out.max_volume_error, std::abs(signed_area(v) - m_) / m_);
  }

  const Container& c_;
  const MinimizeConfig& cfg_;
  double m_;
  double rho_;
  Vec2 interior_center_;
  double interior_clearance_ = 0.0;
};

double clamp_tau(double t) { return std::clamp(t, -0.95, 0.95); }

Shape seed_shape(ContainerPtr c, double s, double tau, double m, int k) {
  const CapPolygon cap = ideal_droplet_boundary({{2, clamp_tau(tau)}, 1.0, 0.0}, std::max(k, 8));
  const BoundaryChart chart = chart_at(c, s);
  double extent = 0.0;
  for (const Vec2 p : cap.vertices) extent = std::max(extent, norm(p));
  PolyDroplet h;
  h.vertices = cap.vertices;
  h.contact = cap.contact;
  h.boundary_params.assign(h.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h.contact[i]) h.boundary_params[i] = h.vertices[i].x;
  // The chart distorts area; fix the scale so that the image has area m.
  double t = std::sqrt(m);
  PolyDroplet img;
  for (int it = 0; it < 8; ++it) {
    if (t * extent > chart.reach()) {
      throw GeometryError("seed: droplet of this volume does not fit inside the boundary chart");
    }
    img = blow_down(h, chart, t);
    const double a = signed_area(img.vertices);
    if (std::abs(a - m) <= 1e-14 * m) break;
    t *= std::sqrt(m / a);
  }
  return from_droplet(img);
}

struct Job {
  std::string label;
  enum class Kind { Boundary, Interior, Droplet } kind = Kind::Boundary;
  double s = 0.0;
  double tau = 0.0;
  Vec2 center{};
  std::optional<PolyDroplet> droplet;
};

Vec2 polygon_centroid(const Container& c) {
  double a = 0.0;
  Vec2 acc{};
  const int n = c.station_count();
  for (int i = 0; i < n; ++i) {
    const Vec2 p = c.station_point(i), q = c.station_point((i + 1) % n);
    const double w = cross(p, q);
    a += w;
    acc += w * (p + q);
  }
  return acc / (3.0 * a);
}

std::vector<Job> expand_seeds(const Container& c, const MinimizeConfig& cfg) {
  std::vector<Job> jobs;
  auto boundary_job = [&](double s, std::optional<double> tau, const std::string& label) {
    Job j;
    j.label = label;
    j.s = c.wrap(s);
    j.tau = tau ? *tau : c.sigma(j.s);
    jobs.push_back(j);
  };
  if (cfg.seeds.empty()) {
    const int k = std::max(0, cfg.lowest_sigma_seeds);
    if (k > 0) {
      const double gap = 0.9 * c.length() / k;
      for (int idx : c.lowest_sigma_stations(k, gap)) {
        std::ostringstream os;
        os << "station " << idx;
        boundary_job(c.station_s(idx), std::nullopt, os.str());
      }
    }
    if (cfg.interior_seed) {
      Job j;
      j.kind = Job::Kind::Interior;
      j.center = polygon_centroid(c);
      j.label = "interior";
      jobs.push_back(j);
    }
    return jobs;
  }
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const SeedSpec& sp = cfg.seeds[i];
    switch (sp.kind) {
      case SeedSpec::Kind::Boundary: {
        std::ostringstream os;
        os << "boundary s=" << sp.s;
        boundary_job(sp.s, sp.tau, os.str());
        break;
      }
      case SeedSpec::Kind::RandomBoundary: {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                          static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(0.0, c.length());
        for (int r = 0; r < std::max(1, sp.count); ++r) {
          const double s = u(rng);
          std::ostringstream os;
          os << "random s=" << s;
          boundary_job(s, sp.tau, os.str());
        }
        break;
      }
      case SeedSpec::Kind::Interior: {
        Job j;
        j.kind = Job::Kind::Interior;
        j.center = sp.center;
        j.label = "interior";
        jobs.push_back(j);
        break;
      }
      case SeedSpec::Kind::Droplet: {
        if (!sp.droplet) throw std::invalid_argument("seeds: droplet seed without a polygon");
        Job j;
        j.kind = Job::Kind::Droplet;
        j.droplet = sp.droplet;
        j.label = "warm start";
        jobs.push_back(j);
        break;
      }
    }
  }
  return jobs;
}

struct JobResult {
  bool ok = false;
  Problem::Outcome outcome;
  std::string error;
};

JobResult run_job(ContainerPtr c, const MinimizeConfig& cfg, const Job& job) {
  JobResult res;
  Problem prob(*c, cfg);
  const double m = cfg.volume;
  switch (job.kind) {
    case Job::Kind::Boundary:
      res.outcome = prob.descend(seed_shape(c, job.s, job.tau, m, cfg.vertex_count));
      break;
    case Job::Kind::Droplet:
      res.outcome = prob.descend(from_droplet(rescale_droplet(c, *job.droplet, m)));
      break;
    case Job::Kind::Interior: {
      const double r0 = std::sqrt(m / std::acos(-1.0));
      const double clearance = -c->project(job.center).signed_distance;
      if (clearance < 1.5 * r0) throw GeometryError("interior seed: ball does not fit around the centre");
      prob.set_interior_guard(job.center, clearance - 1e-9 * c->diam());
      Shape sh;
      const int n = cfg.vertex_count;
      for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::acos(-1.0) * i / n;
        sh.free.push_back(job.center + r0 * Vec2{std::cos(t), std::sin(t)});
      }
      Problem::Outcome free_out = prob.descend(sh);
      // Wetting transition: touch down at the nearest wall point.
      Vec2 centroid{};
      for (const Vec2 x : free_out.shape.free) centroid += x;
      centroid = centroid / static_cast<double>(free_out.shape.k());
      const BoundaryPoint bp = c->project(centroid);
      Problem wet_prob(*c, cfg);
      Problem::Outcome wet_out = wet_prob.descend(seed_shape(c, bp.s, c->sigma(bp.s), m, cfg.vertex_count));
      if (wet_out.energy < free_out.energy) {
        std::ostringstream os;
        os << "wetted after touching the wall at s=" << c->wrap(bp.s);
        wet_out.diagnostic = wet_out.diagnostic.empty() ? os.str() : os.str() + "; " + wet_out.diagnostic;
        res.outcome = std::move(wet_out);
      } else {
        res.outcome = std::move(free_out);
      }
      break;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace

void validate(const MinimizeConfig& cfg, const Container& c) {
  auto bad = [](const std::string& field, const std::string& what) {
    throw std::invalid_argument("minimize." + field + ": " + what);
  };
  if (cfg.vertex_count < 32) bad("vertex_count", "must be at least 32");
  if (!(cfg.volume > 0.0) || !std::isfinite(cfg.volume)) bad("volume", "must be positive");
  if (cfg.volume >= c.area()) bad("volume", "must be smaller than the container area");
  if (!(cfg.initial_step > 0.0)) bad("initial_step", "must be positive");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) bad("shrink", "must lie in (0, 1)");
  if (!(cfg.armijo > 0.0 && cfg.armijo < 1.0)) bad("armijo", "must lie in (0, 1)");
  if (!(cfg.grad_tol > 0.0)) bad("grad_tol", "must be positive");
  if (cfg.max_iters < 0) bad("max_iters", "must be non-negative");
  if (cfg.remesh_interval < 0) bad("remesh_interval", "must be non-negative");
  if (cfg.jobs < 1) bad("jobs", "must be at least 1");
  if (cfg.seeds.empty() && cfg.lowest_sigma_seeds <= 0 && !cfg.interior_seed) bad("seeds", "no seeds requested");
}

PolyDroplet seed_droplet(ContainerPtr c, double s, double tau_guess, double m, int k) {
  if (!c) throw std::invalid_argument("seed_droplet: null container");
  if (!(m > 0.0)) throw std::invalid_argument("seed_droplet: volume must be positive");
  Shape sh = seed_shape(c, s, tau_guess, m, k);
  if (!project_area(sh, *c, m)) throw GeometryError("seed_droplet: area projection failed");
  return to_droplet(sh, *c);
}

PolyDroplet rescale_droplet(ContainerPtr c, const PolyDroplet& p, double m) {
  if (!c) throw std::invalid_argument("rescale_droplet: null container");
  const auto start = p.run_start();
  if (!start) {
    const double f = std::sqrt(m / std::abs(signed_area(p.vertices)));
    Vec2 ctr{};
    for (const Vec2 x : p.vertices) ctr += x;
    ctr = ctr / static_cast<double>(p.size());
    PolyDroplet out = p;
    for (Vec2& x : out.vertices) x = ctr + f * (x - ctr);
    return out;
  }
  const Shape sh = from_droplet(p);
  const BoundaryChart chart = chart_at(c, 0.5 * (sh.sa + sh.sb));
  PolyDroplet h = blow_up(p, chart, 1.0);
  const double f = std::sqrt(m / std::abs(signed_area(p.vertices)));
  for (Vec2& x : h.vertices) x = f * x;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h.contact[i]) h.boundary_params[i] = h.vertices[i].x;
  return blow_down(h, chart, 1.0);
}

MinimizeResult minimize(ContainerPtr c, const MinimizeConfig& cfg) {
  if (!c) throw std::invalid_argument("minimize: null container");
  validate(cfg, *c);
  const std::vector<Job> jobs = expand_seeds(*c, cfg);
  std::vector<JobResult> results(jobs.size());
  const int count = static_cast<int>(jobs.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (int i = 0; i < count; ++i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    try {
      results[ii] = run_job(c, cfg, jobs[ii]);
    } catch (const std::exception& e) {
      results[ii].ok = false;
      results[ii].error = e.what();
    }
  }

  MinimizeResult out;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < results.size(); ++i) {
    SeedOutcome so;
    so.label = jobs[i].label;
    if (results[i].ok) {
      const auto& o = results[i].outcome;
      so.energy = o.energy;
      so.converged = o.converged;
      so.wetted = o.shape.wetted;
      so.iterations = o.iterations;
      so.diagnostic = o.diagnostic;
      if (!best || o.energy < results[*best].outcome.energy - kEnergyTie) best = i;
    } else {
      so.energy = std::numeric_limits<double>::quiet_NaN();
      so.diagnostic = results[i].error;
    }
    out.seeds.push_back(so);
  }
  if (!best) {
    std::string msg = "minimize: every seed failed";
    for (const auto& s : out.seeds) msg += "; " + s.label + ": " + s.diagnostic;
    throw std::runtime_error(msg);
  }
  const Problem::Outcome& o = results[*best].outcome;
  out.seed_index = *best;
  out.droplet = to_droplet(o.shape, *c);
  out.energy = gauss_energy(out.droplet, *c);
  out.converged = o.converged;
  out.iterations = o.iterations;
  out.grad_norm = o.grad_norm;
  out.monotone = o.monotone;
  out.max_volume_error = o.max_volume_error;
  out.energy_trace = o.trace;
  if (o.shape.wetted) {
    out.contact_s = c->wrap(0.5 * (o.shape.sa + o.shape.sb));
    out.contact_point = c->point(out.contact_s);
    out.young_residuals = young_residual(out.droplet, *c);
  } else {
    Vec2 ctr{};
    for (const Vec2 x : o.shape.free) ctr += x;
    const BoundaryPoint bp = c->project(ctr / static_cast<double>(o.shape.k()));
    out.contact_s = c->wrap(bp.s);
    out.contact_point = bp.point;
  }
  return out;
}

std::vector<double> young_residual(const PolyDroplet& p, const Container& c) {
  const auto start = p.run_start();
  if (!start) return {};
  const std::size_t n = p.size();
  std::size_t end = *start;
  while (p.contact[(end + 1) % n]) end = (end + 1) % n;
  const double sa = p.boundary_params[*start], sb = p.boundary_params[end];
  // Edge leaving the run at its end, and edge arriving at its start.
  const Vec2 nu_b = normalized(rot_cw(p.vertices[(end + 1) % n] - p.vertices[end]));
  const Vec2 nu_a = normalized(rot_cw(p.vertices[*start] - p.vertices[(*start + n - 1) % n]));
  return {std::abs(dot(c.outward_normal(sa), nu_a) - c.sigma(sa)),
          std::abs(dot(c.outward_normal(sb), nu_b) - c.sigma(sb))};
}

std::vector<double> young_residual(const MinimizeResult& r, const Container& c) {
  return young_residual(r.droplet, c);
}

double almost_minimality_probe(const PolyDroplet& p, const Container& c, int trials, double rho0,
                               std::uint64_t rng_seed) {
  if (trials <= 0) throw std::invalid_argument("almost_minimality_probe: trials must be positive");
  if (!(rho0 > 0.0)) throw std::invalid_argument("almost_minimality_probe: rho0 must be positive");
  const double base = gauss_energy(p, c).total;
  const std::size_t n = p.size();
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (!p.contact[i]) free_idx.push_back(i);
  if (free_idx.empty()) throw GeometryError("almost_minimality_probe: droplet has no free vertices");

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, free_idx.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double area0 = signed_area(p.vertices);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t i0 = free_idx[pick(rng)];
    const Vec2 ctr = p.vertices[i0];
    const double rho = rho0 * (0.25 + 0.74 * unit(rng));
    const double amp = (unit(rng) < 0.5 ? -1.0 : 1.0) * rho * std::pow(10.0, -3.0 + 2.0 * unit(rng));
    PolyDroplet q = p;
    bool moved = false;
    // Contiguous patch of free vertices around i0 inside the ball.
    auto bump = [&](std::size_t i) {
      const double r = norm(p.vertices[i] - ctr) / rho;
      if (r >= 1.0 || p.contact[i]) return false;
      const Vec2 nv = normalized(rot_cw(p.vertices[(i + 1) % n] - p.vertices[(i + n - 1) % n]));
      const double w = (1.0 - r * r) * (1.0 - r * r);
      q.vertices[i] = p.vertices[i] + amp * w * nv;
      moved = true;
      return true;
    };
    bump(i0);
    for (std::size_t i = (i0 + 1) % n; i != i0 && bump(i); i = (i + 1) % n) {
    }
    for (std::size_t i = (i0 + n - 1) % n; i != i0 && bump(i); i = (i + n - 1) % n) {
    }
    if (!moved) continue;
    double energy;
    try {
      energy = gauss_energy(q, c).total;
    } catch (const GeometryError&) {
      continue;  // competitor left the container or self-intersected
    }
    const double sym = std::abs(signed_area(q.vertices) - area0);
    if (!(sym > 0.0)) continue;
    best = std::max(best, (base - energy) / sym);
  }
  return best;
}

double almost_minimality_probe(const MinimizeResult& r, const Container& c, int trials, double rho0,
                               std::uint64_t rng_seed) {
  return almost_minimality_probe(r.droplet, c, trials, rho0, rng_seed);
}

}  // namespace capdrop
