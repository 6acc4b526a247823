#include "capdrop/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace capdrop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); }

class Object {
 public:
  Object(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "must be an object");
    for (const auto& [key, _] : j.items()) {
      if (!allowed.count(key)) fail(field(key), "unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& at(const std::string& key) const {
    if (!has(key)) fail(field(key), "required");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(field(key), "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(field(key), "must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) fail(field(key), "must be true or false");
    return at(key).get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(field(key), "must be a string");
    return v.get<std::string>();
  }

  Vec2 point(const std::string& key, Vec2 fallback) const {
    if (!has(key)) return fallback;
    return as_point(at(key), field(key));
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(field(key), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(field(key) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  static Vec2 as_point(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) fail(name, "must be [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  const json& j_;
  std::string path_;
};

std::string kind_of(const Object& o) { return o.string("kind"); }

ParametricCurve parse_curve(const Object& o) {
  const std::string kind = kind_of(o);
  if (kind == "disk") {
    const double r = o.number("radius");
    if (!(r > 0.0)) fail(o.field("radius"), "must be positive");
    return disk_curve(o.point("center", {}), r);
  }
  if (kind == "ellipse") {
    const double a = o.number("semi_x"), b = o.number("semi_y");
    if (!(a > 0.0)) fail(o.field("semi_x"), "must be positive");
    if (!(b > 0.0)) fail(o.field("semi_y"), "must be positive");
    return ellipse_curve(o.point("center", {}), a, b);
  }
  if (kind == "stadium") {
    const double h = o.number("half_length"), r = o.number("radius");
    if (!(h > 0.0)) fail(o.field("half_length"), "must be positive");
    if (!(r > 0.0)) fail(o.field("radius"), "must be positive");
    return stadium_curve(h, r);
  }
  if (kind == "samples") {
    const json& pts = o.at("points");
    if (!pts.is_array()) fail(o.field("points"), "must be an array of [x, y]");
    Polyline samples;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      samples.push_back(Object::as_point(pts[i], o.field("points") + "[" + std::to_string(i) + "]"));
    }
    return spline_curve(samples);
  }
  fail(o.field("kind"), "expected disk, ellipse, stadium or samples, got '" + kind + "'");
}

std::set<std::string> container_keys(const json& j) {
  const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  if (kind == "disk") return {"kind", "radius", "center", "stations"};
  if (kind == "ellipse") return {"kind", "semi_x", "semi_y", "center", "stations"};
  if (kind == "stadium") return {"kind", "half_length", "radius", "stations"};
  if (kind == "samples") return {"kind", "points", "stations"};
  return {"kind"};
}

void check_sigma_value(double v, const std::string& field) {
  if (!(v > -1.0 && v < 1.0)) {
    std::ostringstream os;
    os << "must lie in (-1, 1), got " << v;
    fail(field, os.str());
  }
}

BulkPotential parse_g(const json& j) {
  const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  if (kind == "zero") {
    Object o(j, "g", {"kind"});
    return BulkPotential::zero();
  }
  if (kind == "linear") {
    Object o(j, "g", {"kind", "c0", "cx", "cy"});
    return BulkPotential::linear(o.number("c0", 0.0), o.number("cx", 0.0), o.number("cy", 0.0));
  }
  if (kind == "grid") {
    Object o(j, "g", {"kind", "origin", "dx", "dy", "values"});
    const json& rows = o.at("values");
    if (!rows.is_array()) fail("g.values", "must be an array of rows");
    std::vector<std::vector<double>> table;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array()) fail("g.values[" + std::to_string(r) + "]", "must be an array of numbers");
      std::vector<double> row;
      for (std::size_t i = 0; i < rows[r].size(); ++i) {
        if (!rows[r][i].is_number()) {
          fail("g.values[" + std::to_string(r) + "][" + std::to_string(i) + "]", "must be a number");
        }
        row.push_back(rows[r][i].get<double>());
      }
      table.push_back(std::move(row));
    }
    return BulkPotential::grid(o.point("origin", {}), o.number("dx"), o.number("dy"), std::move(table));
  }
  Object o(j, "g", {"kind"});
  fail("g.kind", "expected zero, linear or grid, got '" + kind + "'");
}

SeedSpec parse_seed(const json& j, const std::string& path) {
  const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  SeedSpec s;
  if (kind == "boundary") {
    Object o(j, path, {"kind", "s", "tau"});
    s.kind = SeedSpec::Kind::Boundary;
    s.s = o.number("s");
    if (o.has("tau")) {
      s.tau = o.number("tau");
      check_sigma_value(*s.tau, o.field("tau"));
    }
  } else if (kind == "interior") {
    Object o(j, path, {"kind", "center"});
    s.kind = SeedSpec::Kind::Interior;
    s.center = Object::as_point(o.at("center"), o.field("center"));
  } else if (kind == "random_boundary") {
    Object o(j, path, {"kind", "count"});
    s.kind = SeedSpec::Kind::RandomBoundary;
    const long long n = o.integer("count");
    if (n < 1 || n > 1024) fail(o.field("count"), "must lie in [1, 1024]");
    s.count = static_cast<int>(n);
  } else {
    Object o(j, path, {"kind"});
    fail(path + ".kind", "expected boundary, interior or random_boundary, got '" + kind + "'");
  }
  return s;
}

int as_int(long long v, const std::string& field) {
  if (v < -2147483647LL || v > 2147483647LL) fail(field, "out of range");
  return static_cast<int>(v);
}

MinimizeConfig parse_minimize(const json& j) {
  Object o(j, "minimize",
           {"vertex_count", "volume", "initial_step", "shrink", "armijo", "grad_tol", "max_iters", "remesh_interval",
            "seeds", "lowest_sigma_seeds", "interior_seed"});
  MinimizeConfig cfg;
  cfg.vertex_count = as_int(o.integer("vertex_count", cfg.vertex_count), "minimize.vertex_count");
  cfg.volume = o.number("volume", cfg.volume);
  cfg.initial_step = o.number("initial_step", cfg.initial_step);
  cfg.shrink = o.number("shrink", cfg.shrink);
  cfg.armijo = o.number("armijo", cfg.armijo);
  cfg.grad_tol = o.number("grad_tol", cfg.grad_tol);
  cfg.max_iters = as_int(o.integer("max_iters", cfg.max_iters), "minimize.max_iters");
  cfg.remesh_interval = as_int(o.integer("remesh_interval", cfg.remesh_interval), "minimize.remesh_interval");
  cfg.lowest_sigma_seeds = as_int(o.integer("lowest_sigma_seeds", cfg.lowest_sigma_seeds), "minimize.lowest_sigma_seeds");
  cfg.interior_seed = o.boolean("interior_seed", cfg.interior_seed);
  if (o.has("seeds")) {
    const json& seeds = o.at("seeds");
    if (!seeds.is_array()) fail("minimize.seeds", "must be an array");
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cfg.seeds.push_back(parse_seed(seeds[i], "minimize.seeds[" + std::to_string(i) + "]"));
    }
  }
  return cfg;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Byte offset to line/column (1-based).
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON (" +
                      what + ")");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(std::string_view text) {
  const json doc = parse_json(text);
  Object root(doc, "", {"container", "sigma", "g", "minimize", "masses", "rng_seed"});

  RunConfig rc;
  rc.canonical = doc.dump();
  rc.hash = fnv1a_hex(rc.canonical);

  const json& cj = root.at("container");
  Object co(cj, "container", container_keys(cj));
  const ParametricCurve curve = parse_curve(co);
  const long long stations = co.integer("stations", 4096);
  if (stations < 256 || stations > (1 << 22)) fail("container.stations", "must lie in [256, 4194304]");

  const json& sj = root.at("sigma");
  const std::string skind = sj.is_object() && sj.contains("kind") && sj["kind"].is_string() ? sj["kind"].get<std::string>() : "";
  const BulkPotential g = root.has("g") ? parse_g(root.at("g")) : BulkPotential::zero();

  try {
    if (skind == "const") {
      Object so(sj, "sigma", {"kind", "value"});
      const double v = so.number("value");
      check_sigma_value(v, "sigma.value");
      rc.container = std::make_shared<const Container>(curve, static_cast<int>(stations), constant_sigma(v), g);
    } else if (skind == "cosine") {
      Object so(sj, "sigma", {"kind", "base", "amplitude", "phase"});
      const double base = so.number("base"), amp = so.number("amplitude");
      check_sigma_value(base, "sigma.base");
      check_sigma_value(base + 2.0 * amp, "sigma.amplitude (base + 2 amplitude)");
      rc.container = std::make_shared<const Container>(
          curve, static_cast<int>(stations), cosine_sigma(base, amp, so.number("phase", 0.0)), g);
    } else if (skind == "table") {
      Object so(sj, "sigma", {"kind", "values"});
      const std::vector<double> values = so.numbers("values");
      for (std::size_t i = 0; i < values.size(); ++i) check_sigma_value(values[i], "sigma.values[" + std::to_string(i) + "]");
      rc.container = std::make_shared<const Container>(curve, static_cast<int>(stations), values, g);
    } else {
      Object so(sj, "sigma", {"kind"});
      fail("sigma.kind", "expected const, cosine or table, got '" + skind + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (root.has("rng_seed")) {
    const json& v = root.at("rng_seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail("rng_seed", "must be a non-negative integer");
    }
    rc.rng_seed = v.get<std::uint64_t>();
  }
  if (root.has("minimize")) rc.minimize = parse_minimize(root.at("minimize"));
  rc.minimize.rng_seed = rc.rng_seed;
  try {
    validate(rc.minimize, *rc.container);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (root.has("masses")) {
    rc.masses = root.numbers("masses");
    for (std::size_t i = 0; i < rc.masses.size(); ++i) {
      const std::string f = "masses[" + std::to_string(i) + "]";
      if (!(rc.masses[i] > 0.0 && rc.masses[i] < 0.25 * rc.container->area())) fail(f, "must lie in (0, area/4)");
      if (i > 0 && !(rc.masses[i] < rc.masses[i - 1])) fail(f, "masses must be strictly decreasing");
    }
  }
  return rc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot write");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error(path + ": rename failed");
  }
}

std::string droplet_csv(const PolyDroplet& p, const std::string& header) {
  std::ostringstream os;
  std::istringstream hs(header);
  for (std::string line; std::getline(hs, line);) os << "# " << line << '\n';
  os << "x,y,contact_flag,s\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << format_double(p.vertices[i].x) << ',' << format_double(p.vertices[i].y) << ',' << (p.contact[i] ? 1 : 0)
       << ',' << format_double(p.contact[i] ? p.boundary_params[i] : 0.0) << '\n';
  }
  return os.str();
}

PolyDroplet parse_droplet_csv(std::string_view text, const Container& c) {
  PolyDroplet p;
  std::vector<bool> has_s;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  bool header_seen = false;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen && line.rfind("x,", 0) == 0) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 3 && cells.size() != 4) {
      throw ConfigError("droplet line " + std::to_string(lineno) + ": expected 3 or 4 columns");
    }
    double vals[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < cells.size(); ++k) {
      std::size_t used = 0;
      try {
        vals[k] = std::stod(cells[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[k].size()) {
        throw ConfigError("droplet line " + std::to_string(lineno) + ", column " + std::to_string(k + 1) +
                          ": not a number");
      }
    }
    if (vals[2] != 0.0 && vals[2] != 1.0) {
      throw ConfigError("droplet line " + std::to_string(lineno) + ": contact_flag must be 0 or 1");
    }
    p.vertices.push_back({vals[0], vals[1]});
    p.contact.push_back(vals[2] == 1.0);
    p.boundary_params.push_back(vals[3]);
    has_s.push_back(cells.size() == 4);
  }
  if (p.size() < 3) throw ConfigError("droplet: need at least 3 vertices");
  if (const auto start = p.run_start()) {
    const std::size_t n = p.size();
    std::size_t i = *start;
    double prev = 0.0;
    bool first = true;
    while (p.contact[i]) {
      if (!has_s[i]) {
        double s = c.project(p.vertices[i]).s;
        if (!first) s += c.length() * std::round((prev - s) / c.length());
        p.boundary_params[i] = s;
      }
      prev = p.boundary_params[i];
      first = false;
      i = (i + 1) % n;
      if (i == *start) break;
    }
  }
  return p;
}

std::string droplet_svg(const PolyDroplet& p, const Container& c, const std::string& header) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int i = 0; i < c.station_count(); ++i) {
    const Vec2 v = c.station_point(i);
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!--\n" << header << "\n-->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(xmin - pad) << ' '
     << format_double(-ymax - pad) << ' ' << format_double(xmax - xmin + 2 * pad) << ' '
     << format_double(ymax - ymin + 2 * pad) << "\">\n";
  const double stroke = 0.003 * (xmax - xmin);
  // y is flipped so the picture reads with y up.
  auto path = [&](auto begin, auto end) {
    std::ostringstream ps;
    bool first = true;
    for (auto it = begin; it != end; ++it) {
      ps << (first ? 'M' : 'L') << format_double(it->x) << ',' << format_double(-it->y) << ' ';
      first = false;
    }
    ps << 'Z';
    return ps.str();
  };
  Polyline outline;
  for (int i = 0; i < c.station_count(); ++i) outline.push_back(c.station_point(i));
  os << "<path d=\"" << path(outline.begin(), outline.end()) << "\" fill=\"none\" stroke=\"black\" stroke-width=\""
     << format_double(stroke) << "\"/>\n";
  os << "<path d=\"" << path(p.vertices.begin(), p.vertices.end()) << "\" fill=\"#4a90d9\" fill-opacity=\"0.5\" stroke=\"#1f4e8c\" stroke-width=\""
     << format_double(stroke) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace capdrop
