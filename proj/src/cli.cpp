#include "capdrop/cli.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capdrop/config.hpp"
#include "capdrop/harness.hpp"
#include "capdrop/sessile_reference.hpp"

namespace capdrop::cli {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header_line(const std::string& hash, std::uint64_t rng_seed) {
  return std::string("capdrop ") + kVersion + " schema " + std::to_string(kSchemaVersion) + " config_hash " + hash +
         " rng_seed " + std::to_string(rng_seed);
}

ordered header_json(const std::string& hash, std::uint64_t rng_seed) {
  ordered h;
  h["tool"] = "capdrop";
  h["version"] = kVersion;
  h["schema_version"] = kSchemaVersion;
  h["config_hash"] = hash;
  h["rng_seed"] = rng_seed;
  return h;
}

ordered droplet_json(const PolyDroplet& p) {
  ordered d;
  std::vector<double> x, y, s;
  std::vector<int> flags;
  for (std::size_t i = 0; i < p.size(); ++i) {
    x.push_back(p.vertices[i].x);
    y.push_back(p.vertices[i].y);
    flags.push_back(p.contact[i] ? 1 : 0);
    s.push_back(p.contact[i] ? p.boundary_params[i] : 0.0);
  }
  d["x"] = x;
  d["y"] = y;
  d["contact"] = flags;
  d["s"] = s;
  return d;
}

PolyDroplet droplet_from_json(const json& d) {
  PolyDroplet p;
  try {
    const auto x = d.at("x").get<std::vector<double>>();
    const auto y = d.at("y").get<std::vector<double>>();
    const auto flags = d.at("contact").get<std::vector<int>>();
    const auto s = d.at("s").get<std::vector<double>>();
    if (y.size() != x.size() || flags.size() != x.size() || s.size() != x.size()) {
      throw ConfigError("droplet: x, y, contact and s must have equal length");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      p.vertices.push_back({x[i], y[i]});
      p.contact.push_back(flags[i] != 0);
      p.boundary_params.push_back(s[i]);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("droplet: ") + e.what());
  }
  return p;
}

ordered energy_json(const EnergyBreakdown& e) {
  ordered j;
  j["free_surface"] = e.free_surface;
  j["wetted"] = e.wetted;
  j["bulk"] = e.bulk;
  j["total"] = e.total;
  j["lagrange_multiplier"] = e.lagrange_multiplier;
  return j;
}

std::string dump(const ordered& j) { return j.dump(2) + "\n"; }

struct TauGrid {
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

TauGrid parse_grid(const std::string& spec) {
  TauGrid g;
  std::istringstream in(spec);
  std::string a, b, k;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, k) ) {
    throw ConfigError("--tau-grid: expected lo:hi:count");
  }
  try {
    std::size_t ua = 0, ub = 0, uk = 0;
    g.lo = std::stod(a, &ua);
    g.hi = std::stod(b, &ub);
    g.count = std::stoi(k, &uk);
    if (ua != a.size() || ub != b.size() || uk != k.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("--tau-grid: expected lo:hi:count, got '" + spec + "'");
  }
  if (g.count < 1) throw ConfigError("--tau-grid: count must be positive");
  if (g.count > 1 && !(g.hi > g.lo)) throw ConfigError("--tau-grid: need lo < hi");
  if (!(g.lo > -1.0 && g.hi < 1.0)) throw ConfigError("--tau-grid: tau must lie in (-1, 1)");
  return g;
}

PerturbationFamily parse_family(const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream in(spec);
  for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
  if (parts.empty()) throw ConfigError("--family: empty");
  PerturbationFamily f;
  if (parts[0] == "stretch") {
    f.kind = PerturbationFamily::Kind::Stretch;
  } else if (parts[0] == "bump") {
    f.kind = PerturbationFamily::Kind::Bump;
  } else {
    throw ConfigError("--family: expected stretch[:lo:hi[:segments]] or bump[:lo:hi[:segments]]");
  }
  if (parts.size() != 1 && parts.size() != 3 && parts.size() != 4) {
    throw ConfigError("--family: expected kind[:lo:hi[:segments]]");
  }
  try {
    if (parts.size() >= 3) {
      const double lo = std::stod(parts[1]), hi = std::stod(parts[2]);
      if (f.kind == PerturbationFamily::Kind::Stretch) {
        f.lambda_min = lo;
        f.lambda_max = hi;
      } else {
        f.bump_min = lo;
        f.bump_max = hi;
      }
    }
    if (parts.size() == 4) f.segments = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("--family: malformed number in '" + spec + "'");
  }
  return f;
}

void require_converged(bool strict, bool converged, const std::string& what) {
  if (strict && !converged) throw NotConverged(what);
}

// --- subcommands ----------------------------------------------------------------

void cmd_reference(int n, const std::string& grid_spec, const std::string& out_path) {
  const TauGrid grid = parse_grid(grid_spec);
  if (n < 2 || n > 16) throw ConfigError("--n: must lie in [2, 16]");
  const std::string hash = fnv1a_hex("reference n=" + std::to_string(n) + " tau-grid=" + grid_spec);
  std::ostringstream os;
  os << "# " << header_line(hash, 0) << '\n';
  os << "tau,V,A,A0,psi,psi_prime,phi\n";
  for (int k = 0; k < grid.count; ++k) {
    const double f = grid.count == 1 ? 0.0 : static_cast<double>(k) / (grid.count - 1);
    const double tau = k + 1 == grid.count && grid.count > 1 ? grid.hi : (1.0 - f) * grid.lo + f * grid.hi;
    const CapScalars s = cap_scalars({n, tau});
    os << num(tau) << ',' << num(s.volume) << ',' << num(s.lateral_area) << ',' << num(s.base_area) << ','
       << num(s.psi) << ',' << num(s.psi_prime) << ',' << num(s.phi) << '\n';
  }
  write_file_atomic(out_path, os.str());
}

void cmd_energy(const std::string& config_path, const std::string& droplet_path, const std::string& out_path) {
  const RunConfig rc = load_config(config_path);
  const PolyDroplet p = parse_droplet_csv(read_file(droplet_path), *rc.container);
  EnergyBreakdown e;
  try {
    e = gauss_energy(p, *rc.container);
  } catch (const GeometryError& ex) {
    throw ConfigError(std::string("droplet: ") + ex.what());
  }
  ordered j;
  j["header"] = header_json(rc.hash, rc.rng_seed);
  j["energy"] = energy_json(e);
  j["area"] = std::abs(signed_area(p.vertices));
  write_file_atomic(out_path, dump(j));
}

ordered result_json(const RunConfig& rc, const MinimizeResult& r) {
  ordered j;
  j["header"] = header_json(rc.hash, rc.rng_seed);
  j["config"] = ordered::parse(rc.canonical);
  j["energy"] = energy_json(r.energy);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["grad_norm"] = r.grad_norm;
  j["contact_s"] = r.contact_s;
  j["contact_point"] = {r.contact_point.x, r.contact_point.y};
  j["young_residuals"] = r.young_residuals;
  j["monotone"] = r.monotone;
  j["max_volume_error"] = r.max_volume_error;
  j["seed_index"] = r.seed_index;
  ordered seeds = ordered::array();
  for (const auto& s : r.seeds) {
    ordered o;
    o["label"] = s.label;
    o["energy"] = s.energy;
    o["converged"] = s.converged;
    o["wetted"] = s.wetted;
    o["iterations"] = s.iterations;
    o["diagnostic"] = s.diagnostic;
    seeds.push_back(o);
  }
  j["seeds"] = seeds;
  j["note"] = "multi-start local minimizer; global optimality is not certified";
  j["droplet"] = droplet_json(r.droplet);
  return j;
}

void cmd_minimize(const std::string& config_path, const std::string& droplet_out, const std::string& result_out,
                  const std::string& svg_out, int jobs, bool strict) {
  RunConfig rc = load_config(config_path);
  rc.minimize.jobs = jobs;
  const MinimizeResult r = minimize(rc.container, rc.minimize);
  const std::string head = header_line(rc.hash, rc.rng_seed);
  if (!droplet_out.empty()) write_file_atomic(droplet_out, droplet_csv(r.droplet, head));
  if (!result_out.empty()) write_file_atomic(result_out, dump(result_json(rc, r)));
  if (!svg_out.empty()) write_file_atomic(svg_out, droplet_svg(r.droplet, *rc.container, head));
  require_converged(strict, r.converged, "minimize did not converge");
}

void cmd_sweep(const std::string& config_path, const std::string& out_path, int jobs, bool strict) {
  RunConfig rc = load_config(config_path);
  if (rc.masses.empty()) throw ConfigError("masses: required for sweep");
  for (int i = 0; i < rc.container->station_count(); ++i) {
    if (std::abs(rc.container->station_sigma(i)) > 0.9) throw ConfigError("sigma: sweeps require |sigma| <= 0.9");
  }
  rc.minimize.jobs = jobs;
  const auto records = sweep(rc.container, rc.masses, rc.minimize);
  std::ostringstream os;
  os << "# " << header_line(rc.hash, rc.rng_seed) << '\n';
  os << "# multi-start local minimizers; global optimality is not certified\n";
  os << "m,gamma,normalized_gamma,p_m,p_m_x,p_m_y,sigma0,sigma0_local,sigma_gap,diameter,hd_blowup,young_max,"
        "converged,iterations,seed_index\n";
  bool all = true;
  for (const auto& r : records) {
    all = all && r.converged;
    os << num(r.m) << ',' << num(r.gamma) << ',' << num(r.normalized_gamma) << ',' << num(r.p_m) << ','
       << num(r.p_m_point.x) << ',' << num(r.p_m_point.y) << ',' << num(r.sigma0) << ',' << num(r.sigma0_local) << ','
       << num(r.sigma_gap) << ',' << num(r.diameter) << ',' << num(r.hd_blowup) << ',' << num(r.young_max) << ','
       << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.seed_index << '\n';
  }
  write_file_atomic(out_path, os.str());
  require_converged(strict, all, "sweep: at least one mass did not converge");
}

void cmd_stability(double tau, const std::string& family_spec, const std::string& out_path, int samples,
                   std::uint64_t rng_seed, const std::string& form) {
  if (!(tau > -1.0 && tau < 1.0)) throw ConfigError("--tau: must lie in (-1, 1)");
  const PerturbationFamily family = parse_family(family_spec);
  std::vector<std::pair<std::string, StabilityForm>> forms;
  if (form == "half-space" || form == "both") forms.push_back({"half_space", StabilityForm::HalfSpace});
  if (form == "wulff" || form == "both") forms.push_back({"wulff", StabilityForm::Wulff});
  const std::string hash = fnv1a_hex("stability tau=" + num(tau) + " family=" + family_spec +
                                     " samples=" + std::to_string(samples) + " form=" + form);
  ordered j;
  j["header"] = header_json(hash, rng_seed);
  j["tau"] = tau;
  j["family"] = family_spec;
  for (const auto& [name, f] : forms) {
    StabilityResult r;
    try {
      r = stability_probe(tau, family, samples, f, rng_seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    ordered o;
    o["min_ratio"] = r.min_ratio;
    o["positive"] = r.min_ratio > 0.0;
    o["rejected"] = r.rejected;
    ordered list = ordered::array();
    for (const auto& s : r.samples) {
      list.push_back({{"parameter", s.parameter}, {"excess", s.excess}, {"mismatch", s.mismatch}, {"ratio", s.ratio}});
    }
    o["samples"] = list;
    j[name] = o;
  }
  write_file_atomic(out_path, dump(j));
}

void cmd_probe(const std::string& result_path, int trials, double rho0, std::uint64_t rng_seed, bool seed_given,
               const std::string& out_path, std::ostream& out) {
  const std::string text = read_file(result_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    (void)parse_config(text);  // reports line and column
    throw;
  }
  if (!doc.is_object() || !doc.contains("config") || !doc.contains("droplet")) {
    throw ConfigError("result: expected the JSON written by 'minimize --out-result'");
  }
  const RunConfig rc = parse_config(doc["config"].dump());
  const PolyDroplet p = droplet_from_json(doc["droplet"]);
  if (trials <= 0) throw ConfigError("--trials: must be positive");
  if (rho0 <= 0.0) rho0 = 0.5 * diameter(p.vertices);
  const std::uint64_t seed = seed_given ? rng_seed : rc.rng_seed;
  double lambda = 0.0;
  try {
    lambda = almost_minimality_probe(p, *rc.container, trials, rho0, seed);
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("result droplet: ") + e.what());
  }
  ordered j;
  j["header"] = header_json(rc.hash, seed);
  j["trials"] = trials;
  j["rho0"] = rho0;
  j["lambda_hat"] = lambda;
  if (out_path.empty()) {
    out << dump(j);
  } else {
    write_file_atomic(out_path, dump(j));
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sessile capillarity droplets in planar containers"};
  app.name("capdrop");
  app.set_version_flag("--version", std::string("capdrop ") + kVersion + " (config schema " +
                                        std::to_string(kSchemaVersion) + ")");
  int jobs = 1;
  bool strict = false;
  app.add_option("--jobs", jobs, "worker threads for multi-start seeds")->check(CLI::Range(1, 1024));
  app.add_flag("--strict", strict, "exit 3 when a minimization does not converge");
  app.require_subcommand(1);

  auto* ref = app.add_subcommand("reference", "ideal droplet scalars over a tau grid");
  int ref_n = 2;
  std::string ref_grid, ref_out;
  ref->add_option("--n", ref_n, "dimension")->capture_default_str();
  ref->add_option("--tau-grid", ref_grid, "lo:hi:count (inclusive)")->required();
  ref->add_option("--out", ref_out, "CSV output")->required();

  auto* en = app.add_subcommand("energy", "energy breakdown of a droplet CSV");
  std::string en_config, en_droplet, en_out;
  en->add_option("--config", en_config)->required();
  en->add_option("--droplet", en_droplet)->required();
  en->add_option("--out", en_out)->required();

  auto* mn = app.add_subcommand("minimize", "multi-start volume-constrained minimization");
  std::string mn_config, mn_droplet, mn_result, mn_svg;
  mn->add_option("--config", mn_config)->required();
  mn->add_option("--out-droplet", mn_droplet, "droplet CSV");
  mn->add_option("--out-result", mn_result, "result JSON");
  mn->add_option("--svg", mn_svg, "SVG picture");

  auto* sw = app.add_subcommand("sweep", "warm-started mass sweep");
  std::string sw_config, sw_out;
  sw->add_option("--config", sw_config)->required();
  sw->add_option("--out", sw_out)->required();

  auto* st = app.add_subcommand("stability", "quantitative stability probe around K(tau)");
  double st_tau = 0.0;
  std::string st_family = "stretch", st_out, st_form = "both";
  int st_samples = 16;
  std::uint64_t st_seed = 1;
  st->add_option("--tau", st_tau)->required();
  st->add_option("--family", st_family, "stretch[:lo:hi[:segments]] | bump[:lo:hi[:segments]]")->capture_default_str();
  st->add_option("--out", st_out)->required();
  st->add_option("--samples", st_samples)->check(CLI::Range(1, 100000))->capture_default_str();
  st->add_option("--rng-seed", st_seed)->capture_default_str();
  st->add_option("--form", st_form)->check(CLI::IsMember({"half-space", "wulff", "both"}))->capture_default_str();

  auto* pr = app.add_subcommand("probe", "empirical almost-minimality constant of a result");
  std::string pr_result, pr_out;
  int pr_trials = 0;
  double pr_rho0 = 0.0;
  std::uint64_t pr_seed = 0;
  pr->add_option("--result", pr_result)->required();
  pr->add_option("--trials", pr_trials)->required();
  pr->add_option("--rho0", pr_rho0, "competitor radius (default half the droplet diameter)");
  auto* pr_seed_opt = pr->add_option("--rng-seed", pr_seed, "defaults to the config's rng_seed");
  pr->add_option("--out", pr_out, "JSON output (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ref) cmd_reference(ref_n, ref_grid, ref_out);
    if (*en) cmd_energy(en_config, en_droplet, en_out);
    if (*mn) cmd_minimize(mn_config, mn_droplet, mn_result, mn_svg, jobs, strict);
    if (*sw) cmd_sweep(sw_config, sw_out, jobs, strict);
    if (*st) cmd_stability(st_tau, st_family, st_out, st_samples, st_seed, st_form);
    if (*pr) cmd_probe(pr_result, pr_trials, pr_rho0, pr_seed, pr_seed_opt->count() > 0, pr_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace capdrop::cli
