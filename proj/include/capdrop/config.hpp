#pragma once

// JSON run configuration and droplet file formats.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "capdrop/minimizer.hpp"

namespace capdrop {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Validation failure; the message starts with the offending field path or,
/// for syntax errors, "line L, column C".
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  ContainerPtr container;
  MinimizeConfig minimize;
  std::vector<double> masses;  // empty unless given
  std::uint64_t rng_seed = 1;
  std::string canonical;  // sorted-key dump of the parsed document
  std::string hash;       // 16 hex digits, FNV-1a of `canonical`
};

/// Schema:
///   container: {kind: disk, radius, center?} | {kind: ellipse, semi_x, semi_y, center?}
///            | {kind: stadium, half_length, radius} | {kind: samples, points: [[x, y], ...]}
///            plus optional stations (default 4096)
///   sigma:     {kind: const, value} | {kind: cosine, base, amplitude, phase?} | {kind: table, values}
///   g:         {kind: zero} | {kind: linear, c0?, cx?, cy?}
///            | {kind: grid, origin, dx, dy, values: [[...], ...]}      (optional, default zero)
///   minimize:  MinimizeConfig fields by name; seeds as
///              {kind: boundary, s, tau?} | {kind: interior, center} | {kind: random_boundary, count}
///   masses:    [m1, m2, ...]
///   rng_seed:  integer
/// Unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

std::string fnv1a_hex(std::string_view bytes);

/// Whole file into a string; ConfigError when it cannot be opened.
std::string read_file(const std::string& path);
/// Write to path + ".tmp" and rename over path.
void write_file_atomic(const std::string& path, const std::string& contents);

/// CSV with columns x,y,contact_flag,s after '#' comment lines.
std::string droplet_csv(const PolyDroplet& p, const std::string& header);
/// Accepts 3 or 4 columns; without s, contact vertices are projected onto
/// the wall and their arc lengths unwrapped along the run.
PolyDroplet parse_droplet_csv(std::string_view text, const Container& c);

/// SVG with the container outline and the droplet polygon.
std::string droplet_svg(const PolyDroplet& p, const Container& c, const std::string& header);

}  // namespace capdrop
