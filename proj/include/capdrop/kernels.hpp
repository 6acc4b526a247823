#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version and an
// OpenMP version; both return bit-identical results for the same input.

#include <cstdint>
#include <span>

#include "capdrop/geometry.hpp"

namespace capdrop {

enum class Exec { Serial, Parallel };

namespace kernels {

/// sup over x in `from` of dist(x, `to`), exact up to `tol` (branch and bound
/// on each segment of `from` with the Lipschitz and per-segment convexity bounds).
double one_sided_hausdorff_serial(std::span<const Vec2> from, std::span<const Vec2> to, double tol);
double one_sided_hausdorff_omp(std::span<const Vec2> from, std::span<const Vec2> to, double tol);

/// Pixel-center count of poly XOR cap on a res x res raster covering both,
/// where cap = disk(center, radius) intersected with {y > y_cut}. Returns area.
double raster_symdiff_cap_serial(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut,
                                 int res);
double raster_symdiff_cap_omp(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut,
                              int res);

/// True when no two non-adjacent edges touch and no edge is degenerate.
bool is_simple_serial(std::span<const Vec2> poly);
bool is_simple_omp(std::span<const Vec2> poly);

}  // namespace kernels

double one_sided_hausdorff(std::span<const Vec2> from, std::span<const Vec2> to, double tol,
                           Exec exec = Exec::Parallel);
double raster_symdiff_cap(std::span<const Vec2> poly, Vec2 center, double radius, double y_cut,
                          int res, Exec exec = Exec::Parallel);
bool is_simple_polygon(std::span<const Vec2> poly, Exec exec = Exec::Parallel);

}  // namespace capdrop
