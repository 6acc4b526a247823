#pragma once

// Command-line front end: reference, energy, minimize, sweep, stability, probe.

#include <iostream>

namespace capdrop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNotConverged = 3;

int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace capdrop::cli
