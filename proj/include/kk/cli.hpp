#pragma once

#include <exception>
#include <iosfwd>
#include <string>

#include "kk/io.hpp"

namespace kk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitNumeric = 70;

// Default number of random group elements per point for gauge-check.
inline constexpr int kGaugeCheckElements = 8;

io::RunReport cmd_validate(const io::ProblemSpec& problem);
io::RunReport cmd_identities(int frame_dim, int trials, std::uint64_t seed);
io::RunReport cmd_curvature(const io::ProblemSpec& problem);
io::RunReport cmd_lift(const io::ProblemSpec& problem);
io::RunReport cmd_gauge_check(const io::ProblemSpec& problem, int elements = kGaugeCheckElements);

std::string to_csv(const io::RunReport& report);

// Maps library and IO errors onto the documented exit codes.
int exit_code_for(const std::exception& e);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kk::cli
