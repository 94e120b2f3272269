#pragma once

// Sectioned key = value problem files:
//
//   [problem]                 [point]
//   n = 1                     x = [1]
//   d = 1                     w = [1]
//   f0 = "-x1^2 + (w1-1)*x1"
//   F = "x1^2 + w1^2 - 2"
//
// plus optional [tolerances] and [probe] sections. '#' starts a comment.

#include <string>
#include <string_view>
#include <vector>

#include "aubin/calculus.hpp"
#include "aubin/oracle.hpp"

namespace aubin::io {

struct ProblemFile {
  std::string f0_source;
  std::string F_source;
  expr::ProblemSpec spec;
  calculus::EvalPoint point;
  calculus::ToleranceConfig tol;
  oracle::ProbeConfig probe;
  oracle::GridSpec grid;
};

/// Throws Error(Input) (or ParseError for expressions) with the line number.
ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::string& path);

/// Keys tau_act, tau_zero, tau_stat, tau_rank, tau_col.
void set_tolerance(calculus::ToleranceConfig& tol, std::string_view key, double value);

/// Parses "k=v" pairs separated by commas or whitespace.
void apply_tolerance_overrides(calculus::ToleranceConfig& tol, std::string_view overrides);

/// Comma-separated reals, optionally bracketed.
std::vector<double> parse_real_list(std::string_view text);

}  // namespace aubin::io
