#pragma once

// Brute-force evidence for the Aubin property: grid scan plus Newton
// refinement of stationary sets, and a sampled distance-ratio probe.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aubin/calculus.hpp"

namespace aubin::oracle {

using calculus::DerivativeModel;
using calculus::ToleranceConfig;

struct GridSpec {
  double r_x = 0.5;           // half-width of the box around the center
  int m = 0;                  // points per axis; 0 picks 201 (n=1) or 61 (n=2)
  int newton_cap = 30;
  double tau_newton = 1e-12;
  double accept = 1e-9;       // residual bound for accepted points
  double seed_factor = 100.0; // merit threshold in units of the spacing

  int points_per_axis(int n) const;
  double spacing(int n) const { return 2.0 * r_x / (points_per_axis(n) - 1); }
  void validate() const;
};

struct ProbeConfig {
  double delta0 = 0.1;
  int levels = 4;
  int samples = 64;
  std::optional<double> rho_u;  // defaults to r_x / 2
  double growth = 3.0;
  double blowup = 100.0;
  std::uint64_t seed = 20240611;
  double radial_floor = 1e-4;  // radii are log-uniform in [delta_k * floor_k, delta_k]

  void validate() const;
};

enum class Branch { Interior, Boundary };

const char* to_string(Branch b);

struct KktInfo {
  double residual = std::numeric_limits<double>::infinity();
  Branch branch = Branch::Interior;
  double lambda = 0.0;
  bool mfcq_failure = false;
};

/// KKT residual of (x, w): +inf when infeasible (or F cannot be evaluated),
/// |grad_x f0| strictly inside, and min over lambda >= 0 of
/// |grad_x f0 + lambda grad_x F| on the active band |F| <= tol.act.
KktInfo kkt_info(const DerivativeModel& model, const Vector& x, const Vector& w, const ToleranceConfig& tol);
double kkt_residual(const DerivativeModel& model, const Vector& x, const Vector& w, const ToleranceConfig& tol);

struct StationaryPoint {
  Vector x;
  double residual = 0.0;
  Branch branch = Branch::Interior;
  double lambda = 0.0;
};

struct SampledSet {
  Vector w;
  std::vector<StationaryPoint> points;  // lexicographically sorted
  int seeds = 0;
  int failed = 0;        // refinements that left the box or became non-finite
  int mfcq_skipped = 0;  // active grid points with a vanishing constraint gradient
  bool grid_too_coarse = false;
};

enum class Execution { Serial, Parallel };

/// Stationary points of P_w inside the box of radius grid.r_x around `center`.
SampledSet sample_stationary_set(const DerivativeModel& model, const Vector& w, const Vector& center,
                                 const GridSpec& grid, const ToleranceConfig& tol,
                                 Execution exec = Execution::Parallel);

enum class Flag { Consistent, Violation, Inconclusive };

const char* to_string(Flag f);

struct PairWitness {
  Vector w_from;  // w: the set distances are measured into
  Vector w_to;    // w': the set x' is drawn from
  Vector x;       // x' in S(w') within U
  double distance = 0.0;
  double ratio = 0.0;
};

struct LevelReport {
  double delta = 0.0;
  double worst_ratio = 0.0;
  double median_ratio = 0.0;
  int pairs = 0;         // ordered pairs that produced a ratio
  int empty_events = 0;  // S(w') within U nonempty while S(w) is empty in the box
  std::optional<PairWitness> witness;
};

struct ProbeReport {
  ProbeConfig config;
  GridSpec grid;
  double rho_u = 0.0;
  std::vector<LevelReport> levels;
  Flag flag = Flag::Inconclusive;
  std::vector<std::string> warnings;
  std::vector<SampledSet> sets;  // every sampled set, level by level
};

/// Throws Error(ProbeCapability) when n > 2 or d > 2.
ProbeReport aubin_probe(const DerivativeModel& model, const calculus::EvalPoint& point,
                        const ProbeConfig& cfg, const GridSpec& grid, const ToleranceConfig& tol,
                        Execution exec = Execution::Parallel);

/// Columns w1..wd, x1..xn, residual, branch, lambda; one row per stationary point.
void write_csv(std::ostream& out, const std::vector<SampledSet>& sets, int n);

}  // namespace aubin::oracle
