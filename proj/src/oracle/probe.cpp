#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "aubin/error.hpp"
#include "aubin/oracle.hpp"
#include "refine.hpp"

namespace aubin::oracle {

namespace {

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0, scale = 1.0 / base;
  for (; index > 0; index /= base, scale /= base) result += (index % base) * scale;
  return result;
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double frac(double v) { return v - std::floor(v); }

struct PairOutcome {
  bool has_ratio = false;
  bool empty_event = false;
  double ratio = 0.0;
  double distance = 0.0;
  Vector x;
};

/// Distance from x' to S(w): nearest sampled point, improved by a Newton
/// polish from x' when the sample is within a few spacings. The polish only
/// counts if it converged in both residual and step.
double set_distance(const DerivativeModel& model, const Vector& xp, const SampledSet& s,
                    const GridSpec& grid, const ToleranceConfig& tol, double h) {
  double best = std::numeric_limits<double>::infinity();
  for (const StationaryPoint& p : s.points) best = std::min(best, (p.x - xp).norm());
  if (best <= 4.0 * h && best > 0.0) {
    const auto consider = [&](const detail::NewtonResult& r, bool boundary) {
      if (!r.converged) return;
      const KktInfo k = kkt_info(model, r.x, s.w, tol);
      if (!(k.residual <= grid.accept)) return;
      if (boundary) {
        if (r.lambda < -tol.zero) return;
        try {
          if (!(std::abs(model.F(r.x, s.w)) <= grid.accept)) return;
        } catch (const Error&) {
          return;
        }
      }
      best = std::min(best, (r.x - xp).norm());
    };
    consider(detail::newton_interior(model, xp, s.w, grid), false);
    const KktInfo start = kkt_info(model, xp, s.w, tol);
    consider(detail::newton_boundary(model, xp, start.lambda, s.w, grid), true);
  }
  return best;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

const char* to_string(Flag f) {
  switch (f) {
    case Flag::Consistent: return "Consistent";
    case Flag::Violation: return "Violation";
    case Flag::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ProbeReport aubin_probe(const DerivativeModel& model, const calculus::EvalPoint& point,
                        const ProbeConfig& cfg, const GridSpec& grid, const ToleranceConfig& tol,
                        Execution exec) {
  const int n = model.n(), d = model.d();
  if (n > 2 || d > 2) {
    throw Error(ErrorCode::ProbeCapability, "the probe supports n <= 2 and d <= 2 (got n = " +
                                                std::to_string(n) + ", d = " + std::to_string(d) + ")");
  }
  if (point.x.size() != n || point.w.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "reference point does not match problem dimensions");
  }
  cfg.validate();
  grid.validate();
  tol.validate();

  ProbeReport report;
  report.config = cfg;
  report.grid = grid;
  report.rho_u = cfg.rho_u.value_or(0.5 * grid.r_x);
  const double h = grid.spacing(n);
  const bool parallel = exec == Execution::Parallel;
  const Execution inner = Execution::Serial;

  // Halton points in bases 2 and 3 with a seeded Cranley-Patterson shift.
  std::mt19937_64 rng(cfg.seed);
  const double shift1 = unit_from_bits(rng()), shift2 = unit_from_bits(rng());
  std::vector<std::pair<double, double>> units(cfg.samples);
  for (int i = 0; i < cfg.samples; ++i) {
    units[i] = {frac(radical_inverse(i + 1, 2) + shift1), frac(radical_inverse(i + 1, 3) + shift2)};
  }

  const SampledSet base = sample_stationary_set(model, point.w, point.x, grid, tol, exec);
  const int count = cfg.samples + 1;

  int coarse = 0, mfcq = 0;
  for (int k = 0; k < cfg.levels; ++k) {
    const double delta = cfg.delta0 * std::ldexp(1.0, -k);
    const double floor = cfg.radial_floor * std::ldexp(1.0, -k);

    std::vector<Vector> ws(count, point.w);
    for (int i = 1; i < count; ++i) {
      const auto [u1, u2] = units[i - 1];
      const double r = delta * std::pow(floor, u2);
      if (d == 1) {
        ws[i][0] += u1 < 0.5 ? -r : r;
      } else {
        const double angle = 2.0 * std::numbers::pi * u1;
        ws[i][0] += r * std::cos(angle);
        ws[i][1] += r * std::sin(angle);
      }
    }

    std::vector<SampledSet> sets(count);
    sets[0] = base;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 1; i < count; ++i) sets[i] = sample_stationary_set(model, ws[i], point.x, grid, tol, inner);

    std::vector<std::vector<Vector>> local(count);
    for (int i = 0; i < count; ++i) {
      for (const StationaryPoint& p : sets[i].points) {
        if ((p.x - point.x).norm() <= report.rho_u) local[i].push_back(p.x);
      }
      coarse += sets[i].grid_too_coarse;
      mfcq += sets[i].mfcq_skipped > 0;
    }

    // Ordered pairs (a, b): distances from S(w_b) within U into S(w_a).
    const int total = count * count;
    std::vector<PairOutcome> outcomes(total);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int idx = 0; idx < total; ++idx) {
      const int a = idx / count, b = idx % count;
      if (a == b || local[b].empty()) continue;
      PairOutcome& o = outcomes[idx];
      if (sets[a].points.empty()) {
        o.empty_event = true;
        continue;
      }
      const double dw = (ws[b] - ws[a]).norm();
      if (!(dw > 0.0)) continue;
      o.has_ratio = true;
      for (const Vector& xp : local[b]) {
        const double dist = set_distance(model, xp, sets[a], grid, tol, h);
        if (o.x.size() == 0 || dist / dw > o.ratio) {
          o.ratio = dist / dw;
          o.distance = dist;
          o.x = xp;
        }
      }
    }

    LevelReport level;
    level.delta = delta;
    std::vector<double> ratios;
    for (int idx = 0; idx < total; ++idx) {
      const PairOutcome& o = outcomes[idx];
      level.empty_events += o.empty_event;
      if (!o.has_ratio) continue;
      ratios.push_back(o.ratio);
      if (!level.witness || o.ratio > level.worst_ratio) {
        level.worst_ratio = o.ratio;
        level.witness = PairWitness{ws[idx / count], ws[idx % count], o.x, o.distance, o.ratio};
      }
    }
    level.pairs = static_cast<int>(ratios.size());
    level.median_ratio = median(std::move(ratios));
    report.levels.push_back(std::move(level));
    for (int i = 1; i < count; ++i) report.sets.push_back(std::move(sets[i]));
    if (k == 0) report.sets.insert(report.sets.begin(), base);
  }

  if (coarse > 0) {
    report.warnings.push_back("GridTooCoarse: refinement failed for more than 10% of seeds in " +
                              std::to_string(coarse) + " sampled sets");
  }
  if (mfcq > 0) {
    report.warnings.push_back("MFCQ fails at active grid points in " + std::to_string(mfcq) + " sampled sets");
  }

  const auto& L = report.levels;
  const bool every_level_empty =
      std::all_of(L.begin(), L.end(), [](const LevelReport& l) { return l.empty_events > 0; });
  const bool no_empty = std::none_of(L.begin(), L.end(), [](const LevelReport& l) { return l.empty_events > 0; });
  const bool all_ratios = std::all_of(L.begin(), L.end(), [](const LevelReport& l) { return l.pairs > 0; });
  bool growing = all_ratios;
  for (std::size_t k = 1; k < L.size() && growing; ++k) growing = L[k].worst_ratio >= L[k - 1].worst_ratio;
  growing = growing && L.back().worst_ratio >= cfg.growth * L.front().worst_ratio &&
            L.back().worst_ratio > cfg.blowup;
  const double reference = 10.0 * L.front().median_ratio;
  const bool bounded = all_ratios && std::all_of(L.begin(), L.end(), [&](const LevelReport& l) {
                         return l.worst_ratio <= reference;
                       });

  if (growing || every_level_empty) {
    report.flag = Flag::Violation;
  } else if (no_empty && bounded) {
    report.flag = Flag::Consistent;
  } else {
    report.flag = Flag::Inconclusive;
  }
  return report;
}

void write_csv(std::ostream& out, const std::vector<SampledSet>& sets, int n) {
  const Eigen::Index d = sets.empty() ? 0 : sets.front().w.size();
  const Eigen::Index nx = n;
  for (Eigen::Index i = 1; i <= d; ++i) out << 'w' << i << ',';
  for (Eigen::Index j = 1; j <= nx; ++j) out << 'x' << j << ',';
  out << "residual,branch,lambda\n";
  const auto old_precision = out.precision(17);
  for (const SampledSet& s : sets) {
    for (const StationaryPoint& p : s.points) {
      for (Eigen::Index i = 0; i < d; ++i) out << s.w[i] << ',';
      for (Eigen::Index j = 0; j < p.x.size(); ++j) out << p.x[j] << ',';
      out << p.residual << ',' << to_string(p.branch) << ',' << p.lambda << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace aubin::oracle
