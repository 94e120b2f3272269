#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>

#include "aubin/error.hpp"
#include "aubin/oracle.hpp"
#include "refine.hpp"

namespace aubin::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridValue {
  double interior_merit = kInf;
  double boundary_merit = kInf;
  double lambda0 = 0.0;  // clamped least-squares multiplier
  double g = kInf;       // derivative of f0 (n = 1 only)
  double F = kInf;
  bool mfcq = false;
};

GridValue evaluate_grid_point(const DerivativeModel& model, const Vector& x, const Vector& w,
                              const ToleranceConfig& tol) {
  GridValue v;
  try {
    v.F = model.F(x, w);
    const Vector g = model.grad_x_f0(x, w);
    const Vector gF = model.grad_x_F(x, w);
    if (!std::isfinite(v.F)) return v;
    v.g = g[0];
    if (v.F <= tol.act) v.interior_merit = g.norm();
    const double norm_gF = gF.norm();
    if (norm_gF > tol.zero) {
      v.lambda0 = std::max(0.0, -gF.dot(g) / (norm_gF * norm_gF));
      v.boundary_merit = std::abs(v.F) / norm_gF + (g + v.lambda0 * gF).norm();
    } else if (std::abs(v.F) <= tol.act) {
      v.mfcq = true;
    }
  } catch (const Error&) {
    return GridValue{};
  }
  return v;
}

/// Bisection to the last representable bracket of a sign change of fn.
template <class Fn>
double bisect(double lo, double hi, Fn&& fn) {
  double flo = fn(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(fn(lo)) <= std::abs(fn(hi)) ? lo : hi;
}

bool lex_less(const StationaryPoint& a, const StationaryPoint& b) {
  return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(), b.x.data() + b.x.size());
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::Interior ? "interior" : "boundary"; }

int GridSpec::points_per_axis(int n) const {
  if (m > 0) return m;
  return n == 1 ? 201 : 61;
}

void GridSpec::validate() const {
  if (!(r_x > 0.0)) throw Error(ErrorCode::Input, "grid radius must be positive");
  if (m != 0 && (m < 3 || m % 2 == 0)) throw Error(ErrorCode::Input, "grid points per axis must be odd and >= 3");
  if (newton_cap < 1 || !(tau_newton > 0.0) || !(accept > 0.0) || !(seed_factor > 0.0)) {
    throw Error(ErrorCode::Input, "refinement settings must be positive");
  }
}

void ProbeConfig::validate() const {
  if (!(delta0 > 0.0) || levels < 2 || samples < 1 || !(growth > 0.0) || !(blowup > 0.0) ||
      !(radial_floor > 0.0 && radial_floor < 1.0) || (rho_u && !(*rho_u > 0.0))) {
    throw Error(ErrorCode::Input, "probe settings must be positive (radial floor in (0, 1), at least two levels)");
  }
}

KktInfo kkt_info(const DerivativeModel& model, const Vector& x, const Vector& w, const ToleranceConfig& tol) {
  KktInfo info;
  try {
    const double F = model.F(x, w);
    if (!(F <= tol.act)) return info;
    const Vector g = model.grad_x_f0(x, w);
    if (F < -tol.act) {
      info.residual = g.norm();
      return info;
    }
    const Vector gF = model.grad_x_F(x, w);
    const double norm_gF = gF.norm();
    info.branch = Branch::Boundary;
    if (!(norm_gF > tol.zero)) {
      info.mfcq_failure = true;
      return info;
    }
    info.lambda = std::max(0.0, -gF.dot(g) / (norm_gF * norm_gF));
    info.residual = (g + info.lambda * gF).norm();
  } catch (const Error&) {
    return KktInfo{};
  }
  if (!std::isfinite(info.residual)) info.residual = kInf;
  return info;
}

double kkt_residual(const DerivativeModel& model, const Vector& x, const Vector& w, const ToleranceConfig& tol) {
  return kkt_info(model, x, w, tol).residual;
}

SampledSet sample_stationary_set(const DerivativeModel& model, const Vector& w, const Vector& center,
                                 const GridSpec& grid, const ToleranceConfig& tol, Execution exec) {
  const int n = model.n();
  if (n > 2) throw Error(ErrorCode::ProbeCapability, "stationary-set sampling supports n <= 2");
  if (center.size() != n || w.size() != model.d()) {
    throw Error(ErrorCode::DimensionMismatch, "sampling point does not match problem dimensions");
  }
  grid.validate();
  const int m = grid.points_per_axis(n);
  const double h = grid.spacing(n);
  const int total = n == 1 ? m : m * m;
  const bool parallel = exec == Execution::Parallel;

  const auto point_at = [&](int idx) {
    Vector x(n);
    if (n == 1) {
      x[0] = center[0] - grid.r_x + idx * h;
    } else {
      x[0] = center[0] - grid.r_x + (idx / m) * h;
      x[1] = center[1] - grid.r_x + (idx % m) * h;
    }
    return x;
  };

  std::vector<GridValue> values(total);
#pragma omp parallel for schedule(static) if (parallel)
  for (int idx = 0; idx < total; ++idx) values[idx] = evaluate_grid_point(model, point_at(idx), w, tol);

  SampledSet out;
  out.w = w;
  for (const GridValue& v : values) out.mfcq_skipped += v.mfcq;

  // Seeds: discrete local minima of the merit over the 3^n neighbourhood.
  const double threshold = grid.seed_factor * h;
  const auto merit = [&](int idx) { return std::min(values[idx].interior_merit, values[idx].boundary_merit); };
  std::vector<int> seeds;
  for (int idx = 0; idx < total; ++idx) {
    const double mu = merit(idx);
    if (!(mu <= threshold)) continue;
    bool minimal = true, strict_somewhere = false;
    const int i = n == 1 ? idx : idx / m, j = n == 1 ? 0 : idx % m;
    for (int di = -1; di <= 1 && minimal; ++di) {
      for (int dj = (n == 1 ? 0 : -1); dj <= (n == 1 ? 0 : 1); ++dj) {
        const int ni = i + di, nj = j + dj;
        if ((di == 0 && dj == 0) || ni < 0 || ni >= m || nj < 0 || nj >= (n == 1 ? 1 : m)) continue;
        const double other = merit(n == 1 ? ni : ni * m + nj);
        if (other < mu) {
          minimal = false;
          break;
        }
        strict_somewhere = strict_somewhere || other > mu;
      }
    }
    if (minimal && (strict_somewhere || mu <= grid.accept)) seeds.push_back(idx);
  }
  out.seeds = static_cast<int>(seeds.size());

  std::vector<StationaryPoint> candidates;
  const auto accept_point = [&](const Vector& x, std::optional<double> boundary_lambda) -> std::optional<StationaryPoint> {
    if ((x - center).cwiseAbs().maxCoeff() > grid.r_x + 0.5 * h) return std::nullopt;
    const KktInfo k = kkt_info(model, x, w, tol);
    if (!(k.residual <= grid.accept)) return std::nullopt;
    StationaryPoint p{x, k.residual, k.branch, k.lambda};
    if (boundary_lambda) {
      double F = kInf;
      try {
        F = model.F(x, w);
      } catch (const Error&) {
      }
      if (!(std::abs(F) <= grid.accept) || *boundary_lambda < -tol.zero) return std::nullopt;
      p.branch = Branch::Boundary;
      p.lambda = std::max(0.0, *boundary_lambda);
    }
    return p;
  };

  if (n == 1) {
    // Sign changes between neighbouring grid points, refined to full precision.
    const auto g_at = [&](double t) {
      Vector x(1);
      x[0] = t;
      try {
        return model.grad_x_f0(x, w)[0];
      } catch (const Error&) {
        return kInf;
      }
    };
    const auto F_at = [&](double t) {
      Vector x(1);
      x[0] = t;
      try {
        return model.F(x, w);
      } catch (const Error&) {
        return kInf;
      }
    };
    for (int idx = 0; idx < total; ++idx) {
      const GridValue& a = values[idx];
      const double xa = point_at(idx)[0];
      const bool has_next = idx + 1 < total;
      const GridValue& b = has_next ? values[idx + 1] : a;
      const double xb = xa + h;
      Vector root(1);
      if (a.F <= tol.act && std::isfinite(a.g)) {
        if (a.g == 0.0) {
          root[0] = xa;
          if (auto p = accept_point(root, std::nullopt)) candidates.push_back(*p);
        } else if (has_next && b.F <= tol.act && std::isfinite(b.g) && (a.g < 0.0) != (b.g < 0.0) && b.g != 0.0) {
          root[0] = bisect(xa, xb, g_at);
          if (auto p = accept_point(root, std::nullopt)) candidates.push_back(*p);
        }
      }
      if (std::isfinite(a.F)) {
        double xr = kInf;
        if (a.F == 0.0) {
          xr = xa;
        } else if (has_next && std::isfinite(b.F) && b.F != 0.0 && (a.F < 0.0) != (b.F < 0.0)) {
          xr = bisect(xa, xb, F_at);
        }
        if (std::isfinite(xr)) {
          root[0] = xr;
          try {
            const double gF = model.grad_x_F(root, w)[0];
            if (std::abs(gF) > tol.zero) {
              const double lambda = -model.grad_x_f0(root, w)[0] / gF;
              if (auto p = accept_point(root, lambda)) candidates.push_back(*p);
            }
          } catch (const Error&) {
          }
        }
      }
    }
  }

  // Newton refinement, one slot per seed and branch.
  struct Refined {
    std::optional<StationaryPoint> interior, boundary;
    int failures = 0;
  };
  // Only the branch with the smaller merit counts, and a stall at a
  // non-stationary merit minimum is not a failure; leaving the box or blowing up is.
  const auto diverged = [&](const detail::NewtonResult& res) {
    return !std::isfinite(res.residual) || !res.x.allFinite() ||
           (res.x - center).cwiseAbs().maxCoeff() > grid.r_x + 0.5 * h;
  };
  std::vector<Refined> refined(seeds.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const GridValue& v = values[seeds[s]];
    const Vector x0 = point_at(seeds[s]);
    Refined& r = refined[s];
    const bool prefer_interior = v.interior_merit <= v.boundary_merit;
    if (v.interior_merit <= threshold) {
      const auto res = detail::newton_interior(model, x0, w, grid);
      if (res.residual <= grid.accept) {
        r.interior = accept_point(res.x, std::nullopt);
      } else if (diverged(res) && prefer_interior) {
        ++r.failures;
      }
    }
    if (v.boundary_merit <= threshold) {
      const auto res = detail::newton_boundary(model, x0, v.lambda0, w, grid);
      if (res.residual <= grid.accept) {
        r.boundary = accept_point(res.x, res.lambda);
      } else if (diverged(res) && !prefer_interior) {
        ++r.failures;
      }
    }
  }
  for (const Refined& r : refined) {
    out.failed += r.failures;
    if (r.interior) candidates.push_back(*r.interior);
    if (r.boundary) candidates.push_back(*r.boundary);
  }
  out.grid_too_coarse = out.failed * 10 > out.seeds;

  // Deduplicate within half a grid spacing, first occurrence wins.
  std::map<std::pair<long, long>, std::vector<std::size_t>> buckets;
  const auto cell = [&](const Vector& x, int axis) {
    return static_cast<long>(std::floor((x[axis] - center[axis]) / h));
  };
  for (const StationaryPoint& c : candidates) {
    const long ci = cell(c.x, 0), cj = n == 2 ? cell(c.x, 1) : 0;
    bool duplicate = false;
    for (long di = -1; di <= 1 && !duplicate; ++di) {
      for (long dj = (n == 2 ? -1 : 0); dj <= (n == 2 ? 1 : 0) && !duplicate; ++dj) {
        const auto it = buckets.find({ci + di, cj + dj});
        if (it == buckets.end()) continue;
        for (std::size_t k : it->second) {
          if ((out.points[k].x - c.x).norm() <= 0.5 * h) {
            duplicate = true;
            break;
          }
        }
      }
    }
    if (duplicate) continue;
    buckets[{ci, cj}].push_back(out.points.size());
    out.points.push_back(c);
  }
  std::sort(out.points.begin(), out.points.end(), lex_less);
  return out;
}

}  // namespace aubin::oracle
