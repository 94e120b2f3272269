#pragma once

// Shared helpers for the test binaries: fixture loading, hand-rolled random
// generators and oracles that do not reuse the library's own algorithms.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "aubin/conditions.hpp"
#include "aubin/problem_file.hpp"

namespace support {

using aubin::Matrix;
using aubin::Vector;

inline std::string fixture_path(const std::string& name) {
  return std::string(AUBIN_FIXTURE_DIR) + "/" + name + ".prob";
}

inline aubin::io::ProblemFile load(const std::string& name) {
  return aubin::io::load_problem_file(fixture_path(name));
}

/// Problems with a definite stationary reference point.
inline const std::vector<std::string>& analyzable_fixtures() {
  static const std::vector<std::string> names = {
      "interior_quadratic_ball", "bilinear_ellipsoid", "cubic_circle", "quartic_halfline",
      "concave_circle",          "quartic_plane",      "weighted_square",
      "weighted_square_reference_matrices", "deg_ok", "deg_bad"};
  return names;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }
  double normal() { return std::normal_distribution<double>()(eng_); }

  Vector vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
  }

  Matrix matrix(int r, int m) {
    Matrix a(r, m);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = uniform(-1.0, 1.0);
    return a;
  }

  /// r x m matrix of rank at most k (exactly k with probability one).
  Matrix low_rank(int r, int m, int k) {
    if (k == 0) return Matrix::Zero(r, m);
    return matrix(r, k) * matrix(k, m);
  }

  Matrix symmetric_low_rank(int n, int k) {
    if (k == 0) return Matrix::Zero(n, n);
    const Matrix u = matrix(n, k);
    Matrix s = Matrix::Zero(k, k);
    for (int i = 0; i < k; ++i) s(i, i) = coin() ? uniform(0.5, 2.0) : -uniform(0.5, 2.0);
    return u * s * u.transpose();
  }

 private:
  std::mt19937_64 eng_;
};

/// Random expression text over x1..xn, w1..wd. Division, ln and sqrt only see
/// arguments of the form 1 + b^2, so every expression is smooth everywhere.
inline std::string random_expression(Rng& rng, int depth, int n, int d) {
  if (depth == 0 || rng.integer(0, 5) == 0) {
    switch (rng.integer(0, 2)) {
      case 0: return "x" + std::to_string(rng.integer(1, n));
      case 1: return "w" + std::to_string(rng.integer(1, d));
      default: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(0.1, 2.0));
        return buf;
      }
    }
  }
  const auto sub = [&] { return random_expression(rng, depth - 1, n, d); };
  switch (rng.integer(0, 10)) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2:
    case 3: return "(" + sub() + " * " + sub() + ")";
    case 4: return "(" + sub() + ") / (1 + (" + sub() + ")^2)";
    case 5: return "(" + sub() + ")^" + std::to_string(rng.integer(0, 3));
    case 6: return "-(" + sub() + ")";
    case 7: return "sin(" + sub() + ")";
    case 8: return "cos(" + sub() + ")";
    case 9: return rng.coin() ? "ln(1 + (" + sub() + ")^2)" : "sqrt(1 + (" + sub() + ")^2)";
    default: return "exp(sin(" + sub() + "))";
  }
}

/// Central difference of fn along coordinate i.
inline double central(const std::function<double(const Vector&)>& fn, Vector at, int i, double h) {
  Vector plus = at, minus = at;
  plus[i] += h;
  minus[i] -= h;
  return (fn(plus) - fn(minus)) / (2.0 * h);
}

/// Kernel dimension by full-pivoting LU, independent of the SVD-based library routine.
inline int lu_kernel_dim(const Matrix& a, double threshold = 1e-9) {
  if (a.rows() == 0) return static_cast<int>(a.cols());
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(threshold);
  return static_cast<int>(a.cols() - lu.rank());
}

inline Matrix lu_kernel(const Matrix& a, double threshold = 1e-9) {
  if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(threshold);
  if (lu.rank() == a.cols()) return Matrix(a.cols(), 0);
  return lu.kernel();
}

inline Matrix vstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

/// Numerical rank of a set of column samples.
inline int sample_rank(const Matrix& samples, double tol = 1e-6) {
  if (samples.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(samples);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) r += svd.singularValues()[i] > tol * std::sqrt(double(samples.cols()));
  return r;
}

/// Orthonormal basis of the column span of `a`, by SVD.
inline Matrix orth(const Matrix& a) {
  if (a.cols() == 0) return a;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  int r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()[r] > 1e-9) ++r;
  return svd.matrixU().leftCols(r);
}

inline bool admissible(const std::vector<aubin::kernel::ConeConstraint>& cons, const Vector& z) {
  using aubin::kernel::Sense;
  for (const auto& c : cons) {
    const double v = c.functional.dot(z);
    const bool ok = c.sense == Sense::StrictPositive   ? v > 1e-12
                    : c.sense == Sense::StrictNegative ? v < -1e-12
                                                       : v >= -1e-12;
    if (!ok) return false;
  }
  return true;
}

/// Samples the unit sphere of K and of K cut by each constraint hyperplane
/// (closed constraints can bind on a null set) and keeps admissible points.
inline Matrix admissible_samples(Rng& rng, const aubin::kernel::SubspaceBasis& k,
                                 const std::vector<aubin::kernel::ConeConstraint>& cons, int count) {
  std::vector<Matrix> pieces = {k.matrix()};
  for (const auto& c : cons) {
    if (k.is_trivial()) break;
    const Matrix ck = (k.matrix().transpose() * c.functional).transpose();
    const Matrix inner = lu_kernel(ck, 1e-12);
    if (inner.cols() > 0) pieces.push_back(orth(k.matrix() * inner));
  }
  std::vector<Vector> kept;
  for (const Matrix& piece : pieces) {
    if (piece.cols() == 0) continue;
    for (int s = 0; s < count; ++s) {
      Vector t(piece.cols());
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = rng.normal();
      if (t.norm() == 0.0) continue;
      const Vector z = piece * (t / t.norm());
      if (admissible(cons, z)) kept.push_back(z);
    }
  }
  Matrix out(k.ambient(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
  return out;
}

struct SamplingAgreement {
  bool agrees = true;
  bool skipped = false;  // borderline geometry, not decidable by sampling
};

/// cone_span against the span of about 10^4 admissible sphere samples.
inline SamplingAgreement cone_sampling_agreement(Rng& rng, const aubin::kernel::SubspaceBasis& k,
                                                 const std::vector<aubin::kernel::ConeConstraint>& cons,
                                                 const aubin::calculus::ToleranceConfig& tol) {
  const auto r = aubin::kernel::cone_span(k, cons, tol);
  if (r.borderline) return {true, true};
  const Matrix samples = admissible_samples(rng, k, cons, 10000 / (1 + static_cast<int>(cons.size())));
  if (r.empty) return {samples.cols() == 0, false};
  if (!r.span || r.span->dim() != sample_rank(samples)) return {false, false};
  if (samples.cols() == 0) return {true, false};
  const Matrix& v = r.span->matrix();
  return {aubin::max_abs(samples - v * (v.transpose() * samples)) <= 1e-9, false};
}

/// Residual of a membership witness in its branch system, written out from
/// the set definitions rather than through the library.
inline double branch_residual(const aubin::calculus::DerivativeBundle& b, double lambda, const Vector& xp,
                              const Vector& wp, const aubin::conditions::MembershipResult& r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!r.v) return inf;
  const Vector& v = *r.v;
  const auto sup = [](const Vector& e) { return e.size() == 0 ? 0.0 : e.lpNorm<Eigen::Infinity>(); };
  if (r.branch == "Gamma1") return std::max(sup(b.Hxx * v + xp), sup(b.Hwx * v - wp));
  if (!r.gamma || (r.branch != "Gamma2" && r.branch != "GammaHat1")) return inf;
  const double g = *r.gamma;
  const double lam = r.branch == "Gamma2" ? lambda : 0.0;
  double res = sup((b.Hxx + lam * b.Fxx) * v + g * b.gxF + xp);
  res = std::max(res, sup((b.Hwx + lam * b.Fwx) * v + g * b.gwF - wp));
  if (r.branch == "Gamma2") return std::max(res, std::abs(b.gxF.dot(v)));
  return std::max({res, -b.gxF.dot(v), -g});
}

/// C3_5 <=> C3_2 and C3_4; C4_8 => C4_4 and C4_6; C4_13 => C4_14, and C4_13
/// is the conjunction of C4_10..C4_12. Absent ids are skipped.
inline bool implications_hold(const std::vector<aubin::conditions::ConditionReport>& cs) {
  const auto get = [&](const char* id) -> int {
    for (const auto& c : cs)
      if (c.id == id) return c.holds ? 1 : 0;
    return -1;
  };
  bool ok = true;
  if (get("C3_2") >= 0) ok = ok && (get("C3_5") == 1) == (get("C3_2") == 1 && get("C3_4") == 1);
  if (get("C4_8") == 1) ok = ok && get("C4_4") == 1 && get("C4_6") == 1;
  if (get("C4_13") >= 0) {
    ok = ok && (get("C4_13") == 0 || get("C4_14") == 1);
    ok = ok && (get("C4_13") == 1) ==
                   (get("C4_10") == 1 && get("C4_11a") == 1 && get("C4_11b") == 1 && get("C4_12") == 1);
  }
  return ok;
}

/// Bundle for a boundary point with the given multiplier.
inline aubin::calculus::DerivativeBundle random_boundary_bundle(Rng& rng, int n, int d, double lambda) {
  aubin::calculus::DerivativeBundle b;
  b.Fval = 0.0;
  b.gxF = rng.vector(n);
  if (b.gxF.norm() < 0.2) b.gxF[0] += 1.0;
  b.gwF = rng.coin() ? rng.vector(d) : Vector(Vector::Zero(d));
  b.gxf0 = -lambda * b.gxF;
  b.Hxx = rng.symmetric_low_rank(n, rng.integer(0, n));
  b.Fxx = rng.symmetric_low_rank(n, rng.integer(0, n));
  b.Hwx = rng.low_rank(d, n, rng.integer(0, std::min(n, d)));
  b.Fwx = rng.coin() ? rng.low_rank(d, n, rng.integer(0, std::min(n, d))) : Matrix(Matrix::Zero(d, n));
  return b;
}

inline aubin::calculus::DerivativeBundle random_interior_bundle(Rng& rng, int n, int d) {
  aubin::calculus::DerivativeBundle b;
  b.Fval = -1.0;
  b.gxF = rng.vector(n);
  b.gwF = rng.vector(d);
  b.gxf0 = Vector::Zero(n);
  b.Hxx = rng.symmetric_low_rank(n, rng.integer(0, n));
  b.Fxx = Matrix::Zero(n, n);
  b.Hwx = rng.low_rank(d, n, rng.integer(0, std::min(n, d)));
  b.Fwx = Matrix::Zero(d, n);
  return b;
}

}  // namespace support
