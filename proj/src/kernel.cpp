#include "aubin/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "aubin/error.hpp"

namespace aubin::kernel {

SubspaceBasis::SubspaceBasis(int ambient, Matrix columns) : ambient_(ambient), basis_(std::move(columns)) {
  if (basis_.rows() != ambient_ || basis_.cols() > ambient_) {
    throw Error(ErrorCode::DimensionMismatch, "subspace basis does not match ambient dimension");
  }
}

SubspaceBasis SubspaceBasis::trivial(int ambient) { return {ambient, Matrix(ambient, 0)}; }

SubspaceBasis SubspaceBasis::full(int ambient) {
  return {ambient, Matrix::Identity(ambient, ambient)};
}

SubspaceBasis null_space(const Matrix& a, const ToleranceConfig& tol) {
  const auto m = static_cast<int>(a.cols());
  const auto r = static_cast<int>(a.rows());
  if (m == 0) return SubspaceBasis::trivial(0);
  if (r == 0 || max_abs(a) == 0.0) return SubspaceBasis::full(m);

  const Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol.rank * sigma[0] * std::max(r, m);
  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > cutoff) ++rank;
  return {m, svd.matrixV().rightCols(m - rank)};
}

SubspaceBasis stacked_kernel(const std::vector<Matrix>& blocks, const ToleranceConfig& tol) {
  if (blocks.empty()) throw Error(ErrorCode::DimensionMismatch, "no matrices to stack");
  const auto m = blocks.front().cols();
  Eigen::Index rows = 0;
  for (const Matrix& blk : blocks) {
    if (blk.cols() != m) throw Error(ErrorCode::DimensionMismatch, "stacked matrices differ in width");
    rows += blk.rows();
  }
  Matrix stacked(rows, m);
  Eigen::Index at = 0;
  for (const Matrix& blk : blocks) {
    stacked.middleRows(at, blk.rows()) = blk;
    at += blk.rows();
  }
  return null_space(stacked, tol);
}

bool contained_in_kernel(const SubspaceBasis& b, const Matrix& m, const ToleranceConfig& tol) {
  if (m.cols() != b.ambient()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix width differs from subspace ambient dimension");
  }
  if (b.is_trivial() || m.rows() == 0) return true;
  return max_abs(m * b.matrix()) <= tol.rank * (1.0 + max_abs(m));
}

namespace {

struct Normalized {
  Vector c;  // sense is c.z > 0 (strict) or c.z >= 0
  bool strict;
};

std::vector<Normalized> normalize(const std::vector<ConeConstraint>& constraints, int ambient) {
  std::vector<Normalized> out;
  int strict = 0;
  for (const ConeConstraint& cc : constraints) {
    if (cc.functional.size() != ambient) {
      throw Error(ErrorCode::DimensionMismatch, "cone functional does not match ambient dimension");
    }
    const bool is_strict = cc.sense != Sense::NonNegative;
    strict += is_strict;
    out.push_back({cc.sense == Sense::StrictNegative ? Vector(-cc.functional) : cc.functional, is_strict});
  }
  if (out.size() > 2 || strict > 1) {
    throw Error(ErrorCode::UnsupportedConePattern,
                "at most two sign constraints with at most one strict are supported");
  }
  // strict constraint first
  if (out.size() == 2 && out[1].strict) std::swap(out[0], out[1]);
  return out;
}

struct Geometry {
  bool zero_c, zero_e, negative_collinear, borderline;
};

/// Zero and negative-collinearity tests for a pair of restricted functionals.
Geometry classify_pair(const Vector& ck, double c_norm, const Vector& ek, double e_norm, double tau) {
  const double nc = ck.norm(), ne = ek.norm();
  const double zc = tau * std::max(1.0, c_norm), ze = tau * std::max(1.0, e_norm);
  Geometry g{nc <= zc, ne <= ze, false, false};
  g.borderline = (nc > zc && nc <= 1e3 * zc) || (ne > ze && ne <= 1e3 * ze);
  if (!g.zero_c && !g.zero_e) {
    const double cosine = ck.dot(ek) / (nc * ne);
    g.negative_collinear = cosine <= -(1.0 - tau);
    const double gap = std::abs(1.0 - std::abs(cosine));
    g.borderline = g.borderline || (gap > tau && gap <= 1e3 * tau);
  }
  return g;
}

}  // namespace

ConeSpanResult cone_span(const SubspaceBasis& k, const std::vector<ConeConstraint>& constraints,
                         const ToleranceConfig& tol) {
  if (constraints.empty()) {
    throw Error(ErrorCode::UnsupportedConePattern, "cone_span needs at least one constraint");
  }
  const std::vector<Normalized> cons = normalize(constraints, k.ambient());
  const Matrix& basis = k.matrix();

  ConeSpanResult result;
  const auto spans = [&](SubspaceBasis s) {
    result.empty = false;
    result.span = std::move(s);
    return result;
  };
  const auto empty = [&]() {
    result.empty = true;
    result.span.reset();
    return result;
  };

  const Vector ck = basis.transpose() * cons[0].c;
  if (cons.size() == 1) {
    const double nc = ck.norm(), zc = tol.col * std::max(1.0, cons[0].c.norm());
    result.borderline = nc > zc && nc <= 1e3 * zc;
    if (cons[0].strict && nc <= zc) return empty();
    return spans(k);
  }

  const Vector ek = basis.transpose() * cons[1].c;
  const Geometry g = classify_pair(ck, cons[0].c.norm(), ek, cons[1].c.norm(), tol.col);
  result.borderline = g.borderline;

  if (cons[0].strict) {
    if (g.zero_c || g.negative_collinear) return empty();
    return spans(k);
  }
  // two non-negative constraints: 0 always qualifies
  if (g.negative_collinear) {
    const Matrix row = ek.transpose();
    const SubspaceBasis inner = null_space(row, tol);
    return spans(SubspaceBasis(k.ambient(), basis * inner.matrix()));
  }
  return spans(k);
}

namespace {

/// Target for a constraint value currently at `alpha`.
double target_for(double alpha, bool strict, double eps) {
  const bool comfortable = strict ? alpha > eps : alpha >= 0.0;
  return comfortable ? alpha : 1.0;
}

}  // namespace

Feasibility affine_feasibility(const Matrix& m, const Vector& b,
                               const std::vector<ConeConstraint>& constraints,
                               const ToleranceConfig& tol) {
  if (m.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side length mismatch");
  const auto cols = static_cast<int>(m.cols());
  const std::vector<Normalized> cons =
      constraints.empty() ? std::vector<Normalized>{} : normalize(constraints, cols);

  Vector z0 = Vector::Zero(cols);
  if (m.rows() > 0 && cols > 0) z0 = m.completeOrthogonalDecomposition().solve(b);
  const double residual = (m * z0 - b).norm();
  Feasibility out;
  if (residual > tol.stat * (1.0 + b.norm())) return out;

  const SubspaceBasis nulls = null_space(m.rows() > 0 ? m : Matrix(0, cols), tol);
  const Matrix& N = nulls.matrix();

  struct Reduced {
    double alpha;
    Vector beta;
    bool strict;
    double eps;
    bool beta_zero;
  };
  std::vector<Reduced> red;
  for (const Normalized& c : cons) {
    Reduced r{c.c.dot(z0), N.transpose() * c.c, c.strict, 0.0, false};
    r.eps = tol.stat * (1.0 + c.c.norm() * (1.0 + z0.norm()));
    r.beta_zero = r.beta.norm() <= tol.col * std::max(1.0, c.c.norm());
    red.push_back(std::move(r));
  }
  const auto satisfied = [](const Reduced& r) { return r.strict ? r.alpha > r.eps : r.alpha >= -r.eps; };
  const auto finish = [&](const Vector& t) {
    out.feasible = true;
    out.witness = N.cols() > 0 ? Vector(z0 + N * t) : z0;
    return out;
  };
  const Vector no_move = Vector::Zero(N.cols());

  // Shift along a single reduced functional so its value reaches the target.
  const auto along = [&](const Reduced& r) -> Vector {
    const double shift = target_for(r.alpha, r.strict, r.eps) - r.alpha;
    return r.beta * (shift / r.beta.squaredNorm());
  };

  if (red.empty()) return finish(no_move);

  if (red.size() == 1) {
    const Reduced& r = red[0];
    if (r.beta_zero) return satisfied(r) ? finish(no_move) : out;
    return finish(along(r));
  }

  const Reduced& r1 = red[0];
  const Reduced& r2 = red[1];
  if (r1.beta_zero && r2.beta_zero) return satisfied(r1) && satisfied(r2) ? finish(no_move) : out;
  if (r1.beta_zero) return satisfied(r1) ? finish(along(r2)) : out;
  if (r2.beta_zero) return satisfied(r2) ? finish(along(r1)) : out;

  const double n1 = r1.beta.norm(), n2 = r2.beta.norm();
  const double cosine = r1.beta.dot(r2.beta) / (n1 * n2);
  const double t1 = target_for(r1.alpha, r1.strict, r1.eps);
  const double t2 = target_for(r2.alpha, r2.strict, r2.eps);

  if (std::abs(cosine) < 1.0 - tol.col) {
    // independent directions: hit both targets exactly
    Eigen::Matrix2d gram;
    gram << r1.beta.squaredNorm(), r1.beta.dot(r2.beta), r1.beta.dot(r2.beta), r2.beta.squaredNorm();
    const Eigen::Vector2d coef = gram.inverse() * Eigen::Vector2d(t1 - r1.alpha, t2 - r2.alpha);
    return finish(coef[0] * r1.beta + coef[1] * r2.beta);
  }

  // collinear: parametrize by s = beta1 . t, so value2 moves by mu * s
  const double mu = (cosine > 0.0 ? 1.0 : -1.0) * n2 / n1;
  const auto move = [&](double s) -> Vector { return r1.beta * (s / r1.beta.squaredNorm()); };
  if (mu > 0.0) {
    const double s = std::max({0.0, t1 - r1.alpha, (t2 - r2.alpha) / mu});
    return finish(move(s));
  }
  const double lo = -r1.alpha;        // value1 = alpha1 + s  needs s >(=) lo
  const double hi = r2.alpha / -mu;   // value2 = alpha2 - |mu| s needs s <(=) hi
  const double slack = std::max(r1.eps, r2.eps / -mu);
  const bool any_strict = r1.strict || r2.strict;
  if (any_strict ? !(hi - lo > slack) : !(hi - lo >= -slack)) return out;
  return finish(move(hi > lo ? 0.5 * (lo + hi) : lo));
}

}  // namespace aubin::kernel
