#pragma once

// Derivatives at the reference pair, point classification and the Lagrange
// multiplier of the single functional constraint.

#include <string>
#include <vector>

#include "aubin/expr.hpp"
#include "aubin/linalg.hpp"

namespace aubin::calculus {

struct ToleranceConfig {
  double act = 1e-8;   // activity of F
  double zero = 1e-8;  // scalar zero (multiplier, MFCQ)
  double stat = 1e-7;  // stationarity residual
  double rank = 1e-9;  // singular value cutoff, relative
  double col = 1e-8;   // collinearity of restricted functionals

  /// Throws Error(Input) unless every tolerance is strictly positive and finite.
  void validate() const;
};

struct EvalPoint {
  Vector x;
  Vector w;
};

/// All first and second partial derivatives needed by the condition checks.
/// Hwx and Fwx are d x n: row i holds d/dw_i of the x-gradient.
struct DerivativeBundle {
  double Fval = 0.0;
  Vector gxf0;
  Matrix Hxx;
  Matrix Hwx;
  Vector gxF;
  Vector gwF;
  Matrix Fxx;
  Matrix Fwx;
};

enum class Location { Interior, Boundary, Infeasible };
enum class Degeneracy { NotApplicable, Nondegenerate, Degenerate };

struct CaseTag {
  Location location = Location::Interior;
  Degeneracy degeneracy = Degeneracy::NotApplicable;
  /// Multiplier in (0, tol.zero]: classified Degenerate but analysed both ways.
  bool borderline = false;
};

std::string to_string(const CaseTag& tag);

struct MultiplierInfo {
  double lambda = 0.0;
  double residual = 0.0;
};

/// Symbolic first and second derivatives of f0 and F, built once per problem.
class DerivativeModel {
 public:
  explicit DerivativeModel(expr::ProblemSpec spec);

  const expr::ProblemSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  int d() const { return spec_.d; }

  double f0(const Vector& x, const Vector& w) const;
  double F(const Vector& x, const Vector& w) const;
  Vector grad_x_f0(const Vector& x, const Vector& w) const;
  Vector grad_x_F(const Vector& x, const Vector& w) const;
  Matrix hess_xx_f0(const Vector& x, const Vector& w) const;
  Matrix hess_xx_F(const Vector& x, const Vector& w) const;

  /// Full bundle, with Hxx and Fxx symmetrized as (M + M^T) / 2.
  DerivativeBundle bundle(const EvalPoint& p) const;

  /// d/dv of f0 or F as an expression; exposed for audits.
  const expr::Expression& d_f0(expr::Variable v) const;
  const expr::Expression& d_F(expr::Variable v) const;

 private:
  struct Derivatives {
    std::vector<expr::Expression> gx, gw;  // first derivatives
    std::vector<expr::Expression> xx;      // n*n, row-major d2/dxi dxj
    std::vector<expr::Expression> wx;      // d*n, row-major d2/dwi dxj
  };
  static Derivatives build(const expr::Expression& e, int n, int d);

  expr::ProblemSpec spec_;
  Derivatives f0_;
  Derivatives F_;
};

DerivativeBundle derivative_bundle(const expr::ProblemSpec& spec, const EvalPoint& p);

/// Interior / Boundary / Infeasible split; boundary points also get the
/// multiplier sub-tag. Throws MfcqViolated, InfeasiblePoint or NotStationary.
CaseTag classify_point(const DerivativeBundle& b, const ToleranceConfig& tol);

/// lambda = -<gxF, gxf0> / |gxF|^2, the least-squares solution of
/// gxf0 + lambda * gxF = 0. Throws NotStationary when the residual is too
/// large or lambda is negative beyond tolerance; small negatives clamp to 0.
MultiplierInfo lagrange_multiplier(const DerivativeBundle& b, const ToleranceConfig& tol);

bool verify_stationarity(const DerivativeBundle& b, const CaseTag& tag, const ToleranceConfig& tol);

struct AuditEntry {
  std::string block;
  double max_abs_deviation = 0.0;
};

struct AuditReport {
  double step = 0.0;
  std::vector<AuditEntry> blocks;
  double worst = 0.0;
};

/// First-order blocks are compared with central differences of f0 and F;
/// second-order blocks with central differences of the symbolic first derivatives.
AuditReport finite_difference_audit(const expr::ProblemSpec& spec, const EvalPoint& p, double h);

}  // namespace aubin::calculus
