#pragma once

// Tolerance-controlled subspace computations and the exact case analysis
// behind cone-restricted kernel inclusions.

#include <optional>
#include <vector>

#include "aubin/calculus.hpp"
#include "aubin/linalg.hpp"

namespace aubin::kernel {

using calculus::ToleranceConfig;

/// Orthonormal basis (as columns) of a subspace of R^m. Zero columns is {0}.
class SubspaceBasis {
 public:
  SubspaceBasis(int ambient, Matrix columns);

  static SubspaceBasis trivial(int ambient);
  static SubspaceBasis full(int ambient);

  int ambient() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  bool is_trivial() const { return dim() == 0; }
  const Matrix& matrix() const { return basis_; }

 private:
  int ambient_;
  Matrix basis_;
};

enum class Sense { StrictPositive, NonNegative, StrictNegative };

/// The half-space condition  sense(functional . z).
struct ConeConstraint {
  Vector functional;
  Sense sense = Sense::NonNegative;
};

/// Either no point of the subspace satisfies the constraints, or the
/// satisfying points span the returned subspace.
struct ConeSpanResult {
  bool empty = false;
  std::optional<SubspaceBasis> span;  // set iff !empty
  /// Restricted functionals close to the zero or collinearity thresholds.
  bool borderline = false;
};

/// Rank by singular values: sigma_i <= tol.rank * sigma_max * max(r, m) counts as zero.
SubspaceBasis null_space(const Matrix& a, const ToleranceConfig& tol);

/// Kernel of the vertically stacked matrices; throws DimensionMismatch.
SubspaceBasis stacked_kernel(const std::vector<Matrix>& blocks, const ToleranceConfig& tol);

/// True iff M annihilates the subspace: |M B|max <= tol.rank * (1 + |M|max).
bool contained_in_kernel(const SubspaceBasis& b, const Matrix& m, const ToleranceConfig& tol);

/// Span of {z in K : constraints}. Supports one or two constraints with at most
/// one strict; throws UnsupportedConePattern otherwise.
ConeSpanResult cone_span(const SubspaceBasis& k, const std::vector<ConeConstraint>& constraints,
                         const ToleranceConfig& tol);

struct Feasibility {
  bool feasible = false;
  Vector witness;  // set iff feasible
};

/// Decides existence of z with M z = b and up to two sign constraints, returning
/// an explicit witness when one exists.
Feasibility affine_feasibility(const Matrix& m, const Vector& b,
                               const std::vector<ConeConstraint>& constraints,
                               const ToleranceConfig& tol);

}  // namespace aubin::kernel
