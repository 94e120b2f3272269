#pragma once

#include "aubin/oracle.hpp"

namespace aubin::oracle::detail {

struct NewtonResult {
  Vector x;
  double lambda = 0.0;
  double residual = 0.0;
  bool converged = false;  // residual and last step both below tau_newton
};

/// Damped Newton on grad_x f0(., w) = 0.
NewtonResult newton_interior(const DerivativeModel& model, const Vector& x0, const Vector& w,
                             const GridSpec& grid);

/// Damped Newton on (grad_x f0 + lambda grad_x F, F) = 0 in (x, lambda).
NewtonResult newton_boundary(const DerivativeModel& model, const Vector& x0, double lambda0,
                             const Vector& w, const GridSpec& grid);

}  // namespace aubin::oracle::detail
