#include "refine.hpp"

#include <cmath>
#include <limits>

#include "aubin/error.hpp"

namespace aubin::oracle::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Residual vector and Jacobian of one branch at the unknown vector y.
struct System {
  Vector r;
  Matrix j;
};

template <class Eval>
NewtonResult damped_newton(Vector y, const GridSpec& grid, int n, Eval&& eval) {
  const auto residual_at = [&](const Vector& z) {
    try {
      const double r = eval(z, false).r.norm();
      return std::isfinite(r) ? r : kInf;
    } catch (const Error&) {
      return kInf;
    }
  };

  NewtonResult out;
  double step = kInf;
  double r = residual_at(y);
  for (int it = 0; it < grid.newton_cap && std::isfinite(r); ++it) {
    if (r == 0.0 || (r <= grid.tau_newton && step <= grid.tau_newton * (1.0 + y.head(n).norm()))) {
      out.converged = true;
      break;
    }
    System s;
    try {
      s = eval(y, true);
    } catch (const Error&) {
      break;
    }
    const Vector dir = -s.j.completeOrthogonalDecomposition().solve(s.r);
    if (!dir.allFinite() || dir.norm() == 0.0) break;

    double t = 1.0;
    double trial = kInf;
    for (; t > 1e-10; t *= 0.5) {
      trial = residual_at(y + t * dir);
      if (trial <= (1.0 - 1e-4 * t) * r) break;
    }
    if (!(t > 1e-10)) break;
    y += t * dir;
    step = t * dir.norm();
    r = trial;
  }
  if (!out.converged && r == 0.0) out.converged = true;
  if (!out.converged && r <= grid.tau_newton && step <= grid.tau_newton * (1.0 + y.head(n).norm())) {
    out.converged = true;
  }
  out.x = y.head(n);
  out.lambda = y.size() > n ? y[n] : 0.0;
  out.residual = r;
  return out;
}

}  // namespace

NewtonResult newton_interior(const DerivativeModel& model, const Vector& x0, const Vector& w,
                             const GridSpec& grid) {
  return damped_newton(x0, grid, model.n(), [&](const Vector& x, bool jac) {
    System s{model.grad_x_f0(x, w), {}};
    if (jac) s.j = model.hess_xx_f0(x, w);
    return s;
  });
}

NewtonResult newton_boundary(const DerivativeModel& model, const Vector& x0, double lambda0,
                             const Vector& w, const GridSpec& grid) {
  const int n = model.n();
  Vector y(n + 1);
  y << x0, lambda0;
  return damped_newton(y, grid, n, [&](const Vector& z, bool jac) {
    const Vector x = z.head(n);
    const double lambda = z[n];
    const Vector gF = model.grad_x_F(x, w);
    System s;
    s.r.resize(n + 1);
    s.r << model.grad_x_f0(x, w) + lambda * gF, model.F(x, w);
    if (jac) {
      s.j = Matrix::Zero(n + 1, n + 1);
      s.j.topLeftCorner(n, n) = model.hess_xx_f0(x, w) + lambda * model.hess_xx_F(x, w);
      s.j.topRightCorner(n, 1) = gF;
      s.j.bottomLeftCorner(1, n) = gF.transpose();
    }
    return s;
  });
}

}  // namespace aubin::oracle::detail
