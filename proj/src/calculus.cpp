#include "aubin/calculus.hpp"

#include <cmath>
#include <span>

#include "aubin/error.hpp"

namespace aubin::calculus {

using expr::Axis;
using expr::Expression;
using expr::Variable;

namespace {

std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double eval(const Expression& e, const Vector& x, const Vector& w) {
  return expr::evaluate(e, view(x), view(w));
}

void check_point(const expr::ProblemSpec& spec, const EvalPoint& p) {
  if (p.x.size() != spec.n || p.w.size() != spec.d) {
    throw Error(ErrorCode::DimensionMismatch, "evaluation point does not match problem dimensions");
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void ToleranceConfig::validate() const {
  for (double t : {act, zero, stat, rank, col}) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::Input, "tolerances must be strictly positive");
    }
  }
}

std::string to_string(const CaseTag& tag) {
  switch (tag.location) {
    case Location::Interior: return "Interior";
    case Location::Infeasible: return "Infeasible";
    case Location::Boundary:
      return tag.degeneracy == Degeneracy::Nondegenerate ? "Boundary/Nondegenerate"
                                                         : "Boundary/Degenerate";
  }
  return "?";
}

DerivativeModel::Derivatives DerivativeModel::build(const Expression& e, int n, int d) {
  Derivatives out;
  for (int j = 1; j <= n; ++j) out.gx.push_back(expr::differentiate(e, {Axis::X, j}));
  for (int i = 1; i <= d; ++i) out.gw.push_back(expr::differentiate(e, {Axis::W, i}));
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      out.xx.push_back(expr::differentiate(out.gx[j - 1], {Axis::X, i}));
    }
  }
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= n; ++j) {
      out.wx.push_back(expr::differentiate(out.gx[j - 1], {Axis::W, i}));
    }
  }
  return out;
}

DerivativeModel::DerivativeModel(expr::ProblemSpec spec)
    : spec_(std::move(spec)),
      f0_(build(spec_.f0, spec_.n, spec_.d)),
      F_(build(spec_.F, spec_.n, spec_.d)) {}

double DerivativeModel::f0(const Vector& x, const Vector& w) const { return eval(spec_.f0, x, w); }

double DerivativeModel::F(const Vector& x, const Vector& w) const { return eval(spec_.F, x, w); }

Vector DerivativeModel::grad_x_f0(const Vector& x, const Vector& w) const {
  Vector g(n());
  for (int j = 0; j < n(); ++j) g[j] = eval(f0_.gx[j], x, w);
  return g;
}

Vector DerivativeModel::grad_x_F(const Vector& x, const Vector& w) const {
  Vector g(n());
  for (int j = 0; j < n(); ++j) g[j] = eval(F_.gx[j], x, w);
  return g;
}

Matrix DerivativeModel::hess_xx_f0(const Vector& x, const Vector& w) const {
  Matrix h(n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) h(i, j) = eval(f0_.xx[i * n() + j], x, w);
  return symmetrized(h);
}

Matrix DerivativeModel::hess_xx_F(const Vector& x, const Vector& w) const {
  Matrix h(n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) h(i, j) = eval(F_.xx[i * n() + j], x, w);
  return symmetrized(h);
}

DerivativeBundle DerivativeModel::bundle(const EvalPoint& p) const {
  check_point(spec_, p);
  DerivativeBundle b;
  b.Fval = F(p.x, p.w);
  b.gxf0 = grad_x_f0(p.x, p.w);
  b.gxF = grad_x_F(p.x, p.w);
  b.Hxx = hess_xx_f0(p.x, p.w);
  b.Fxx = hess_xx_F(p.x, p.w);
  b.gwF.resize(d());
  for (int i = 0; i < d(); ++i) b.gwF[i] = eval(F_.gw[i], p.x, p.w);
  b.Hwx.resize(d(), n());
  b.Fwx.resize(d(), n());
  for (int i = 0; i < d(); ++i) {
    for (int j = 0; j < n(); ++j) {
      b.Hwx(i, j) = eval(f0_.wx[i * n() + j], p.x, p.w);
      b.Fwx(i, j) = eval(F_.wx[i * n() + j], p.x, p.w);
    }
  }
  return b;
}

const Expression& DerivativeModel::d_f0(Variable v) const {
  return v.axis == Axis::X ? f0_.gx.at(v.index - 1) : f0_.gw.at(v.index - 1);
}

const Expression& DerivativeModel::d_F(Variable v) const {
  return v.axis == Axis::X ? F_.gx.at(v.index - 1) : F_.gw.at(v.index - 1);
}

DerivativeBundle derivative_bundle(const expr::ProblemSpec& spec, const EvalPoint& p) {
  return DerivativeModel(spec).bundle(p);
}

MultiplierInfo lagrange_multiplier(const DerivativeBundle& b, const ToleranceConfig& tol) {
  const double norm2 = b.gxF.squaredNorm();
  if (!(std::sqrt(norm2) > tol.zero)) {
    throw Error(ErrorCode::MfcqViolated, "gradient of F in x vanishes at a boundary point");
  }
  MultiplierInfo info;
  info.lambda = -b.gxF.dot(b.gxf0) / norm2;
  info.residual = (b.gxf0 + info.lambda * b.gxF).norm();
  if (info.residual > tol.stat * (1.0 + b.gxf0.norm())) {
    throw Error(ErrorCode::NotStationary,
                "no multiplier solves the stationarity equation (residual " +
                    std::to_string(info.residual) + ")");
  }
  if (info.lambda < -tol.zero) {
    throw Error(ErrorCode::NotStationary,
                "multiplier is negative (" + std::to_string(info.lambda) + ")");
  }
  if (!(info.lambda > 0.0)) info.lambda = 0.0;
  return info;
}

CaseTag classify_point(const DerivativeBundle& b, const ToleranceConfig& tol) {
  const double scale = 1.0 + std::sqrt(b.gxF.squaredNorm() + b.gwF.squaredNorm());
  const double threshold = tol.act * scale;
  CaseTag tag;
  if (b.Fval < -threshold) {
    tag.location = Location::Interior;
    return tag;
  }
  if (b.Fval > threshold) {
    throw Error(ErrorCode::InfeasiblePoint,
                "reference point violates the constraint (F = " + std::to_string(b.Fval) + ")");
  }
  tag.location = Location::Boundary;
  if (!(b.gxF.norm() > tol.zero)) {
    throw Error(ErrorCode::MfcqViolated, "gradient of F in x vanishes at a boundary point");
  }
  const MultiplierInfo m = lagrange_multiplier(b, tol);
  if (m.lambda > tol.zero) {
    tag.degeneracy = Degeneracy::Nondegenerate;
  } else {
    tag.degeneracy = Degeneracy::Degenerate;
    tag.borderline = m.lambda > 0.0;
  }
  return tag;
}

bool verify_stationarity(const DerivativeBundle& b, const CaseTag& tag, const ToleranceConfig& tol) {
  switch (tag.location) {
    case Location::Interior: return b.gxf0.norm() <= tol.stat;
    case Location::Boundary:
      try {
        lagrange_multiplier(b, tol);
        return true;
      } catch (const Error&) {
        return false;
      }
    case Location::Infeasible: return false;
  }
  return false;
}

AuditReport finite_difference_audit(const expr::ProblemSpec& spec, const EvalPoint& p, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::Input, "finite-difference step must be positive");
  const DerivativeModel model(spec);
  const DerivativeBundle b = model.bundle(p);
  const int n = spec.n, d = spec.d;

  // central difference of `fn` along variable v
  const auto central = [&](auto&& fn, Variable v) {
    EvalPoint plus = p, minus = p;
    Vector& tp = v.axis == Axis::X ? plus.x : plus.w;
    Vector& tm = v.axis == Axis::X ? minus.x : minus.w;
    tp[v.index - 1] += h;
    tm[v.index - 1] -= h;
    return (fn(plus) - fn(minus)) / (2.0 * h);
  };
  const auto value_of = [](const Expression& e) {
    return [&e](const EvalPoint& q) { return eval(e, q.x, q.w); };
  };

  AuditReport report;
  report.step = h;
  const auto record = [&](const char* name, double dev) {
    report.blocks.push_back({name, dev});
    report.worst = std::max(report.worst, dev);
  };

  double dev = 0.0;
  for (int j = 1; j <= n; ++j)
    dev = std::max(dev, std::abs(central(value_of(spec.f0), {Axis::X, j}) - b.gxf0[j - 1]));
  record("gxf0", dev);

  dev = 0.0;
  for (int j = 1; j <= n; ++j)
    dev = std::max(dev, std::abs(central(value_of(spec.F), {Axis::X, j}) - b.gxF[j - 1]));
  record("gxF", dev);

  dev = 0.0;
  for (int i = 1; i <= d; ++i)
    dev = std::max(dev, std::abs(central(value_of(spec.F), {Axis::W, i}) - b.gwF[i - 1]));
  record("gwF", dev);

  const auto second = [&](const Expression& (DerivativeModel::*first)(Variable) const,
                          const Matrix& xx, const Matrix& wx) {
    double dxx = 0.0, dwx = 0.0;
    for (int j = 1; j <= n; ++j) {
      const Expression& g = (model.*first)({Axis::X, j});
      for (int i = 1; i <= n; ++i)
        dxx = std::max(dxx, std::abs(central(value_of(g), {Axis::X, i}) - xx(i - 1, j - 1)));
      for (int i = 1; i <= d; ++i)
        dwx = std::max(dwx, std::abs(central(value_of(g), {Axis::W, i}) - wx(i - 1, j - 1)));
    }
    return std::pair{dxx, dwx};
  };

  const auto [hxx, hwx] = second(&DerivativeModel::d_f0, b.Hxx, b.Hwx);
  record("Hxx", hxx);
  record("Hwx", hwx);
  const auto [fxx, fwx] = second(&DerivativeModel::d_F, b.Fxx, b.Fwx);
  record("Fxx", fxx);
  record("Fwx", fwx);
  return report;
}

}  // namespace aubin::calculus
