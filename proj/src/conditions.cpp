#include "aubin/conditions.hpp"

#include <algorithm>
#include <stdexcept>

#include "aubin/error.hpp"

namespace aubin::conditions {

using calculus::Degeneracy;
using calculus::Location;
using kernel::ConeConstraint;
using kernel::Sense;
using kernel::SubspaceBasis;

namespace {

int n_of(const ConditionMatrices& m) { return static_cast<int>(m.a1.cols()) - 1; }

/// The row [gxF^T | 0], whose kernel is ker gxF^T x R.
Matrix tangent_row(const Vector& gxF) {
  Matrix row = Matrix::Zero(1, gxF.size() + 1);
  row.leftCols(gxF.size()) = gxF.transpose();
  return row;
}

Vector extend(const Vector& v, double last) {
  Vector out(v.size() + 1);
  out << v, last;
  return out;
}

Vector gamma_axis(int n) {
  Vector e = Vector::Zero(n + 1);
  e[n] = 1.0;
  return e;
}

ConditionReport report(std::string id, bool holds, std::vector<KernelDim> kernels = {}) {
  return {std::move(id), holds, Evidence{std::move(kernels), {}, {}}};
}

/// Inclusion of a cone-restricted kernel into ker M.
ConditionReport cone_condition(std::string id, const SubspaceBasis& k, std::string k_name,
                               const std::vector<ConeConstraint>& cone, const Matrix& m,
                               const ToleranceConfig& tol) {
  const kernel::ConeSpanResult span = kernel::cone_span(k, cone, tol);
  ConditionReport r = report(std::move(id), true, {{std::move(k_name), k.dim()}});
  if (span.empty) {
    r.evidence.cone = "Empty";
  } else {
    r.evidence.cone = "Spans(" + std::to_string(span.span->dim()) + ")";
    r.holds = kernel::contained_in_kernel(*span.span, m, tol);
  }
  if (span.borderline) {
    r.evidence.warnings.push_back("restricted functionals near the zero or collinearity threshold");
  }
  return r;
}

bool holds(const std::vector<ConditionReport>& rs, const char* id) { return find(rs, id).holds; }

struct Decision {
  Answer answer = Answer::Unknown;
  std::string theorem;
};

Decision decide_interior(const std::vector<ConditionReport>& rs) {
  const bool c32 = holds(rs, "C3_2"), c34 = holds(rs, "C3_4");
  if (c32 && c34) return {Answer::Yes, "Thm3.1(b)"};
  if (c32) return {Answer::No, "Thm3.1(c)"};
  if (!c34) return {Answer::No, "Thm3.1(a)"};
  return {};
}

Decision decide_nondegenerate(const std::vector<ConditionReport>& rs, Mode mode) {
  const bool c44 = holds(rs, "C4_4"), c46 = holds(rs, "C4_6");
  if (c44 && c46) return {Answer::Yes, "Thm4.1"};
  if (!c46 && mode == Mode::Extended) return {Answer::No, "LowerEstimateNecessity"};
  return {};
}

Decision decide_degenerate(const std::vector<ConditionReport>& rs) {
  if (!holds(rs, "C4_14")) return {Answer::No, "Thm4.3(a)"};
  if (holds(rs, "C4_13")) return {Answer::Yes, "Thm4.3(b)"};
  return {};
}

Decision meet(const Decision& a, const Decision& b) {
  if (a.answer == Answer::No) return a;
  if (b.answer == Answer::No) return b;
  if (a.answer == Answer::Yes && b.answer == Answer::Yes) return {Answer::Yes, a.theorem + "+" + b.theorem};
  return {};
}

ConditionMatrices nondegenerate_matrices(const DerivativeBundle& b, double lambda) {
  return assemble_matrices(b, {Location::Boundary, Degeneracy::Nondegenerate, false}, lambda);
}

ConditionMatrices degenerate_matrices(const DerivativeBundle& b) {
  return assemble_matrices(b, {Location::Boundary, Degeneracy::Degenerate, false}, 0.0);
}

}  // namespace

ConditionMatrices assemble_matrices(const DerivativeBundle& b, const CaseTag& tag, double lambda) {
  const auto n = b.gxF.size();
  const auto d = b.gwF.size();
  ConditionMatrices m;
  m.degenerate = tag.degeneracy != Degeneracy::Nondegenerate;
  m.lambda = m.degenerate ? 0.0 : lambda;
  m.a1.resize(n, n + 1);
  m.a2.resize(d, n + 1);
  m.a1.leftCols(n) = b.Hxx;
  m.a2.leftCols(n) = b.Hwx;
  if (!m.degenerate) {
    m.a1.leftCols(n) += lambda * b.Fxx;
    m.a2.leftCols(n) += lambda * b.Fwx;
  }
  m.a1.col(n) = b.gxF;
  m.a2.col(n) = b.gwF;
  return m;
}

const ConditionReport& find(const std::vector<ConditionReport>& reports, const std::string& id) {
  const auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& r) { return r.id == id; });
  if (it == reports.end()) throw std::out_of_range("no condition " + id);
  return *it;
}

std::vector<ConditionReport> check_interior(const DerivativeBundle& b, const ToleranceConfig& tol) {
  const SubspaceBasis kh = kernel::null_space(b.Hxx, tol);
  const SubspaceBasis both = kernel::stacked_kernel({b.Hxx, b.Hwx}, tol);
  const bool c32 = both.is_trivial();
  const bool c34 = kernel::contained_in_kernel(kh, b.Hwx, tol);
  return {
      report("C3_2", c32, {{"ker Hxx ∩ ker Hwx", both.dim()}}),
      report("C3_4", c34, {{"ker Hxx", kh.dim()}}),
      report("C3_5", kh.is_trivial(), {{"ker Hxx", kh.dim()}}),
  };
}

std::vector<ConditionReport> check_nondegenerate(const ConditionMatrices& m, const Vector& gxF,
                                                 const ToleranceConfig& tol) {
  const Matrix g = tangent_row(gxF);
  const SubspaceBasis k8 = kernel::stacked_kernel({m.a1, g}, tol);
  const SubspaceBasis k4 = kernel::stacked_kernel({m.a1, m.a2, g}, tol);
  return {
      report("C4_4", k4.is_trivial(), {{"ker A1 ∩ ker A2 ∩ (ker gxF × R)", k4.dim()}}),
      report("C4_6", kernel::contained_in_kernel(k8, m.a2, tol), {{"ker A1 ∩ (ker gxF × R)", k8.dim()}}),
      report("C4_8", k8.is_trivial(), {{"ker A1 ∩ (ker gxF × R)", k8.dim()}}),
  };
}

std::vector<ConditionReport> check_degenerate(const ConditionMatrices& m, const Matrix& hxx,
                                              const Matrix& hwx, const Vector& gxF,
                                              const ToleranceConfig& tol) {
  const int n = n_of(m);
  const Vector c = extend(gxF, 0.0);
  const Vector e = gamma_axis(n);
  const SubspaceBasis k1 = kernel::null_space(m.a1, tol);
  const SubspaceBasis k10 = kernel::stacked_kernel({m.a1, m.a2}, tol);
  const SubspaceBasis k11 = kernel::stacked_kernel({m.a1, tangent_row(gxF)}, tol);
  const SubspaceBasis kh = kernel::null_space(hxx, tol);

  std::vector<ConditionReport> out;
  out.push_back(report("C4_10", k10.is_trivial(), {{"ker A'1 ∩ ker A'2", k10.dim()}}));
  out.push_back(report("C4_11a", kernel::contained_in_kernel(k11, m.a2, tol),
                       {{"ker A'1 ∩ (ker gxF × R)", k11.dim()}}));
  out.push_back(cone_condition("C4_11b", k1, "ker A'1",
                               {{c, Sense::StrictPositive}, {e, Sense::NonNegative}}, m.a2, tol));
  out.push_back(cone_condition("C4_12", kh, "ker Hxx", {{gxF, Sense::StrictNegative}}, hwx, tol));
  const bool c413 = out[0].holds && out[1].holds && out[2].holds && out[3].holds;
  out.push_back(report("C4_13", c413));
  out.push_back(cone_condition("C4_14", k1, "ker A'1",
                               {{c, Sense::NonNegative}, {e, Sense::NonNegative}}, m.a2, tol));
  return out;
}

const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "Yes";
    case Answer::No: return "No";
    case Answer::Unknown: return "Unknown";
  }
  return "?";
}

const char* to_string(Mode m) { return m == Mode::Strict ? "strict" : "extended"; }

const char* to_string(Membership m) {
  switch (m) {
    case Membership::In: return "In";
    case Membership::Out: return "Out";
    case Membership::Unknown: return "Unknown";
  }
  return "?";
}

bool extended_map_verdict(const DerivativeBundle& b, const ToleranceConfig& tol) {
  return kernel::null_space(b.Hxx, tol).is_trivial();
}

Verdict analyze(const DerivativeBundle& b, const ToleranceConfig& tol, Mode mode) {
  Verdict v;
  v.mode = mode;
  v.tag = calculus::classify_point(b, tol);

  Decision decision;
  if (v.tag.location == Location::Interior) {
    v.conditions = check_interior(b, tol);
    v.extended_map = extended_map_verdict(b, tol);
    decision = decide_interior(v.conditions);
  } else {
    v.multiplier = calculus::lagrange_multiplier(b, tol);
    const double lambda = v.multiplier->lambda;
    if (v.tag.degeneracy == Degeneracy::Nondegenerate) {
      v.conditions = check_nondegenerate(nondegenerate_matrices(b, lambda), b.gxF, tol);
      decision = decide_nondegenerate(v.conditions, mode);
    } else {
      v.conditions = check_degenerate(degenerate_matrices(b), b.Hxx, b.Hwx, b.gxF, tol);
      decision = decide_degenerate(v.conditions);
      if (v.tag.borderline) {
        const auto nondeg = check_nondegenerate(nondegenerate_matrices(b, lambda), b.gxF, tol);
        decision = meet(decision, decide_nondegenerate(nondeg, mode));
        v.conditions.insert(v.conditions.begin(), nondeg.begin(), nondeg.end());
        v.warnings.push_back("multiplier " + std::to_string(lambda) +
                             " lies in (0, tau_zero]; verdict is the meet of both boundary analyses");
      }
    }
  }
  for (const ConditionReport& r : v.conditions) {
    for (const std::string& w : r.evidence.warnings) v.warnings.push_back(r.id + ": " + w);
  }
  v.lipschitz_like = decision.answer;
  v.theorem = decision.theorem;
  return v;
}

Verdict verdict(const expr::ProblemSpec& spec, const calculus::EvalPoint& point,
                const ToleranceConfig& tol, Mode mode) {
  tol.validate();
  const DerivativeBundle b = calculus::derivative_bundle(spec, point);
  const CaseTag tag = calculus::classify_point(b, tol);
  if (!calculus::verify_stationarity(b, tag, tol)) {
    throw Error(ErrorCode::NotStationary, "reference point is not stationary (|grad_x f0| = " +
                                              std::to_string(b.gxf0.norm()) + ")");
  }
  return analyze(b, tol, mode);
}

namespace {

Matrix vstack(std::initializer_list<Matrix> blocks) {
  Eigen::Index rows = 0, cols = blocks.begin()->cols();
  for (const Matrix& m : blocks) rows += m.rows();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Matrix& m : blocks) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

Vector vcat(std::initializer_list<Vector> parts) {
  Eigen::Index size = 0;
  for (const Vector& p : parts) size += p.size();
  Vector out(size);
  Eigen::Index at = 0;
  for (const Vector& p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

MembershipResult in_result(const Vector& z, int n, bool with_gamma, std::string branch) {
  MembershipResult r;
  r.answer = Membership::In;
  r.v = Vector(z.head(n));
  if (with_gamma) r.gamma = z[n];
  r.branch = std::move(branch);
  return r;
}

MembershipResult interior_membership(const DerivativeBundle& b, const Vector& xp, const Vector& wp,
                                     const ToleranceConfig& tol) {
  const int n = static_cast<int>(b.gxF.size());
  const auto f = kernel::affine_feasibility(vstack({b.Hxx, b.Hwx}), vcat({-xp, wp}), {}, tol);
  if (f.feasible) return in_result(f.witness, n, false, "Gamma1");
  MembershipResult r;
  if (holds(check_interior(b, tol), "C3_2")) {
    r.answer = Membership::Out;
  } else {
    r.notes.push_back("ExactnessUnavailable: C3_2 fails, so only the lower estimate is exact");
  }
  return r;
}

MembershipResult nondegenerate_membership(const DerivativeBundle& b, double lambda, const Vector& xp,
                                          const Vector& wp, const ToleranceConfig& tol) {
  const int n = static_cast<int>(b.gxF.size());
  const ConditionMatrices m = nondegenerate_matrices(b, lambda);
  const auto f = kernel::affine_feasibility(vstack({m.a1, tangent_row(b.gxF), m.a2}),
                                            vcat({-xp, Vector::Zero(1), wp}), {}, tol);
  if (f.feasible) return in_result(f.witness, n, true, "Gamma2");
  MembershipResult r;
  if (holds(check_nondegenerate(m, b.gxF, tol), "C4_4")) {
    r.answer = Membership::Out;
  } else {
    r.notes.push_back("ExactnessUnavailable: C4_4 fails, so only the lower estimate is exact");
  }
  return r;
}

MembershipResult degenerate_membership(const DerivativeBundle& b, const Vector& xp, const Vector& wp,
                                       const ToleranceConfig& tol) {
  const int n = static_cast<int>(b.gxF.size());
  const ConditionMatrices m = degenerate_matrices(b);
  const Matrix sys = vstack({m.a1, m.a2});
  const Vector rhs = vcat({-xp, wp});
  const Vector c = extend(b.gxF, 0.0);
  const Vector e = gamma_axis(n);

  const auto lower = kernel::affine_feasibility(
      sys, rhs, {{c, Sense::NonNegative}, {e, Sense::NonNegative}}, tol);
  if (lower.feasible) return in_result(lower.witness, n, true, "GammaHat1");

  MembershipResult r;
  if (!holds(check_degenerate(m, b.Hxx, b.Hwx, b.gxF, tol), "C4_10")) {
    r.notes.push_back("ExactnessUnavailable: C4_10 fails, so the upper estimate is unavailable");
    return r;
  }
  const bool a = kernel::affine_feasibility(vstack({sys, tangent_row(b.gxF)}),
                                            vcat({rhs, Vector::Zero(1)}), {}, tol)
                     .feasible;
  const bool bb = kernel::affine_feasibility(
                      sys, rhs, {{c, Sense::StrictPositive}, {e, Sense::NonNegative}}, tol)
                      .feasible;
  const bool cc = kernel::affine_feasibility(vstack({b.Hxx, b.Hwx}), rhs,
                                             {{b.gxF, Sense::StrictNegative}}, tol)
                      .feasible;
  if (!a && !bb && !cc) {
    r.answer = Membership::Out;
  } else {
    r.notes.push_back("w' lies in the upper set Gamma3 but not in the lower set GammaHat1");
  }
  return r;
}

}  // namespace

MembershipResult coderivative_membership(const DerivativeBundle& b, const CaseTag& tag, double lambda,
                                         const Vector& xprime, const Vector& wprime,
                                         const ToleranceConfig& tol) {
  if (xprime.size() != b.gxF.size() || wprime.size() != b.gwF.size()) {
    throw Error(ErrorCode::DimensionMismatch, "membership query does not match problem dimensions");
  }
  if (tag.location == Location::Interior) return interior_membership(b, xprime, wprime, tol);
  if (tag.location != Location::Boundary) {
    throw Error(ErrorCode::InfeasiblePoint, "membership requires a feasible reference point");
  }
  if (tag.degeneracy == Degeneracy::Nondegenerate) {
    return nondegenerate_membership(b, lambda, xprime, wprime, tol);
  }
  MembershipResult deg = degenerate_membership(b, xprime, wprime, tol);
  if (!tag.borderline) return deg;

  const MembershipResult nondeg = nondegenerate_membership(b, lambda, xprime, wprime, tol);
  if (nondeg.answer == deg.answer) return deg;
  MembershipResult r;
  r.notes.push_back(std::string("borderline multiplier: degenerate analysis says ") +
                    to_string(deg.answer) + ", nondegenerate says " + to_string(nondeg.answer));
  return r;
}

double witness_residual(const DerivativeBundle& b, double lambda, const Vector& xprime,
                        const Vector& wprime, const MembershipResult& r) {
  if (r.answer != Membership::In || !r.v) return 0.0;
  const Vector& v = *r.v;
  const double gamma = r.gamma.value_or(0.0);
  if (r.branch == "Gamma1") {
    return std::max((b.Hxx * v + xprime).cwiseAbs().maxCoeff(), (b.Hwx * v - wprime).cwiseAbs().maxCoeff());
  }
  const double lam = r.branch == "Gamma2" ? lambda : 0.0;
  const Vector top = (b.Hxx + lam * b.Fxx) * v + gamma * b.gxF + xprime;
  const Vector bottom = (b.Hwx + lam * b.Fwx) * v + gamma * b.gwF - wprime;
  double res = std::max(top.cwiseAbs().maxCoeff(), bottom.cwiseAbs().maxCoeff());
  const double slope = b.gxF.dot(v);
  if (r.branch == "Gamma2") return std::max(res, std::abs(slope));
  return std::max({res, -slope, -gamma, 0.0});
}

}  // namespace aubin::conditions
