#pragma once

// Condition matrices, kernel and cone conditions for the interior,
// nondegenerate and degenerate cases, the three-valued verdict and
// coderivative membership queries.

#include <optional>
#include <string>
#include <vector>

#include "aubin/calculus.hpp"
#include "aubin/kernel.hpp"

namespace aubin::conditions {

using calculus::CaseTag;
using calculus::DerivativeBundle;
using calculus::MultiplierInfo;
using calculus::ToleranceConfig;

/// A1 = [Hxx + lambda Fxx | gxF], A2 = [Hwx + lambda Fwx | gwF] when
/// nondegenerate; the primed forms (lambda dropped) when degenerate.
struct ConditionMatrices {
  bool degenerate = false;
  double lambda = 0.0;
  Matrix a1;  // n x (n+1)
  Matrix a2;  // d x (n+1)
};

ConditionMatrices assemble_matrices(const DerivativeBundle& b, const CaseTag& tag, double lambda);

struct KernelDim {
  std::string name;
  int dim = 0;
};

struct Evidence {
  std::vector<KernelDim> kernels;
  std::string cone;  // "", "Empty" or "Spans(k)"
  std::vector<std::string> warnings;
};

struct ConditionReport {
  std::string id;
  bool holds = false;
  Evidence evidence;
};

/// C3_2, C3_4, C3_5.
std::vector<ConditionReport> check_interior(const DerivativeBundle& b, const ToleranceConfig& tol);

/// C4_4, C4_6, C4_8.
std::vector<ConditionReport> check_nondegenerate(const ConditionMatrices& m, const Vector& gxF,
                                                 const ToleranceConfig& tol);

/// C4_10, C4_11a, C4_11b, C4_12, C4_13, C4_14.
std::vector<ConditionReport> check_degenerate(const ConditionMatrices& m, const Matrix& hxx,
                                              const Matrix& hwx, const Vector& gxF,
                                              const ToleranceConfig& tol);

/// Looks up a condition by id; throws std::out_of_range when absent.
const ConditionReport& find(const std::vector<ConditionReport>& reports, const std::string& id);

enum class Answer { Yes, No, Unknown };
enum class Mode { Strict, Extended };

const char* to_string(Answer a);
const char* to_string(Mode m);

struct Verdict {
  CaseTag tag;
  std::optional<MultiplierInfo> multiplier;  // boundary only
  std::vector<ConditionReport> conditions;
  Answer lipschitz_like = Answer::Unknown;
  std::string theorem;  // empty when Unknown
  Mode mode = Mode::Extended;
  std::optional<bool> extended_map;  // interior only
  std::vector<std::string> warnings;
};

/// Runs the decision table on an already evaluated bundle.
Verdict analyze(const DerivativeBundle& b, const ToleranceConfig& tol, Mode mode);

/// Evaluates derivatives at the point, classifies it, checks stationarity and
/// analyzes. Throws InfeasiblePoint, MfcqViolated, NotStationary or Domain.
Verdict verdict(const expr::ProblemSpec& spec, const calculus::EvalPoint& point,
                const ToleranceConfig& tol, Mode mode);

/// Lipschitz-like property of the extended map (w, v) -> {x : grad f0 + v = 0}
/// at an interior point: holds iff ker Hxx is trivial.
bool extended_map_verdict(const DerivativeBundle& b, const ToleranceConfig& tol);

enum class Membership { In, Out, Unknown };

const char* to_string(Membership m);

struct MembershipResult {
  Membership answer = Membership::Unknown;
  std::optional<Vector> v;       // witness direction
  std::optional<double> gamma;   // boundary cases only
  std::string branch;            // system that produced the witness
  std::vector<std::string> notes;
};

/// Decides whether w' belongs to the coderivative of S at (w, x) applied to x'.
MembershipResult coderivative_membership(const DerivativeBundle& b, const CaseTag& tag, double lambda,
                                         const Vector& xprime, const Vector& wprime,
                                         const ToleranceConfig& tol);

/// Residual of the witness in its branch system (equalities and sign
/// violations); zero up to round-off for every In answer.
double witness_residual(const DerivativeBundle& b, double lambda, const Vector& xprime,
                        const Vector& wprime, const MembershipResult& r);

}  // namespace aubin::conditions
