#include <array>

#include "aubin/report.hpp"

namespace aubin::io {

namespace {

struct Registered {
  int n, d;
  const char* f0;
  const char* F;
  double x, w;
  const char* note;
};

// The weighted-square problem and a problem realizing the degenerate-case
// matrices that the reference analysis assigns to it.
constexpr std::array<Registered, 2> kRegistry{{
    {1, 1, "x1^2*(w1-2)", "w1*(x1-1)", 1.0, 1.0,
     "discrepancy: the reference analysis places this point in the degenerate case "
     "(multiplier 0, A'1 = [-4 1], A'2 = [2 0]); recomputation gives multiplier 2 and "
     "Hxx = -2, so the nondegenerate route applies (A1 = [-2 1], A2 = [4 0], C4_8 holds). "
     "The reference matrices ship as the fixture weighted_square_reference_matrices."},
    {1, 1, "-2*x1^2 + 2*w1*x1", "x1", 0.0, 0.0,
     "discrepancy: these are the degenerate-case matrices (A'1 = [-4 1], A'2 = [2 0], gxF = 1) "
     "that the reference analysis states for the weighted-square problem, where it reports "
     "C4_13 as fulfilled; evaluated here, C4_11b and C4_14 both fail."},
}};

}  // namespace

std::vector<std::string> discrepancy_notes(const ProblemFile& pf) {
  std::vector<std::string> notes;
  for (const Registered& r : kRegistry) {
    if (pf.spec.n != r.n || pf.spec.d != r.d) continue;
    if (pf.point.x[0] != r.x || pf.point.w[0] != r.w) continue;
    const expr::ProblemSpec spec = expr::make_problem(r.n, r.d, r.f0, r.F);
    if (spec.f0 == pf.spec.f0 && spec.F == pf.spec.F) notes.emplace_back(r.note);
  }
  return notes;
}

}  // namespace aubin::io
