#include <doctest.h>

#include <cmath>

#include "aubin/conditions.hpp"
#include "aubin/error.hpp"
#include "aubin/kernel.hpp"
#include "support.hpp"

using namespace aubin;
using namespace aubin::kernel;

namespace {

const ToleranceConfig kTol{};

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double x : v) m(0, j++) = x;
  return m;
}

/// Random k-dimensional subspace of R^m from a Householder QR.
SubspaceBasis random_subspace(support::Rng& rng, int m, int k) {
  if (k == 0) return SubspaceBasis::trivial(m);
  const Matrix q = Eigen::HouseholderQR<Matrix>(rng.matrix(m, k)).householderQ();
  return {m, q.leftCols(k)};
}

void check_sampling(support::Rng& rng, const SubspaceBasis& k, const std::vector<ConeConstraint>& cons) {
  const support::SamplingAgreement a = support::cone_sampling_agreement(rng, k, cons, kTol);
  CHECK(a.agrees);
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("null_space of single rows") {
    const SubspaceBasis k = null_space(row({0, 2}), kTol);
    REQUIRE(k.dim() == 1);
    CHECK(std::abs(std::abs(k.matrix()(0, 0)) - 1.0) <= 1e-12);
    CHECK(std::abs(k.matrix()(1, 0)) <= 1e-12);

    const SubspaceBasis raw = null_space(row({-4, 1}), kTol);
    REQUIRE(raw.dim() == 1);
    const Vector dir = raw.matrix().col(0) * (raw.matrix()(0, 0) > 0 ? 1.0 : -1.0);
    CHECK(max_abs(dir - Vector{{1.0, 4.0}} / std::sqrt(17.0)) <= 1e-12);
  }

  TEST_CASE("null_space edge cases") {
    CHECK(null_space(Matrix::Zero(3, 2), kTol).dim() == 2);
    CHECK(null_space(Matrix(0, 3), kTol).dim() == 3);
    CHECK(null_space(Matrix::Identity(3, 3), kTol).is_trivial());
  }

  TEST_CASE("stacked kernels") {
    // [0 2] over [2 0] from the concave circle: trivial
    Matrix tangent = row({2, 0});
    CHECK(stacked_kernel({row({0, 2}), tangent}, kTol).is_trivial());
    // quartic plane: A1 rows, A2, tangent row
    Matrix a1(2, 3);
    a1 << 0, 0, 0, 0, 0, 1;
    const SubspaceBasis k = stacked_kernel({a1, row({0, 0, -1}), row({0, 1, 0})}, kTol);
    REQUIRE(k.dim() == 1);
    CHECK(std::abs(std::abs(k.matrix()(0, 0)) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(stacked_kernel({row({1, 2}), row({1, 2, 3})}, kTol), Error);
  }

  TEST_CASE("contained_in_kernel examples") {
    CHECK_FALSE(contained_in_kernel(SubspaceBasis::full(2), Matrix::Identity(2, 2), kTol));
    Matrix e1(3, 1);
    e1 << 1, 0, 0;
    CHECK(contained_in_kernel(SubspaceBasis(3, e1), row({0, 0, -1}), kTol));
    CHECK(contained_in_kernel(SubspaceBasis::trivial(2), Matrix::Identity(2, 2), kTol));
    CHECK_THROWS_AS(contained_in_kernel(SubspaceBasis::full(2), row({1, 2, 3}), kTol), Error);
  }

  TEST_CASE("cone_span examples") {
    Matrix v14(2, 1), v12(2, 1);
    v14 << 1, 4;
    v12 << 1, -2;
    const std::vector<ConeConstraint> delta1 = {{Vector{{1.0, 0.0}}, Sense::StrictPositive},
                                                {Vector{{0.0, 1.0}}, Sense::NonNegative}};
    const ConeSpanResult a = cone_span(SubspaceBasis(2, v14 / v14.norm()), delta1, kTol);
    CHECK_FALSE(a.empty);
    CHECK(a.span->dim() == 1);
    CHECK(cone_span(SubspaceBasis(2, v12 / v12.norm()), delta1, kTol).empty);
    const ConeSpanResult full = cone_span(SubspaceBasis::full(2), {{Vector{{1.0, 0.0}}, Sense::StrictNegative}}, kTol);
    CHECK_FALSE(full.empty);
    CHECK(full.span->dim() == 2);
    // nonneg pair negatively collinear on K collapses to K cut by the hyperplane
    const ConeSpanResult d3 = cone_span(SubspaceBasis(2, v12 / v12.norm()),
                                        {{Vector{{1.0, 0.0}}, Sense::NonNegative}, {Vector{{0.0, 1.0}}, Sense::NonNegative}},
                                        kTol);
    CHECK_FALSE(d3.empty);
    CHECK(d3.span->dim() == 0);
  }

  TEST_CASE("cone_span rejects unsupported patterns") {
    const auto k = SubspaceBasis::full(2);
    const ConeConstraint s{Vector{{1.0, 0.0}}, Sense::StrictPositive};
    const ConeConstraint nn{Vector{{0.0, 1.0}}, Sense::NonNegative};
    CHECK_THROWS_AS(cone_span(k, {}, kTol), Error);
    CHECK_THROWS_AS(cone_span(k, {s, s}, kTol), Error);
    CHECK_THROWS_AS(cone_span(k, {s, nn, nn}, kTol), Error);
  }

  TEST_CASE("affine_feasibility examples") {
    Matrix two(1, 1);
    two << 2;
    const Feasibility a = affine_feasibility(two, Vector{{2.0}}, {}, kTol);
    REQUIRE(a.feasible);
    CHECK(a.witness[0] == doctest::Approx(1.0));

    CHECK_FALSE(affine_feasibility(Matrix::Identity(2, 2), Vector{{1.0, -1.0}},
                                   {{Vector{{0.0, 1.0}}, Sense::NonNegative}}, kTol)
                    .feasible);

    // deg_bad lower branch: Hxx v + gamma gxF = 0 with Hxx = 0, gxF = 1
    const Feasibility g = affine_feasibility(row({0, 1}), Vector{{0.0}},
                                             {{Vector{{1.0, 0.0}}, Sense::NonNegative},
                                              {Vector{{0.0, 1.0}}, Sense::NonNegative}},
                                             kTol);
    REQUIRE(g.feasible);
    CHECK(g.witness[0] >= 0.0);
    CHECK(std::abs(g.witness[1]) <= 1e-12);

    CHECK_THROWS_AS(affine_feasibility(Matrix::Identity(2, 2), Vector{{1.0}}, {}, kTol), Error);
  }

  TEST_CASE("property: null-space invariants on 500 random matrices") {
    support::Rng rng(4242);
    for (int s = 0; s < 500; ++s) {
      const int r = rng.integer(1, 8), m = rng.integer(1, 8);
      const int k = rng.integer(0, std::min(r, m));
      const Matrix a = rng.coin() ? rng.low_rank(r, m, k) : rng.matrix(r, m);
      const SubspaceBasis b = null_space(a, kTol);
      CHECK(b.ambient() == m);
      if (!b.is_trivial()) {
        CHECK(max_abs(a * b.matrix()) <= 1e-8);
        CHECK(max_abs(b.matrix().transpose() * b.matrix() - Matrix::Identity(b.dim(), b.dim())) <= 1e-10);
      }
      CHECK(b.dim() == support::lu_kernel_dim(a));
    }
  }

  TEST_CASE("property: contained_in_kernel agrees with Monte-Carlo") {
    support::Rng rng(77);
    for (int s = 0; s < 200; ++s) {
      const int m = rng.integer(1, 6), k = rng.integer(0, m), rows = rng.integer(1, 5);
      const SubspaceBasis b = random_subspace(rng, m, k);
      Matrix mm = rng.matrix(rows, m);
      if (rng.coin()) mm = mm * (Matrix::Identity(m, m) - b.matrix() * b.matrix().transpose());
      const bool claimed = contained_in_kernel(b, mm, kTol);
      bool sampled = true;
      for (int t = 0; t < 100 && b.dim() > 0; ++t) {
        const Vector coef = rng.vector(b.dim());
        if ((mm * (b.matrix() * coef)).norm() > 1e-6 * coef.norm()) sampled = false;
      }
      CHECK(claimed == sampled);
    }
  }

  TEST_CASE("property: cone_span agrees with sphere sampling on 100 random instances") {
    support::Rng rng(9001);
    int nonempty = 0, empty = 0, collapsed = 0;
    for (int s = 0; s < 100; ++s) {
      const int m = rng.integer(1, 4);
      const SubspaceBasis k = random_subspace(rng, m, rng.integer(1, m));
      const Matrix proj = k.matrix() * k.matrix().transpose();
      Vector c = rng.vector(m), e = rng.vector(m);
      const int twist = rng.integer(0, 3);
      if (twist == 0) c = c - proj * c;                                               // zero on K
      if (twist == 1) e = -2.0 * c + (Matrix::Identity(m, m) - proj) * rng.vector(m);  // negatively collinear on K
      std::vector<ConeConstraint> cons;
      switch (s % 3) {
        case 0: cons = {{c, Sense::StrictPositive}, {e, Sense::NonNegative}}; break;
        case 1: cons = {{c, Sense::StrictNegative}}; break;
        default: cons = {{c, Sense::NonNegative}, {e, Sense::NonNegative}}; break;
      }
      const ConeSpanResult r = cone_span(k, cons, kTol);
      empty += r.empty;
      nonempty += !r.empty;
      collapsed += !r.empty && r.span->dim() < k.dim();
      check_sampling(rng, k, cons);
    }
    CHECK(empty > 0);
    CHECK(nonempty > 0);
    CHECK(collapsed > 0);
  }

  TEST_CASE("property: affine_feasibility witnesses and certified infeasibility") {
    support::Rng rng(123);
    for (int s = 0; s < 300; ++s) {
      const int cols = rng.integer(1, 4), rows = rng.integer(1, 3);
      const Matrix m = rng.low_rank(rows, cols, rng.integer(1, std::min(rows, cols)));
      std::vector<ConeConstraint> cons;
      const int count = rng.integer(0, 2);
      const Vector zstar = rng.vector(cols);
      for (int i = 0; i < count; ++i) {
        Vector c = rng.vector(cols);
        const bool strict = i == 0 && rng.coin();
        if (c.dot(zstar) < 0) c = -c;  // zstar satisfies it
        cons.push_back({c, strict ? Sense::StrictPositive : Sense::NonNegative});
      }
      const Vector b = m * zstar;
      const Feasibility f = affine_feasibility(m, b, cons, kTol);
      REQUIRE(f.feasible);
      CHECK((m * f.witness - b).norm() <= 1e-8 * (1 + b.norm()));
      for (const ConeConstraint& c : cons) {
        const double v = c.functional.dot(f.witness);
        if (c.sense == Sense::StrictPositive) CHECK(v > 0.0);
        else CHECK(v >= -1e-9);
      }

      // a functional from the row space with a negative forced value
      const Vector y = rng.vector(rows);
      if (std::abs(y.dot(b)) < 1e-3 || (m.transpose() * y).norm() < 1e-3) continue;
      const double sgn = y.dot(b) < 0 ? 1.0 : -1.0;
      CHECK_FALSE(affine_feasibility(m, b, {{Vector(sgn * m.transpose() * y), Sense::NonNegative}}, kTol).feasible);
    }
  }

  TEST_CASE("affine_feasibility rejects inconsistent equalities") {
    Matrix m(2, 1);
    m << 1, 1;
    CHECK_FALSE(affine_feasibility(m, Vector{{1.0, 2.0}}, {}, kTol).feasible);
  }

  TEST_CASE("property: cone_span agrees with sphere sampling on the fixture matrices") {
    support::Rng rng(17);
    using calculus::Degeneracy;
    using calculus::Location;
    for (const std::string& name : support::analyzable_fixtures()) {
      CAPTURE(name);
      const auto pf = support::load(name);
      const auto b = calculus::derivative_bundle(pf.spec, pf.point);
      const int n = static_cast<int>(b.gxF.size());
      const auto primed = conditions::assemble_matrices(b, {Location::Boundary, Degeneracy::Degenerate, false}, 0.0);
      Vector c = Vector::Zero(n + 1), e = Vector::Zero(n + 1);
      c.head(n) = b.gxF;
      e[n] = 1.0;
      const SubspaceBasis k1 = null_space(primed.a1, kTol);
      check_sampling(rng, k1, {{c, Sense::StrictPositive}, {e, Sense::NonNegative}});
      check_sampling(rng, k1, {{c, Sense::NonNegative}, {e, Sense::NonNegative}});
      check_sampling(rng, null_space(b.Hxx, kTol), {{b.gxF, Sense::StrictNegative}});
    }
  }
}
