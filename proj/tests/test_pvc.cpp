#include "doctest.h"

#include "varstab/linalg.hpp"
#include "varstab/pvc.hpp"
#include "varstab/rng.hpp"

#include "fixtures.hpp"

#include <cmath>

using namespace varstab;

namespace {

// Independent cofactor-expansion determinant for small matrices.
double det_cofactor(const Matrix& m) {
  const int n = int(m.rows());
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (int j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * det_cofactor(minor);
  }
  return det;
}

const SmoothIneq& pot_of(const PvsInstance& inst) {
  return std::get<SmoothIneq>(inst.potential());
}

// n = 2 instance with one affine constraint x1 <= 0 active at the origin
// with a strictly positive multiplier; LICQ holds, I \ I+ is empty.
PvsInstance licq_strict_instance(const Matrix& q) {
  Dims dims{2, 1, 0};
  BaseMapSpec base{Vector::Zero(2), q, Matrix::Zero(2, 1), Matrix(2, 0)};
  SmoothIneq pot;
  SmoothIneqConstraint c;
  c.a = Matrix(0, 0);
  c.b = Vector(2);
  c.b << 1, 0;
  c.g = Vector::Zero(1);
  c.d = 0.0;
  pot.constraints.push_back(c);
  Vector vbar(2);
  vbar << 1.0, 0.0;  // v = f(0) + 1 * grad
  ReferencePoint ref{Vector::Zero(2), Vector::Zero(1), Vector(0), vbar};
  return PvsInstance(dims, base, pot, ref);
}

PvsInstance unconstrained_instance(const Matrix& q) {
  const int n = int(q.rows());
  Dims dims{n, 0, 0};
  BaseMapSpec base{Vector::Zero(n), q, Matrix(n, 0), Matrix(n, 0)};
  SmoothIneq pot;
  pot.dim = n;
  ReferencePoint ref{Vector::Zero(n), Vector(0), Vector(0), Vector::Zero(n)};
  return PvsInstance(dims, base, pot, ref);
}

}  // namespace

TEST_CASE("active set of the worked PVC example") {
  const auto inst = fixtures::example94();
  const auto idx = active_set(pot_of(inst), inst.reference().x, inst.reference().p);
  CHECK(idx == std::vector<int>{0, 1, 2, 3});

  Vector interior(3);
  interior << 0, 0, 1;  // phi_i = -1 or -1: strictly feasible
  CHECK(active_set(pot_of(inst), interior, inst.reference().p).empty());

  Vector infeasible(3);
  infeasible << 1, 0, 0;
  CHECK_THROWS_AS(active_set(pot_of(inst), infeasible, inst.reference().p),
                  ValidationError);
}

TEST_CASE("MFCQ on the worked example: margin one along the third axis") {
  const auto inst = fixtures::example94();
  const auto rep = mfcq_check(pot_of(inst), inst.reference().x, inst.reference().p);
  CHECK(rep.holds);
  CHECK(rep.margin == doctest::Approx(1.0).epsilon(1e-9));
  // witness satisfies <grad_i, d> <= -margin for all active i
  for (int i = 0; i < 4; ++i)
    CHECK(pot_of(inst).gradient_x(i, inst.reference().x).dot(rep.witness) <=
          -rep.margin + 1e-12);
}

TEST_CASE("MFCQ with opposing gradients fails; empty active set is vacuous") {
  Dims dims{1, 0, 0};
  BaseMapSpec base{Vector::Zero(1), Matrix::Identity(1, 1), Matrix(1, 0),
                   Matrix(1, 0)};
  SmoothIneq pot;
  SmoothIneqConstraint c1;
  c1.a = Matrix(0, 0);
  c1.b = Vector::Ones(1);
  c1.g = Vector(0);
  c1.d = 0.0;
  SmoothIneqConstraint c2 = c1;
  c2.b = -Vector::Ones(1);
  pot.constraints = {c1, c2};
  // v_hat must lie in the normal cone at 0, which is all of R here
  ReferencePoint ref{Vector::Zero(1), Vector(0), Vector(0), Vector::Zero(1)};
  PvsInstance inst(dims, base, pot, ref);
  const auto rep = mfcq_check(pot_of(inst), Vector::Zero(1), Vector(0));
  CHECK(!rep.holds);
  CHECK(rep.margin <= 1e-8);

  const auto uncon = unconstrained_instance(Matrix::Identity(2, 2));
  const auto vac = mfcq_check(pot_of(uncon), Vector::Zero(2), Vector(0));
  CHECK(vac.holds);
  CHECK(vac.vacuous);
  CHECK(vac.margin == kInf);
}

TEST_CASE("LICQ fails on the worked example (four gradients in R^3)") {
  const auto inst = fixtures::example94();
  const auto rep = licq_check(pot_of(inst), inst.reference().x, inst.reference().p);
  CHECK(!rep.holds);
  CHECK(rep.active_count == 4);
  CHECK(rep.rank == 3);

  const auto single = licq_strict_instance(Matrix::Identity(2, 2));
  const auto rep2 =
      licq_check(pot_of(single), single.reference().x, single.reference().p);
  CHECK(rep2.holds);
  CHECK(rep2.rank == 1);

  const auto uncon = unconstrained_instance(Matrix::Identity(2, 2));
  CHECK(licq_check(pot_of(uncon), Vector::Zero(2), Vector(0)).holds);
}

TEST_CASE("CRCQ holds for affine constraints and detects rank jumps") {
  const auto inst = fixtures::example94();
  const auto rep = crcq_check(pot_of(inst), inst.reference().x,
                              inst.reference().p, 1e-3, 40, 42);
  CHECK(rep.holds);

  // phi_1 = x^2 <= 0, phi_2 = x <= 0 at 0: rank of {grad phi_1} jumps 0 -> 1
  Dims dims{1, 0, 0};
  BaseMapSpec base{Vector::Zero(1), Matrix::Identity(1, 1), Matrix(1, 0),
                   Matrix(1, 0)};
  SmoothIneq pot;
  SmoothIneqConstraint c1;
  c1.a = Matrix::Constant(1, 1, 2.0);
  c1.b = Vector::Zero(1);
  c1.g = Vector(0);
  c1.d = 0.0;
  SmoothIneqConstraint c2;
  c2.a = Matrix(0, 0);
  c2.b = Vector::Ones(1);
  c2.g = Vector(0);
  c2.d = 0.0;
  pot.constraints = {c1, c2};
  ReferencePoint ref{Vector::Zero(1), Vector(0), Vector(0), Vector::Zero(1)};
  PvsInstance quad(dims, base, pot, ref);
  const auto rep2 = crcq_check(pot_of(quad), Vector::Zero(1), Vector(0), 1e-2,
                               40, 42);
  CHECK(!rep2.holds);
  CHECK(rep2.failing_subset == std::vector<int>{0});

  const auto single = licq_strict_instance(Matrix::Identity(2, 2));
  CHECK(crcq_check(pot_of(single), single.reference().x, single.reference().p,
                   1e-3, 40, 42)
            .holds);
}

TEST_CASE("multiplier polytope of the worked example is the known segment") {
  const auto inst = fixtures::example94();
  const auto& ref = inst.reference();
  const auto poly = multipliers(pot_of(inst), inst, ref.x, ref.p, ref.q, ref.v);
  REQUIRE(!poly.empty);
  CHECK(poly.bounded);
  REQUIRE(poly.vertices.size() == 2);
  CHECK(poly.max_residual <= 1e-9);
  Vector va(4), vb(4);
  va << 3.0 / 8, 5.0 / 8, 0, 0;
  vb << 0, 1.0 / 4, 3.0 / 8, 3.0 / 8;
  const bool order_ab =
      (poly.vertices[0] - va).lpNorm<Eigen::Infinity>() <= 1e-9;
  const Vector& first = order_ab ? va : vb;
  const Vector& second = order_ab ? vb : va;
  CHECK((poly.vertices[0] - first).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((poly.vertices[1] - second).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("multiplier polytope degenerate cases") {
  SUBCASE("LICQ gives a singleton") {
    const auto inst = licq_strict_instance(Matrix::Identity(2, 2));
    const auto& ref = inst.reference();
    const auto poly = multipliers(pot_of(inst), inst, ref.x, ref.p, ref.q, ref.v);
    REQUIRE(poly.vertices.size() == 1);
    CHECK(poly.vertices[0][0] == doctest::Approx(1.0));
  }
  SUBCASE("no active constraints and zero residual give the zero multiplier") {
    const auto inst = unconstrained_instance(Matrix::Identity(2, 2));
    const auto& ref = inst.reference();
    const auto poly = multipliers(pot_of(inst), inst, ref.x, ref.p, ref.q, ref.v);
    REQUIRE(!poly.empty);
    REQUIRE(poly.vertices.size() == 1);
    CHECK(poly.vertices[0].norm() == 0.0);
  }
  SUBCASE("incompatible v yields the empty polytope") {
    const auto inst = licq_strict_instance(Matrix::Identity(2, 2));
    const auto& ref = inst.reference();
    Vector v(2);
    v << -1.0, 0.0;  // needs a negative multiplier
    const auto poly = multipliers(pot_of(inst), inst, ref.x, ref.p, ref.q, v);
    CHECK(poly.empty);
  }
}

TEST_CASE("GSSOSC fails on the worked example with a flat witness") {
  const auto inst = fixtures::example94();
  const auto& ref = inst.reference();
  const auto rep = gssosc_check(inst, ref.x, ref.p, ref.q, ref.v);
  CHECK(!rep.holds);
  CHECK(std::abs(rep.min_curvature) <= 1e-9);
  REQUIRE(rep.failing_u.size() == 3);
  // witness lies along e2 and annihilates the Hessian
  const Matrix h = inst.base().q;
  CHECK(std::abs(rep.failing_u.dot(h * rep.failing_u)) <= 1e-9);
  // the failing multiplier is the alpha = 0 endpoint
  CHECK(rep.failing_lambda[2] <= 1e-9);
  CHECK(rep.failing_lambda[3] <= 1e-9);
}

TEST_CASE("GSSOSC holds for definite unconstrained instances and fails for indefinite") {
  const auto good = unconstrained_instance(Matrix::Identity(3, 3));
  const auto& r1 = good.reference();
  CHECK(gssosc_check(good, r1.x, r1.p, r1.q, r1.v).holds);

  Matrix q(2, 2);
  q << 1, 0, 0, -1;
  const auto bad = unconstrained_instance(q);
  const auto& r2 = bad.reference();
  const auto rep = gssosc_check(bad, r2.x, r2.p, r2.q, r2.v);
  CHECK(!rep.holds);
  CHECK(rep.min_curvature == doctest::Approx(-1.0));
}

TEST_CASE("exact cone minimization of a quadratic") {
  SUBCASE("identity over the orthant") {
    Vector arg;
    const double m = min_quadratic_on_cone(Matrix::Identity(2, 2), Matrix(0, 2),
                                           Matrix::Identity(2, 2), &arg);
    CHECK(m == doctest::Approx(1.0));
  }
  SUBCASE("indefinite over the orthant finds the negative direction") {
    Matrix h(2, 2);
    h << 1, 0, 0, -1;
    Vector arg;
    const double m = min_quadratic_on_cone(h, Matrix(0, 2),
                                           Matrix::Identity(2, 2), &arg);
    CHECK(m == doctest::Approx(-1.0));
    CHECK(std::abs(arg[1]) == doctest::Approx(1.0));
  }
  SUBCASE("equality restriction") {
    Matrix h(2, 2);
    h << 1, 0, 0, -1;
    Matrix eq(1, 2);
    eq << 0, 1;  // u2 = 0
    CHECK(min_quadratic_on_cone(h, eq, Matrix(0, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("trivial cone returns +inf") {
    CHECK(min_quadratic_on_cone(Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                                Matrix(0, 2)) == kInf);
  }
  SUBCASE("repeated eigenvalue with a cone slice goes through the LP branch") {
    Matrix ineq(2, 2);
    ineq << 1, 1, 1, -1;
    CHECK(min_quadratic_on_cone(Matrix::Identity(2, 2), Matrix(0, 2), ineq) ==
          doctest::Approx(1.0));
  }
  SUBCASE("brute-force agreement on random cones") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix m(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = rng.normal();
      const Matrix h = 0.5 * (m + m.transpose());
      Matrix ineq(2, 3);
      for (int i = 0; i < 2; ++i) ineq.row(i) = rng.normal_vector(3).transpose();
      Vector arg;
      const double exact = min_quadratic_on_cone(h, Matrix(0, 3), ineq, &arg);
      // dense direct sampling of the cone section: the sampled minimum can
      // only approach the exact one from above
      double best = kInf;
      for (int k = 0; k < 200000; ++k) {
        Vector u = rng.normal_vector(3);
        u.normalize();
        if ((ineq * u).minCoeff() >= 0) best = std::min(best, u.dot(h * u));
      }
      if (best < kInf) {
        CHECK(exact <= best + 1e-9);
        CHECK(exact >= best - 5e-2);  // sampling resolution
        // the reported argmin is feasible and attains the value
        REQUIRE(arg.size() == 3);
        CHECK((ineq * arg).minCoeff() >= -1e-8);
        CHECK(std::abs(arg.norm() - 1.0) <= 1e-9);
        CHECK(arg.dot(h * arg) == doctest::Approx(exact).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("SCOC bordered determinant") {
  SUBCASE("worked example vanishes at the first vertex") {
    const auto inst = fixtures::example94();
    Vector lambda(4);
    lambda << 3.0 / 8, 5.0 / 8, 0, 0;
    const auto probe = scoc_bordered_determinant(inst, lambda);
    REQUIRE(probe.determinants.size() == 1);
    CHECK(probe.subsets[0] == std::vector<int>{0, 1});
    CHECK(std::abs(probe.determinants[0]) <= 1e-9);
    CHECK(probe.any_zero);
    // cross-check against the cofactor oracle on the explicit 5x5 matrix
    Matrix m(5, 5);
    m << 0, -1, 0, 1, -1,
        -1, 0, 0, 0, 0,
        0, 0, 2, -1, -1,
        -1, 0, 1, 0, 0,
        1, 0, 1, 0, 0;
    CHECK(std::abs(det_cofactor(m)) <= 1e-12);
  }
  SUBCASE("identity Hessian with one constraint is nonzero") {
    const auto inst = licq_strict_instance(Matrix::Identity(2, 2));
    Vector lambda = Vector::Ones(1);
    const auto probe = scoc_bordered_determinant(inst, lambda);
    REQUIRE(probe.determinants.size() == 1);
    CHECK(!probe.any_zero);
    // oracle: [[I2, e1],[-e1^T, 0]] has determinant 1
    Matrix m(3, 3);
    m << 1, 0, 1, 0, 1, 0, -1, 0, 0;
    CHECK(det_cofactor(m) == doctest::Approx(probe.determinants[0]));
  }
  SUBCASE("no constraints reduces to det(H)") {
    const auto inst = unconstrained_instance(2 * Matrix::Identity(2, 2));
    const auto probe = scoc_bordered_determinant(inst, Vector(0));
    REQUIRE(probe.determinants.size() == 1);
    CHECK(probe.determinants[0] == doctest::Approx(4.0));
    CHECK(!probe.any_zero);
  }
}

TEST_CASE("GUSOSC on the worked example holds (trivial sampled cones)") {
  const auto inst = fixtures::example94();
  SampleConfig cfg;
  cfg.eta = 1e-2;
  cfg.count = 200;
  const auto rep = gusosc_check(inst, cfg);
  CHECK(rep.holds);
  CHECK(rep.accepted >= 1);
  CHECK(rep.ell_best >= 1e-3);  // +inf sentinel when every cone is trivial
}

TEST_CASE("GUSOSC positive and negative curvature cases") {
  SUBCASE("unconstrained definite base") {
    const auto inst = unconstrained_instance(2 * Matrix::Identity(2, 2));
    SampleConfig cfg;
    cfg.count = 50;
    const auto rep = gusosc_check(inst, cfg);
    CHECK(rep.holds);
    CHECK(rep.ell_best == doctest::Approx(2.0));
  }
  SUBCASE("LICQ instance failing GSSOSC with empty inequality part fails") {
    Matrix q(2, 2);
    q << 1, 0, 0, -1;
    const auto inst = licq_strict_instance(q);
    SampleConfig cfg;
    cfg.count = 50;
    const auto rep = gusosc_check(inst, cfg);
    CHECK(!rep.holds);
    CHECK(rep.ell_best == doctest::Approx(-1.0));
  }
}

TEST_CASE("certificate pipeline on the worked example") {
  const auto inst = fixtures::example94();
  SampleConfig cfg;
  cfg.eta = 1e-2;
  cfg.count = 200;
  const auto rep = certify_full_stability(inst, cfg);
  CHECK(rep.fully_stable);
  CHECK(rep.mfcq.holds);
  CHECK(rep.crcq.holds);
  CHECK(!rep.licq.holds);
  CHECK(!rep.gssosc.holds);
  CHECK(rep.gusosc.holds);
  REQUIRE(rep.scoc.size() == 2);
  bool some_zero = false;
  for (const auto& probe : rep.scoc) some_zero |= probe.any_zero;
  CHECK(some_zero);
  CHECK(!rep.route_disagreement);  // LICQ route inapplicable
}

TEST_CASE("certificate pipeline on unconstrained definite and indefinite bases") {
  SampleConfig cfg;
  cfg.count = 50;
  const auto good = certify_full_stability(
      unconstrained_instance(Matrix::Identity(2, 2)), cfg);
  CHECK(good.fully_stable);
  CHECK(good.licq_route_applicable);
  CHECK(good.licq_route_verdict);
  CHECK(!good.route_disagreement);

  const auto bad = certify_full_stability(
      unconstrained_instance(-Matrix::Identity(2, 2)), cfg);
  CHECK(!bad.fully_stable);
  CHECK(!bad.licq_route_verdict);
  CHECK(!bad.route_disagreement);
}

TEST_CASE("GSSOSC implies GUSOSC on randomized LICQ fixtures") {
  Rng rng(61);
  SampleConfig cfg;
  cfg.count = 60;
  cfg.eta = 1e-2;
  int evaluated = 0;
  while (evaluated < 20) {
    // random symmetric base with eigenvalues bounded away from zero
    Matrix m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = rng.normal();
    Matrix q = 0.5 * (m + m.transpose());
    const double shift = rng.uniform() < 0.5 ? 1.5 : -1.5;
    q += shift * Matrix::Identity(2, 2);
    if (std::abs(min_eigenvalue(q)) < 1e-2) continue;
    const auto inst = licq_strict_instance(q);
    const auto cert = certify_full_stability(inst, cfg);
    if (cert.gssosc.holds) CHECK(cert.gusosc.holds);
    CHECK(!cert.route_disagreement);
    ++evaluated;
  }
  CHECK(evaluated == 20);
}
