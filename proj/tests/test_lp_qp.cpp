#include "doctest.h"

#include "varstab/lp.hpp"
#include "varstab/qp.hpp"
#include "varstab/rng.hpp"

#include <cmath>

using namespace varstab;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("simplex solves a textbook LP") {
  // max x1 + x2 s.t. x1 + 2 x2 <= 4, 4 x1 + 2 x2 <= 12, x >= 0
  LpProblem p(2);
  p.c = vec2(-1, -1);
  p.a_ub = Matrix(2, 2);
  p.a_ub << 1, 2, 4, 2;
  p.b_ub = vec2(4, 12);
  p.lb = vec2(0, 0);
  const auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(8.0 / 3).epsilon(1e-9));
  CHECK(r.x[1] == doctest::Approx(2.0 / 3).epsilon(1e-9));
}

TEST_CASE("simplex detects infeasibility and unboundedness") {
  LpProblem p(1);
  p.c = Vector::Ones(1);
  p.a_ub = Matrix(2, 1);
  p.a_ub << 1, -1;
  p.b_ub = vec2(-1, -1);  // x <= -1 and x >= 1
  CHECK(solve_lp(p).status == LpStatus::kInfeasible);

  LpProblem q(1);
  q.c = -Vector::Ones(1);  // max x, no constraints
  CHECK(solve_lp(q).status == LpStatus::kUnbounded);
}

TEST_CASE("simplex handles free variables and equalities") {
  // min x1 + x2 s.t. x1 - x2 = 3, x1 >= 0, x2 free.
  // x1 = 3 + x2 >= 0 forces x2 >= -3; optimum x = (0, -3), value -3.
  LpProblem p(2);
  p.c = vec2(1, 1);
  p.a_eq = Matrix(1, 2);
  p.a_eq << 1, -1;
  p.b_eq = Vector::Constant(1, 3.0);
  p.lb[0] = 0.0;
  const auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.value == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(r.x[0] == doctest::Approx(0.0));
  CHECK(r.x[1] == doctest::Approx(-3.0));
}

TEST_CASE("simplex respects variable bounds") {
  LpProblem p(2);
  p.c = vec2(1, 2);
  p.lb = vec2(-1, -2);
  p.ub = vec2(5, 5);
  const auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(-1));
  CHECK(r.x[1] == doctest::Approx(-2));
}

TEST_CASE("find_feasible_point certifies polyhedra") {
  Matrix g(3, 2);
  g << 1, 1, -1, 0, 0, -1;
  Vector h(3);
  h << 1, 0, 0;
  const auto f = find_feasible_point(g, h);
  REQUIRE(f.feasible);
  CHECK((g * f.x - h).maxCoeff() <= 1e-9);
}

TEST_CASE("cone interior probe finds strictly slack directions") {
  Matrix m(2, 2);
  m << -1, 0, 0, -1;  // R^2_+
  const auto probe = cone_interior_probe(m);
  CHECK(probe.margin > 0.5);
  CHECK((m * probe.w).maxCoeff() < 0);

  Matrix line(2, 1);  // {w : w1 <= 0 and w1 >= 0}: flat, margin 0
  Matrix m2(2, 2);
  m2 << 1, 0, -1, 0;
  CHECK(cone_interior_probe(m2).margin == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("projection onto halfspace matches the closed form") {
  Matrix g(1, 2);
  g << 1, 1;
  Vector h = Vector::Constant(1, 1.0);
  const auto r = project_polyhedron(vec2(2, 0), g, h);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(r.kkt_residual <= 1e-9);
}

TEST_CASE("QP with box constraints and a general quadratic") {
  // min 1/2 x^T P x - c^T x on [0,1]^2 with P = [[2,0],[0,2]], c = (4,-1):
  // unconstrained solution (2, -0.5) clamps to (1, 0).
  Matrix p = 2 * Matrix::Identity(2, 2);
  Matrix g(4, 2);
  g << 1, 0, 0, 1, -1, 0, 0, -1;
  Vector h(4);
  h << 1, 1, 0, 0;
  const auto r = solve_qp(p, vec2(4, -1), g, h);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.x[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.kkt_residual <= 1e-9);
}

TEST_CASE("random projections satisfy KKT and variational inequality") {
  Rng rng(7);
  Matrix g(5, 3);
  Vector h(5);
  for (int trial = 0; trial < 25; ++trial) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
      h[i] = rng.uniform(0.2, 1.5);  // origin strictly feasible
    }
    const Vector v = rng.normal_vector(3) * 2.0;
    const auto r = project_polyhedron(v, g, h);
    REQUIRE(r.kkt_residual <= 1e-8);
    // variational characterization against random feasible points
    for (int k = 0; k < 10; ++k) {
      Vector z = rng.ball(3, 1.0);
      const auto f = find_feasible_point(g, h);
      Vector y = 0.5 * (z + f.x);
      if ((g * y - h).maxCoeff() <= 0)
        CHECK((v - r.x).dot(y - r.x) <= 1e-8);
    }
  }
}

TEST_CASE("NNLS reproduces small known solutions") {
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  const auto r = nnls(a, vec2(-1, 2));
  CHECK(r.z[0] == doctest::Approx(0.0));
  CHECK(r.z[1] == doctest::Approx(2.0));
  CHECK(r.residual == doctest::Approx(1.0));
}

TEST_CASE("distance to generated cone") {
  Matrix gens(2, 2);
  gens << 1, 0, 0, 1;  // R^2_+
  CHECK(distance_to_generated_cone(vec2(1, 1), gens) <= 1e-12);
  CHECK(distance_to_generated_cone(vec2(-1, 0), gens) == doctest::Approx(1.0));
  Matrix lin(2, 1);
  lin << 0, 1;
  CHECK(distance_to_generated_cone(vec2(-1, 5), Matrix(2, 0), lin) ==
        doctest::Approx(1.0));
}
