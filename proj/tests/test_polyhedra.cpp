#include "doctest.h"

#include "varstab/linalg.hpp"
#include "varstab/polyhedra.hpp"
#include "varstab/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace varstab;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Polyhedron unit_square() {
  Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  return Polyhedron::box(lo, hi);
}

// Random polyhedron in R^n containing the origin with slack.
Polyhedron random_polyhedron(Rng& rng, int n, int rows) {
  Matrix g(rows, n);
  Vector h(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    h[i] = rng.uniform(0.3, 1.5);
  }
  return Polyhedron(g, h);
}

}  // namespace

TEST_CASE("projection examples from the cone geometry") {
  const auto orthant = Polyhedron::nonnegative_orthant(2);
  auto p = project_polyhedron(vec2(1, -1), orthant.g(), orthant.h(),
                              orthant.feasible_point());
  CHECK((p.x - vec2(1, 0)).norm() <= 1e-10);

  const auto sq = unit_square();
  auto q = project_polyhedron(vec2(0.3, 0.4), sq.g(), sq.h(), sq.feasible_point());
  CHECK((q.x - vec2(0.3, 0.4)).norm() <= 1e-10);
}

TEST_CASE("projection is idempotent and 1-Lipschitz") {
  Rng rng(42);
  const auto sq = unit_square();
  for (int k = 0; k < 1000; ++k) {
    const Vector x = rng.normal_vector(2) * 2.0;
    const Vector y = rng.normal_vector(2) * 2.0;
    const auto px = project_polyhedron(x, sq.g(), sq.h(), sq.feasible_point()).x;
    const auto py = project_polyhedron(y, sq.g(), sq.h(), sq.feasible_point()).x;
    CHECK((px - py).norm() <= (x - y).norm() + 1e-9);
    const auto ppx = project_polyhedron(px, sq.g(), sq.h(), sq.feasible_point()).x;
    CHECK((ppx - px).norm() <= 1e-9);
  }
}

TEST_CASE("variational characterization at the vertices") {
  Rng rng(3);
  const auto sq = unit_square();
  const auto verts = sq.vertices();
  REQUIRE(verts.size() == 4);
  for (int k = 0; k < 50; ++k) {
    const Vector x = rng.normal_vector(2) * 3.0;
    const auto px = project_polyhedron(x, sq.g(), sq.h(), sq.feasible_point()).x;
    for (const auto& c : verts) CHECK((x - px).dot(c - px) <= 1e-9);
  }
}

TEST_CASE("tangent cones of the orthant and square") {
  const auto orthant = Polyhedron::nonnegative_orthant(2);
  const auto t_edge = tangent_cone(orthant, vec2(0, 1));
  CHECK(t_edge.contains(vec2(1, 5)));
  CHECK(t_edge.contains(vec2(0, -3)));
  CHECK(!t_edge.contains(vec2(-1, 0)));

  const auto t_corner = tangent_cone(orthant, vec2(0, 0));
  CHECK(t_corner.contains(vec2(2, 3)));
  CHECK(!t_corner.contains(vec2(-0.1, 1)));

  const auto sq = unit_square();
  const auto t_top = tangent_cone(sq, vec2(1, 1));
  CHECK(t_top.contains(vec2(-1, -1)));
  CHECK(!t_top.contains(vec2(0.1, 0)));

  CHECK_THROWS_AS(tangent_cone(orthant, vec2(-1, 0)), ValidationError);
}

TEST_CASE("normal cone is the polar of the tangent cone") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_polyhedron(rng, 3, 5);
    // walk to the boundary by projecting an outside point
    const Vector far = rng.normal_vector(3) * 5.0;
    const Vector x =
        project_polyhedron(far, c.g(), c.h(), c.feasible_point()).x;
    const auto t = tangent_cone(c, x);
    const auto n = normal_cone(c, x);
    const auto polar = t.polar();
    for (int k = 0; k < 100; ++k) {
      const Vector d = rng.normal_vector(3);
      CHECK(n.contains_generator_form(d) == polar.contains_generator_form(d));
      // membership agreement between the two representations
      CHECK(n.contains(d, 1e-7) == n.contains_generator_form(d, 1e-7));
    }
  }
}

TEST_CASE("normal cone examples") {
  const auto orthant = Polyhedron::nonnegative_orthant(2);
  const auto n_origin = normal_cone(orthant, vec2(0, 0));
  CHECK(n_origin.contains_generator_form(vec2(-1, -2)));
  CHECK(!n_origin.contains_generator_form(vec2(0.1, -1)));
  const auto n_edge = normal_cone(orthant, vec2(0, 1));
  CHECK(n_edge.contains_generator_form(vec2(-3, 0)));
  CHECK(!n_edge.contains_generator_form(vec2(-3, -0.1)));
  const auto n_interior = normal_cone(orthant, vec2(1, 1));
  CHECK(n_interior.contains_generator_form(Vector::Zero(2)));
  CHECK(!n_interior.contains_generator_form(vec2(1e-3, 0)));
}

TEST_CASE("critical cone examples") {
  const auto orthant = Polyhedron::nonnegative_orthant(2);
  const auto k1 = critical_cone(orthant, vec2(0, 0), vec2(-1, 0));
  CHECK(k1.contains(vec2(0, 2)));
  CHECK(!k1.contains(vec2(0.1, 1)));
  CHECK(!k1.contains(vec2(0, -0.1)));

  // v = 0 gives back the tangent cone
  const auto k0 = critical_cone(orthant, vec2(0, 0), vec2(0, 0));
  CHECK(k0.contains(vec2(1, 1)));

  const auto sq = unit_square();
  const auto kc = critical_cone(sq, vec2(0, 0), vec2(-1, -1));
  CHECK(kc.contains(Vector::Zero(2)));
  CHECK(!kc.contains(vec2(0.1, 0)));
  CHECK(!kc.contains(vec2(1, -1)));

  CHECK_THROWS_AS(critical_cone(orthant, vec2(0, 0), vec2(1, 1)),
                  ValidationError);
}

TEST_CASE("critical cone members are tangent and orthogonal to v") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_polyhedron(rng, 3, 4);
    const Vector far = rng.normal_vector(3) * 4.0;
    const Vector x = project_polyhedron(far, c.g(), c.h(), c.feasible_point()).x;
    const Vector v = far - x;  // outward normal by projection
    const auto k = critical_cone(c, x, v);
    const auto t = tangent_cone(c, x);
    for (int j = 0; j < k.rays.cols(); ++j) {
      CHECK(t.contains(k.rays.col(j), 1e-8));
      CHECK(std::abs(v.dot(k.rays.col(j))) <= 1e-8 * std::max(1.0, v.norm()));
    }
    for (int j = 0; j < k.lineality.cols(); ++j) {
      CHECK(t.contains(k.lineality.col(j), 1e-8));
      CHECK(std::abs(v.dot(k.lineality.col(j))) <= 1e-8 * std::max(1.0, v.norm()));
    }
  }
}

TEST_CASE("cone difference span") {
  // K = {0} x R_+  ->  K - K = {0} x R
  Matrix rays(2, 1);
  rays << 0, 1;
  const auto k = PolyCone::from_generators(rays, Matrix(2, 0));
  const auto s = cone_difference_span(k);
  CHECK(s.lineality.cols() == 1);
  CHECK(s.contains_generator_form(vec2(0, -7)));
  CHECK(!s.contains_generator_form(vec2(1, 0)));

  // K = R^2_+ -> span is the whole plane
  Matrix rays2(2, 2);
  rays2 << 1, 0, 0, 1;
  const auto k2 = PolyCone::from_generators(rays2, Matrix(2, 0));
  CHECK(cone_difference_span(k2).lineality.cols() == 2);

  // K = {0}
  const auto k3 = PolyCone::zero(2);
  const auto s3 = cone_difference_span(k3);
  CHECK(s3.lineality.cols() == 0);
  CHECK(s3.contains_generator_form(Vector::Zero(2)));
}

TEST_CASE("difference span is closed under negation and addition") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_polyhedron(rng, 3, 4);
    const Vector far = rng.normal_vector(3) * 4.0;
    const Vector x = project_polyhedron(far, c.g(), c.h(), c.feasible_point()).x;
    const auto k = tangent_cone(c, x);
    const auto s = cone_difference_span(k);
    for (int j = 0; j < k.rays.cols(); ++j) {
      CHECK(s.contains_generator_form(k.rays.col(j)));
      CHECK(s.contains_generator_form(-k.rays.col(j)));
    }
    if (k.rays.cols() >= 2)
      CHECK(s.contains_generator_form(k.rays.col(0) + k.rays.col(1)));
  }
}

TEST_CASE("face enumeration on small cones") {
  const auto orthant2 = PolyCone::from_inequalities(-Matrix::Identity(2, 2));
  CHECK(face_enumeration(orthant2).size() == 4);

  Matrix halfplane(1, 2);
  halfplane << 1, 0;  // w1 <= 0
  CHECK(face_enumeration(PolyCone::from_inequalities(halfplane)).size() == 2);

  CHECK(face_enumeration(PolyCone::zero(2)).size() == 1);

  const auto orthant3 = PolyCone::from_inequalities(-Matrix::Identity(3, 3));
  CHECK(face_enumeration(orthant3).size() == 8);
}

TEST_CASE("face enumeration matches ray counts from double description") {
  // faces of dimension 1 of a pointed cone are exactly its extreme rays
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix m(4, 3);
    for (int i = 0; i < 4; ++i) {
      Vector row = rng.normal_vector(3);
      row[2] = -std::abs(row[2]) - 0.5;  // all normals point "down": pointed-ish
      m.row(i) = row.transpose();
    }
    const auto k = PolyCone::from_inequalities(m);
    if (k.lineality.cols() > 0) continue;  // not pointed, skip
    const auto faces = face_enumeration(k);
    int dim1 = 0;
    for (const auto& f : faces) dim1 += (f.dim == 1);
    CHECK(dim1 == k.rays.cols());
  }
}

TEST_CASE("local Hausdorff distance on boxes") {
  const auto a = unit_square();
  Vector hi(2);
  hi << 1.2, 1.0;
  const auto b = Polyhedron::box(Vector::Zero(2), hi);
  const auto h = hausdorff_local(a, b, Vector::Zero(2), 10.0);
  CHECK(h.theta == doctest::Approx(0.2).epsilon(1e-6));

  const auto same = hausdorff_local(a, a, Vector::Zero(2), 10.0);
  CHECK(same.theta <= 1e-10);

  const auto i1 = Polyhedron::box(Vector::Zero(1), Vector::Ones(1));
  Vector lo(1), up(1);
  lo << 0.1;
  up << 1.1;
  const auto i2 = Polyhedron::box(lo, up);
  CHECK(hausdorff_local(i1, i2, Vector::Zero(1), 5.0).theta ==
        doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("generator and inequality representations agree on probes") {
  Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) m.row(i) = rng.normal_vector(3).transpose();
    const auto k = PolyCone::from_inequalities(m);
    for (int j = 0; j < 100; ++j) {
      const Vector w = rng.normal_vector(3);
      CHECK(k.contains(w, 1e-7) == k.contains_generator_form(w, 1e-7));
    }
  }
}
