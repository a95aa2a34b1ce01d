#pragma once

#include "varstab/qp.hpp"
#include "varstab/types.hpp"

#include <vector>

namespace varstab {

// Convex polyhedron {x : G x <= h}. Nonemptiness is certified by a
// feasibility solve at construction and a feasible point is cached for
// warm-starting projections.
class Polyhedron {
 public:
  Polyhedron(Matrix g, Vector h);

  static Polyhedron box(const Vector& lower, const Vector& upper);
  static Polyhedron nonnegative_orthant(int n);

  const Matrix& g() const { return g_; }
  const Vector& h() const { return h_; }
  int dim() const { return int(g_.cols()); }
  const Vector& feasible_point() const { return feasible_; }

  bool contains(const Vector& x, double tolerance = tol::kActive) const;
  std::vector<int> active_rows(const Vector& x,
                               double tolerance = tol::kActive) const;

  // All vertices (empty when the set has none, e.g. contains a line).
  std::vector<Vector> vertices() const;

  // Intersection with another inequality system (rows are appended).
  Polyhedron intersect(const Matrix& g2, const Vector& h2) const;

 private:
  Matrix g_;
  Vector h_;
  Vector feasible_;
};

// Polyhedral cone kept in both representations:
//   {w : M w <= 0}  ==  span(lineality columns) + cone(ray columns).
struct PolyCone {
  Matrix m;          // inequality rows
  Matrix rays;       // columns, unit norm
  Matrix lineality;  // orthonormal columns

  int dim() const { return int(m.cols()); }
  bool contains(const Vector& w, double tolerance = tol::kActive) const;
  bool contains_generator_form(const Vector& w,
                               double tolerance = tol::kActive) const;
  // Distance from w to the cone (via the generator form).
  double distance(const Vector& w) const;
  bool is_subspace(double tolerance = tol::kActive) const;

  static PolyCone from_inequalities(const Matrix& m);
  static PolyCone from_generators(const Matrix& rays, const Matrix& lineality);
  static PolyCone subspace(const Matrix& basis, int n);
  static PolyCone full_space(int n);
  static PolyCone zero(int n);

  PolyCone polar() const;
};

// --- cone calculus at a point of a polyhedron ------------------------------

PolyCone tangent_cone(const Polyhedron& c, const Vector& x);
PolyCone normal_cone(const Polyhedron& c, const Vector& x);
// K_C(x, v) = T_C(x) ∩ {v}⊥; v must be normal to C at x.
PolyCone critical_cone(const Polyhedron& c, const Vector& x, const Vector& v);
// K - K returned as a subspace (orthonormal lineality basis).
PolyCone cone_difference_span(const PolyCone& k);

// --- faces -----------------------------------------------------------------

struct ConeFace {
  std::vector<int> equality;    // rows held at zero
  std::vector<int> inequality;  // remaining rows (strict on the rel. interior)
  Vector witness;               // relative-interior point (zero for the apex)
  int dim = 0;
};

// Every face of {w : M w <= 0} as an equality/inequality index partition.
// Throws LimitError beyond 20 rows.
std::vector<ConeFace> face_enumeration(const PolyCone& k);

// --- local Pompeiu-Hausdorff distance ---------------------------------------

struct LocalHausdorff {
  double theta = 0.0;
  Vector center;
  double radius = 0.0;
  double slack = 0.0;  // overestimation bound of the computation
};

// Pompeiu-Hausdorff distance between c1 and c2 localized to the sup-norm
// ball around `center` (the ball is the box relaxation of B_radius): each
// truncated set is compared against the other full set, both directions.
// dist(.) to a polyhedron is convex, so the exact maximum over the bounded
// truncation is attained at a vertex; no sampling error remains.
LocalHausdorff hausdorff_local(const Polyhedron& c1, const Polyhedron& c2,
                               const Vector& center, double radius);

}  // namespace varstab
