#pragma once

#include "varstab/polyhedra.hpp"
#include "varstab/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace varstab {

struct Dims {
  int n = 0;  // decision
  int l = 0;  // p-parameter
  int m = 0;  // q-parameter
};

// Affine base map f(x, p, q) = c + Q x + B p + D q.
struct BaseMapSpec {
  Vector c;
  Matrix q;
  Matrix b;
  Matrix d;

  Vector evaluate(const Vector& x, const Vector& p, const Vector& qq) const;
  // Smallest eigenvalue of (Q + Q^T)/2; exact global monotonicity modulus
  // for an affine map.
  double strong_monotonicity_modulus() const;
};

struct LipschitzReport {
  double concatenated = 0.0;  // sigma_max of [Q B D]
  double max_block = 0.0;     // max(||Q||, ||B||, ||D||), the sum-metric constant
};

// --- potential g(x, p) ------------------------------------------------------

// g = indicator of the fixed polyhedron {x : G x <= h}.
struct IndicatorPolyhedron {
  Matrix g;
  Vector h;
};

// g = indicator of C(p) = {x : A x <= p, x >= 0}.
struct IndicatorAffineQvi {
  Matrix a;  // d x n
};

// g = indicator of box + S p (S empty means a fixed box). Bounds may be
// +-inf componentwise.
struct IndicatorBox {
  Vector lower;
  Vector upper;
  Matrix shift;  // n x l or 0 x 0
};

struct QuadraticPlusIndicator;
struct SmoothIneq;

using PotentialSpec =
    std::variant<IndicatorPolyhedron, IndicatorAffineQvi, IndicatorBox,
                 QuadraticPlusIndicator, SmoothIneq>;

// g = delta_C + 1/2 x^T W x with an indicator inner part.
struct QuadraticPlusIndicator {
  Matrix w;  // symmetric n x n
  std::variant<IndicatorPolyhedron, IndicatorAffineQvi, IndicatorBox> inner;
};

// g = indicator of C(p) = {x : phi_i(x,p) <= 0} with
// phi_i = 1/2 x^T A_i x + b_i^T x + g_i^T p + d_i.
struct SmoothIneqConstraint {
  Matrix a;  // n x n symmetric, may be zero
  Vector b;  // n
  Vector g;  // l
  double d = 0.0;
};
struct SmoothIneq {
  std::vector<SmoothIneqConstraint> constraints;
  int dim = 0;  // decision dimension, consulted only when constraints is empty

  double value(int i, const Vector& x, const Vector& p) const;
  Vector gradient_x(int i, const Vector& x) const;
  const Matrix& hessian_x(int i) const { return constraints[i].a; }
  int count() const { return int(constraints.size()); }
  bool affine_in_x() const;
};

bool potential_depends_on_p(const PotentialSpec& g);
bool potential_is_polyhedral(const PotentialSpec& g);
// Inner feasible set as a polyhedron in x (throws for quadratic SmoothIneq).
Polyhedron potential_domain(const PotentialSpec& g, const Vector& p);
// Quadratic term W (zero for pure indicators).
Matrix potential_quadratic(const PotentialSpec& g, int n);
// g(x, p); +inf off the domain (feasibility tolerance tol::kActive).
double potential_value(const PotentialSpec& g, const Vector& x, const Vector& p);
// Distance from v to the partial subdifferential of g at (x, p). Includes
// the feasibility violation of x so a clean zero certifies graph membership.
double subgradient_distance(const PotentialSpec& g, const Vector& x,
                            const Vector& p, const Vector& v);

// --- instance ---------------------------------------------------------------

struct ReferencePoint {
  Vector x;
  Vector p;
  Vector q;
  Vector v;
};

struct PotentialConstants {
  double r = 0.0;       // chosen prox parameter
  double threshold = 0.0;  // threshold of prox-regularity
  enum class Provenance { kClosedForm, kEstimated } provenance =
      Provenance::kClosedForm;
};

class PvsInstance {
 public:
  PvsInstance(Dims dims, BaseMapSpec base, PotentialSpec potential,
              ReferencePoint reference);

  const Dims& dims() const { return dims_; }
  const BaseMapSpec& base() const { return base_; }
  const PotentialSpec& potential() const { return potential_; }
  const ReferencePoint& reference() const { return reference_; }

  Vector evaluate_base(const Vector& x, const Vector& p, const Vector& q) const;
  double strong_monotonicity_modulus() const;
  LipschitzReport lipschitz_modulus() const;

  // v_hat = v_bar - f(x_bar, p_bar, q_bar), recomputed on demand.
  Vector v_hat() const;
  double reference_residual() const;

 private:
  Dims dims_;
  BaseMapSpec base_;
  PotentialSpec potential_;
  ReferencePoint reference_;
};

}  // namespace varstab
