#pragma once

#include "varstab/model.hpp"
#include "varstab/polyhedra.hpp"
#include "varstab/types.hpp"

#include <vector>

namespace varstab {

// --- 1-D coderivative tables for gph N_[a,b] ---------------------------------
//
// The graph of the interval normal-cone map is a polyline with five kinds of
// points. The regular/limiting coderivatives at each kind reduce to one of
// five closed subsets of R per direction w. These tables are derived from
// the graph-normal definitions and certified against a brute-force oracle
// before anything else trusts them (see the pointbased test suite).

enum class IntervalPiece {
  kInterior,     // a < x < b, v = 0
  kLowerCorner,  // x = a, v = 0
  kUpperCorner,  // x = b, v = 0
  kLowerRay,     // x = a, v < 0
  kUpperRay,     // x = b, v > 0
  kPoint,        // a == b (graph is the vertical line {a} x R)
};

enum class ZSet { kEmpty, kZero, kNonPos, kNonNeg, kAll };

enum class CoderivativeKind { kRegular, kLimiting };

IntervalPiece classify_interval_graph_point(double a, double b, double x,
                                            double v,
                                            double tolerance = tol::kActive);

ZSet interval_coderivative(IntervalPiece piece, double w, CoderivativeKind kind);

bool zset_contains(ZSet z, double value, double tolerance = 0.0);
bool zset_subset(ZSet inner, ZSet outer);
// inf over zeta in Z of zeta * w; +inf flags the empty set.
double zset_inf_product(ZSet z, double w);

// Coordinatewise coderivative of N_box at (x, v) applied to w.
struct BoxCoderivative {
  bool empty = false;  // some coordinate produced the empty set
  std::vector<ZSet> per_coordinate;
  std::vector<IntervalPiece> pieces;
  // inf over z in the product set of <z, w>; +inf when empty.
  double inf_inner_product(const Vector& w) const;
};

BoxCoderivative coderivative_box_normal(const Vector& lower, const Vector& upper,
                                        const Vector& x, const Vector& v,
                                        const Vector& w, CoderivativeKind kind);

// --- pointbased full-stability conditions -------------------------------------

// The graphical-Lipschitz condition for a (possibly shifted) box potential:
// (0, z) in D* d_x g (x,p,v)(0) forces z = 0. For C(p) = box + S p the
// subdifferential graph is a linear preimage of gph N_box, so the x-part of
// every graph normal determines the p-part as -S^T xi; the implication is
// evaluated through that chain rule.
struct MorReport {
  bool holds = true;
  Vector witness_z;
  std::vector<IntervalPiece> pieces;
};
MorReport check_mor_condition(const IndicatorBox& box, const Vector& x_bar,
                              const Vector& p_bar, const Vector& v_hat);

// Pointbased Lipschitz full-stability test for box-class potentials:
// <H w, w> + <z, w> > 0 over all w != 0 and z in the limiting coderivative,
// with H the x-Jacobian of the base plus the potential's quadratic term.
// Coordinates whose graph point sits on a ray force w_i = 0; on the
// remaining subspace the coderivative contributes infimum zero, so the test
// reduces to positive definiteness of H there.
struct PointbasedLipschitzReport {
  bool holds = false;
  bool mor_holds = false;
  bool curvature_holds = false;
  double min_curvature = kInf;  // +inf when the free subspace is trivial
  Vector witness_w;             // failing direction when curvature fails
  std::vector<int> pinned;      // ray-pinned coordinate indices
};
PointbasedLipschitzReport check_pointbased_lipschitz(const PvsInstance& inst);

// --- outer limits of critical cones -------------------------------------------

struct ConeLimit {
  PolyCone subspace;  // strong and weak limits coincide in finite dimensions
};

// Polyhedral case: H = K_C(x,v) - K_C(x,v) by the face formula.
ConeLimit cone_limit_polyhedral(const Polyhedron& c, const Vector& x_bar,
                                const Vector& v_hat);

// Box case (finite analog of the magnitude-constraint computation):
// H = {u : u_i v_i = 0 for every coordinate}.
ConeLimit cone_limit_box(const Vector& lower, const Vector& upper,
                         const Vector& x_bar, const Vector& v_hat);

// --- PVI positive definiteness -------------------------------------------------

enum class PviVariant {
  kClosure,       // test subspace cl[T - T] ∩ {v}⊥
  kCriticalSpan,  // test subspace K - K
};

struct PviPdReport {
  bool holds = false;
  double min_eigenvalue = kInf;  // +inf when the subspace is trivial
  int subspace_dim = 0;
};

PviPdReport pvi_positive_definiteness(const Matrix& q, const Polyhedron& c,
                                      const Vector& x_bar, const Vector& v_hat,
                                      PviVariant variant);

}  // namespace varstab
