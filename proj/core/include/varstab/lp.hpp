#pragma once

#include "varstab/types.hpp"

namespace varstab {

// Dense two-phase tableau simplex with Bland's rule. Desk scale only:
// every LP in this library has a handful of rows and columns, so a full
// tableau with anti-cycling pivoting is simpler and more predictable than
// bringing in an external solver.
struct LpProblem {
  Vector c;                // minimize c^T x
  Matrix a_ub;             // a_ub x <= b_ub
  Vector b_ub;
  Matrix a_eq;             // a_eq x == b_eq
  Vector b_eq;
  Vector lb;               // elementwise bounds, +-inf allowed
  Vector ub;

  explicit LpProblem(int n);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double value = 0.0;
};

LpResult solve_lp(const LpProblem& p);

// Feasibility of {x : G x <= h, a_eq x = b_eq}; returns a point if nonempty.
struct FeasibilityResult {
  bool feasible = false;
  Vector x;
};
FeasibilityResult find_feasible_point(const Matrix& g, const Vector& h);

// Relative-interior probe for the cone {w : M w <= 0} with a bound
// ||w||_inf <= 1: maximizes the minimum slack t with M w <= -t. Returns
// t* and the witness. t* > 0 means a strictly slack direction exists.
struct InteriorProbe {
  double margin = 0.0;
  Vector w;
};
InteriorProbe cone_interior_probe(const Matrix& m);

}  // namespace varstab
