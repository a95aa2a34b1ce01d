#pragma once

#include "varstab/model.hpp"
#include "varstab/prox.hpp"
#include "varstab/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varstab {

// The contractive regime sigma > r > threshold does not hold.
struct ContractionRegimeError : Error {
  using Error::Error;
};

struct SolverConfig {
  std::optional<double> lambda;  // defaults to select_lambda
  std::optional<double> r;       // defaults to the potential-constants rule
  double tol = 1e-10;
  int max_iter = 10000;
  std::optional<Vector> start;   // defaults to the reference point
  double ratio_slack = 0.01;     // tolerated excess over alpha per step
  int divergence_window = 25;    // consecutive bad ratios before giving up
  bool keep_trace = false;       // record the iterate sequence
};

struct SolveResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double measured_rate = 0.0;  // max step ratio while steps were meaningful
  double alpha_theoretical = 0.0;
  double fixed_point_residual = 0.0;
  double inclusion_residual = 0.0;
  bool super_contractive = false;  // contraction radicand clamped at zero
  double lambda = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  double big_l = 0.0;
  double kappa = 0.0;  // sigma - r
  double threshold = 0.0;
  std::vector<Vector> trace;  // iterates x_0, x_1, ... when keep_trace is set
};

// Step size with 2(sigma - r) > lambda (L^2 - r^2) by a factor-2 margin,
// capped at min(0.9/r, 1). Throws ContractionRegimeError when sigma <= r.
double select_lambda(double sigma, double big_l, double r);

struct ContractionFactor {
  double alpha = 0.0;
  bool clamped = false;  // negative radicand reported as super-contractive
};
ContractionFactor contraction_factor(double lambda, double sigma, double big_l,
                                     double r);

// Fixed-point iteration x <- prox_lambda(x + lambda v - lambda f(x,p,q), p)
// from the reference point, with contraction-rate bookkeeping. Throws
// ContractionRegimeError when sigma <= r, LimitError past max_iter, and
// NumericsError if the measured ratio persistently exceeds alpha or the
// final membership residual fails.
SolveResult solve(const PvsInstance& inst, const Vector& v, const Vector& p,
                  const Vector& q, const SolverConfig& cfg = {});

// Diagnostic for instances outside the contractive regime. For diagonal
// bases over orthant-like boxes it additionally decides solvability at the
// given parameters and reports the coordinate witnessing emptiness.
struct FailureProbe {
  double sigma = 0.0;
  double threshold = 0.0;
  bool refused = false;         // sigma <= threshold: contraction not attempted
  bool solvability_known = false;
  bool empty = false;           // no solution at these parameters
  int witness_coordinate = -1;  // coordinate of the necessity violation
  std::string note;
};
FailureProbe solve_certified_failure_probe(const PvsInstance& inst,
                                           const Vector& v, const Vector& p,
                                           const Vector& q);

// Exhaustive face-enumeration solver for affine bases over polyhedral
// potentials: returns every solution of the inclusion inside the ball
// around `center`. Exact up to KKT linear solves; independent of the
// contraction machinery (works for indefinite bases).
std::vector<Vector> enumerate_solutions(const PvsInstance& inst, const Vector& v,
                                        const Vector& p, const Vector& q,
                                        const Vector& center, double radius);

}  // namespace varstab
