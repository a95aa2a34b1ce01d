#pragma once

#include "varstab/types.hpp"

#include <optional>
#include <vector>

namespace varstab {

// Primal active-set method for the strictly convex program
//   min  1/2 x^T P x - c^T x   s.t.  G x <= h
// with dense P > 0. Bland-style smallest-index tie breaking on both the
// drop and the blocking step keeps degenerate vertices from cycling.
struct QpResult {
  Vector x;
  Vector mult;            // one multiplier per row of G, zero off the active set
  std::vector<int> active;
  int iterations = 0;
  double kkt_residual = 0.0;
};

QpResult solve_qp(const Matrix& p, const Vector& c, const Matrix& g,
                  const Vector& h, std::optional<Vector> feasible_start = {},
                  int max_iter = 0);

// Euclidean projection of v onto {x : G x <= h}.
QpResult project_polyhedron(const Vector& v, const Matrix& g, const Vector& h,
                            std::optional<Vector> feasible_start = {});

// Lawson-Hanson nonnegative least squares min ||A z - b||, z >= 0.
// Columns flagged in `free_cols` are unconstrained in sign (they are kept
// permanently in the passive set).
struct NnlsResult {
  Vector z;
  double residual = 0.0;
};

NnlsResult nnls(const Matrix& a, const Vector& b,
                const std::vector<bool>& free_cols = {});

// Distance from v to cone{columns of gens} + span{columns of lin}.
double distance_to_generated_cone(const Vector& v, const Matrix& gens,
                                  const Matrix& lin = Matrix(0, 0));

}  // namespace varstab
