#pragma once

// Brute-force oracles used by the unit and acceptance suites. They are
// deliberately independent of the library implementation paths they check:
// the interval-coderivative oracle works from dense samples of the graph of
// N_[a,b] and the definition of regular/limiting normals; the inclusion
// oracle scans a grid; the Painleve-Kuratowski oracle collects critical
// cones at exactly-constructed nearby graph points.

#include "varstab/model.hpp"
#include "varstab/pointbased.hpp"
#include "varstab/polyhedra.hpp"
#include "varstab/types.hpp"

#include <vector>

namespace oracles {

using varstab::Matrix;
using varstab::Vector;

// Is `dir` a regular normal to gph N_[a,b] at `point`? Decided against a
// dense sample of graph points near `point`.
bool interval_graph_regular_normal(double a, double b, const Vector& point,
                                   const Vector& dir);

// Limiting normal via sampled outer limits of regular normal cones.
bool interval_graph_limiting_normal(double a, double b, const Vector& point,
                                    const Vector& dir);

// Coderivative set Z(w) at a graph point, classified from the normal-cone
// oracle above.
varstab::ZSet interval_coderivative_oracle(double a, double b, double x,
                                           double v, double w,
                                           varstab::CoderivativeKind kind);

// Minimizer of the inclusion residual dist(v - f(x,p,q), d_x g(x,p)) over a
// uniform grid on [lo, hi]^n, for brute-force solution checks.
struct GridSearchResult {
  Vector x;
  double residual = 0.0;
  std::vector<Vector> near_optimal;  // all grid points within `band` of best
};
GridSearchResult inclusion_grid_search(const varstab::PvsInstance& inst,
                                       const Vector& v, const Vector& p,
                                       const Vector& q, double lo, double hi,
                                       int points_per_axis, double band = 1e-3);

// Sampled Painleve-Kuratowski membership oracle for the outer limit of
// critical cones K_C(x_k, v_k) as (x_k, v_k) -> (x_bar, v_hat) on gph N_C.
// Builds nearby graph points along critical directions (exact graph points
// for polyhedral data) and tests dist(d, K_C(x_k, v_k)) for each.
class ConeLimitOracle {
 public:
  ConeLimitOracle(const varstab::Polyhedron& c, const Vector& x_bar,
                  const Vector& v_hat, double step);

  // true iff some sampled nearby critical cone contains d (within tol).
  bool limit_contains(const Vector& d, double tolerance = 1e-7) const;
  int sample_count() const { return int(cones_.size()); }

 private:
  std::vector<varstab::PolyCone> cones_;
};

}  // namespace oracles
