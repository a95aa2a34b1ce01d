#pragma once

#include "varstab/model.hpp"
#include "varstab/stability.hpp"
#include "varstab/types.hpp"

#include <vector>

namespace varstab {

// Certificate pipeline for parametric variational conditions over
// C(p) = {x : phi_i(x,p) <= 0}: constraint qualifications, the Lagrange
// multiplier polytope, and the second-order sufficient conditions.

std::vector<int> active_set(const SmoothIneq& pot, const Vector& x,
                            const Vector& p, double tolerance = tol::kActive);

struct MfcqReport {
  bool holds = false;
  bool vacuous = false;  // no active constraints
  double margin = 0.0;   // +inf sentinel when vacuous
  Vector witness;        // descent direction d with ||d||_inf <= 1
};
MfcqReport mfcq_check(const SmoothIneq& pot, const Vector& x, const Vector& p);

struct LicqReport {
  bool holds = false;
  int rank = 0;
  int active_count = 0;
};
LicqReport licq_check(const SmoothIneq& pot, const Vector& x, const Vector& p);

struct CrcqReport {
  bool holds = false;
  std::vector<int> failing_subset;
  int samples = 0;
};
// Constant rank of every active-gradient subfamily over sampled (x, p) in
// the delta-ball. 2^|I| subsets; rejected past 12 active constraints.
CrcqReport crcq_check(const SmoothIneq& pot, const Vector& x_bar,
                      const Vector& p_bar, double delta, int grid,
                      std::uint64_t seed);

struct MultiplierPolytope {
  std::vector<int> support;        // active index set I
  std::vector<Vector> vertices;    // full-length multiplier vectors
  bool empty = true;
  bool bounded = true;
  double max_residual = 0.0;       // worst stationarity residual at a vertex
};
MultiplierPolytope multipliers(const SmoothIneq& pot, const PvsInstance& inst,
                               const Vector& x, const Vector& p, const Vector& q,
                               const Vector& v);

struct GssoscReport {
  bool holds = false;
  double min_curvature = kInf;
  Vector failing_lambda;
  Vector failing_u;
  int multipliers_checked = 0;
};
// Positive definiteness of the Lagrangian Hessian on the null space of the
// strict-complementarity gradients, quantified over the multiplier set. The
// quantifier is evaluated at every vertex plus interior samples; vertex
// supports are minimal, so vertex verdicts dominate, but the interior
// samples guard the tolerance-driven I_+ classification.
GssoscReport gssosc_check(const PvsInstance& inst, const Vector& x,
                          const Vector& p, const Vector& q, const Vector& v,
                          std::uint64_t seed = 42);

struct GusoscReport {
  bool holds = false;
  double ell_best = kInf;  // +inf when every sampled cone was trivial
  bool vacuous = true;
  int samples = 0;
  int accepted = 0;
  Vector witness_x;
  Vector witness_u;
};
// Uniform second-order condition over sampled graph points of the
// multiplier representation: for each sample and each multiplier vertex,
// the Lagrangian Hessian is minimized exactly over the complementarity
// cone by face enumeration.
GusoscReport gusosc_check(const PvsInstance& inst, const SampleConfig& cfg);

struct ScocProbe {
  std::vector<double> determinants;
  std::vector<std::vector<int>> subsets;
  bool any_zero = false;
};
// Bordered-determinant probe at a multiplier vertex: det [[H, A_J^T],
// [-A_J, 0]] over maximal independent subsets J of the strict support.
ScocProbe scoc_bordered_determinant(const PvsInstance& inst,
                                    const Vector& lambda_vertex);

struct CertificateReport {
  MfcqReport mfcq;
  LicqReport licq;
  CrcqReport crcq;
  MultiplierPolytope lambda;
  GssoscReport gssosc;
  GusoscReport gusosc;
  std::vector<ScocProbe> scoc;  // one probe per multiplier vertex
  bool fully_stable = false;        // MFCQ and CRCQ and GUSOSC
  bool licq_route_applicable = false;
  bool licq_route_verdict = false;  // GSSOSC, meaningful under LICQ
  bool route_disagreement = false;  // software-error flag when LICQ holds
};
CertificateReport certify_full_stability(const PvsInstance& inst,
                                         const SampleConfig& cfg);

// Exact minimum of u^T sym(H) u over the unit sphere intersected with
// {eq u = 0, ineq u >= 0}; +inf when the cone is trivial. Used by the
// GUSOSC cone minimization and exposed for tests.
double min_quadratic_on_cone(const Matrix& h, const Matrix& eq_rows,
                             const Matrix& ineq_rows, Vector* argmin = nullptr);

}  // namespace varstab
