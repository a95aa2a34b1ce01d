#pragma once

#include "varstab/model.hpp"
#include "varstab/types.hpp"

#include <cstdint>
#include <vector>

namespace varstab {

// Query for the proximal mapping P_lambda(v, p) = {x : v in x + lambda d_x g(x,p)}.
struct ProxQuery {
  double lambda = 1.0;
  Vector v;
  Vector p;
};

// Localized solution of the prox inclusion. Indicator potentials reduce to
// the projector onto C(p) (lambda plays no role); the quadratic class
// solves the strongly convex program with matrix I + lambda W, which is the
// unique localization whenever that matrix is positive definite.
Vector prox_map(const PotentialSpec& g, const ProxQuery& query);

struct SubgradientSample {
  Vector x;
  Vector p;
  Vector v;
  double residual = 0.0;
};

// Deterministic samples of gph d_x g within the eta-ball of the reference
// triple. Sample i depends only on (seed, i), so prefixes are stable under
// count changes and worker partitions. p is held at p_bar unless
// perturb_p is set (the hypomonotonicity estimator pairs samples at a
// common parameter value).
std::vector<SubgradientSample> sample_subdifferential_graph(
    const PotentialSpec& g, const Vector& x_bar, const Vector& p_bar,
    const Vector& v_hat, double eta, int count, std::uint64_t seed,
    bool perturb_p = false);

struct ThresholdEstimate {
  double r_est = 0.0;
  enum class Method {
    kHypomonotoneSampling,
    kPointbasedCoderivative,
    kClosedForm,
  } method = Method::kClosedForm;
  double eta = 0.0;
  int samples = 0;
  int usable_pairs = 0;
  double tau = 0.0;  // second-order quotient infimum (pointbased route)
};

// Sampling estimator: R = max(0, sup over sampled pairs at a common p of
// -<v1 - v2, x1 - x2> / ||x1 - x2||^2), pairs below the distance floor
// discarded.
ThresholdEstimate threshold_estimate_hypomonotone(const PotentialSpec& g,
                                                  const Vector& x_bar,
                                                  const Vector& p_bar,
                                                  const Vector& v_hat, double eta,
                                                  int count, std::uint64_t seed);

// Exact pointbased threshold for a parameter-free quadratic-plus-box
// potential: tau0 = inf <z,w>/||w||^2 over the limiting coderivative of
// W x + N_box, which reduces to the smallest eigenvalue of W on the
// coordinates not pinned by a ray piece. R = max(0, -tau0).
ThresholdEstimate threshold_pointbased_box(const QuadraticPlusIndicator& g,
                                           const Vector& x_bar,
                                           const Vector& v_hat);

// Closed-form threshold (or a certified upper bound) per potential class,
// with the prox parameter defaulted by r = R + 0.01 * max(1, sigma - R).
PotentialConstants potential_constants(const PotentialSpec& g,
                                       const Vector& x_bar, const Vector& p_bar,
                                       const Vector& v_hat, double sigma);

}  // namespace varstab
