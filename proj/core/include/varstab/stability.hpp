#pragma once

#include "varstab/model.hpp"
#include "varstab/solver.hpp"
#include "varstab/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace varstab {

struct SampleConfig {
  double eta = 1e-2;
  int count = 1000;
  std::uint64_t seed = 42;
  int jobs = 1;
};

// Closed-form moduli of the contraction analysis. The p-sensitivity
// constant gamma_1 appears in two textures: the Holder estimate carries the
// radicand 1 + l^2 L^2 - 2 l kappa while the parallel Lipschitz estimate
// uses 2 l sigma; both are computed and reported side by side (they are not
// reconciled in the source analysis).
struct TheoreticalModuli {
  double kappa0 = 0.0;  // 1 - lambda r
  double kappa = 0.0;   // sigma - r
  double alpha = 0.0;
  double ell1 = 0.0;  // 3 + sqrt(9 + 4 kappa0)
  double ell2 = 0.0;  // 2 sqrt(2 (2 rho + lambda) kappa0)
  double gamma1_holder = kInf;
  double gamma2_holder = kInf;
  bool holder_prefactor_valid = false;
  double gamma1_lipschitz = kInf;
  double gamma2_lipschitz = kInf;
  // echoed inputs
  double sigma = 0.0, big_l = 0.0, r = 0.0, lambda = 0.0, rho = 0.0,
         eta = 0.0, ell_p = 0.0;
};

// Throws ContractionRegimeError when sigma <= r and NumericsError when the
// Lipschitz prefactor denominator is nonpositive (non-contraction).
TheoreticalModuli theoretical_moduli(double sigma, double big_l, double r,
                                     double lambda, double rho,
                                     double eta = 1e-2, double ell_p = 0.0);

// Empirical verification of the full-stability inequality
//   ||dv - 2 kappa dx|| <= ||dv|| + ell * metric(p, q)
// over sampled parameter pairs; metric is d1 + d2 (Lipschitz) or
// sqrt(d1) + d2 (Holder). Every fifth pair holds (p, q) fixed to test the
// canonical-perturbation case at ell = 0.
struct StabilityReport {
  bool holder = false;
  double kappa = 0.0;
  double r = 0.0;
  double ell_estimate = 0.0;
  double canonical_worst = -kInf;  // max of ||dv - 2k dx|| - ||dv||
  bool canonical_pass = false;
  int pairs = 0;
  int canonical_pairs = 0;
  int form_disagreements = 0;  // norm-form vs inner-product-form verdicts
  bool theory_valid = false;
  TheoreticalModuli theory;
  double theory_bound_p = kInf;  // 2 kappa gamma_1
  double theory_bound_q = kInf;  // 2 kappa gamma_2
  std::string backend;
  SampleConfig cfg;
};

StabilityReport verify_lipschitz_full_stability(
    const PvsInstance& inst, const SampleConfig& cfg,
    std::optional<double> r_in = {}, std::optional<double> kappa_override = {});

StabilityReport verify_holder_full_stability(
    const PvsInstance& inst, const SampleConfig& cfg,
    std::optional<double> r_in = {}, std::optional<double> kappa_override = {});

// Hausdorff sensitivity of the projector onto a moving polyhedral set:
//   ||pi(v,p1) - pi(v,p2)|| <= (ell1 theta + ell2 sqrt(theta)) / (2 (1 - l r))
// with theta the local Pompeiu-Hausdorff distance of the two sets.
struct ProxHausdorffReport {
  int samples = 0;
  int violations = 0;
  bool pass = false;
  double lambda = 1.0;
  double r = 0.0;
  double kappa0 = 1.0;
  double rho = 0.0;  // measured localization radius entering ell2
  double ell1 = 0.0;
  double ell2 = 0.0;
  double worst_margin = kInf;  // min over samples of bound - ||dpi||
  double max_theta = 0.0;
  SampleConfig cfg;
};

ProxHausdorffReport verify_prox_hausdorff_estimate(const PvsInstance& inst,
                                                   const SampleConfig& cfg);

// Uniform second-order growth probe: samples can certify failure with a
// witness or report no violation at the given modulus.
struct UsogcReport {
  bool pass = false;
  double worst_violation = 0.0;
  Vector witness_x, witness_u, witness_v;
  int checks = 0;
};

UsogcReport verify_usogc(const PotentialSpec& g, const Vector& x_bar,
                         const Vector& p_bar, const Vector& v_hat, double ell,
                         const SampleConfig& cfg);

// Aubin (Lipschitz-like) modulus estimates for the moving set p -> C(p) and
// for the subdifferential graph p -> gph d_x g(.,p). The graph variant is a
// sampled upper-bound construction.
struct AubinReport {
  double ell_estimate = 0.0;
  int pairs = 0;
  double max_theta = 0.0;
};

AubinReport aubin_modulus_estimate(const PotentialSpec& g, const Vector& x_bar,
                                   const Vector& p_bar, const SampleConfig& cfg);

AubinReport aubin_graph_modulus_estimate(const PotentialSpec& g,
                                         const Vector& x_bar,
                                         const Vector& p_bar,
                                         const Vector& v_hat,
                                         const SampleConfig& cfg);

}  // namespace varstab
