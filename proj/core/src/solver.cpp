#include "varstab/solver.hpp"

#include "varstab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace varstab {

double select_lambda(double sigma, double big_l, double r) {
  if (!(sigma > r))
    throw ContractionRegimeError(
        "select_lambda: sigma <= r, the contraction regime requires sigma > "
        "r > threshold");
  double lambda = 1.0;
  if (r > 0) lambda = std::min(lambda, 0.9 / r);
  if (big_l > r) {
    const double half_bound = (sigma - r) / (big_l * big_l - r * r);
    lambda = std::min(lambda, half_bound);
  }
  return lambda;
}

ContractionFactor contraction_factor(double lambda, double sigma, double big_l,
                                     double r) {
  if (!(lambda > 0) || (r > 0 && lambda >= 1.0 / r))
    throw ValidationError("contraction_factor: lambda outside (0, 1/r)");
  const double radicand = 1.0 - 2.0 * lambda * sigma + lambda * lambda * big_l * big_l;
  ContractionFactor out;
  if (radicand < 0) {
    out.alpha = 0.0;
    out.clamped = true;
    return out;
  }
  out.alpha = std::sqrt(radicand) / (1.0 - r * lambda);
  return out;
}

SolveResult solve(const PvsInstance& inst, const Vector& v, const Vector& p,
                  const Vector& q, const SolverConfig& cfg) {
  SolveResult res;
  res.sigma = inst.strong_monotonicity_modulus();
  res.big_l = inst.lipschitz_modulus().concatenated;

  const auto constants = potential_constants(
      inst.potential(), inst.reference().x, inst.reference().p, inst.v_hat(),
      res.sigma);
  res.threshold = constants.threshold;
  res.r = cfg.r.value_or(constants.r);
  if (!(res.sigma > res.r))
    throw ContractionRegimeError(
        "solve: sigma <= r; the instance is outside the contraction regime "
        "(run the failure probe)");
  res.lambda = cfg.lambda.value_or(select_lambda(res.sigma, res.big_l, res.r));
  if (!(res.lambda > 0) || (res.r > 0 && res.lambda * res.r >= 1.0))
    throw ValidationError("solve: lambda outside (0, 1/r)");
  if (!(2.0 * (res.sigma - res.r) >
        res.lambda * (res.big_l * res.big_l - res.r * res.r)))
    throw ValidationError("solve: contraction inequality fails for this lambda");
  const auto factor =
      contraction_factor(res.lambda, res.sigma, res.big_l, res.r);
  res.alpha_theoretical = factor.alpha;
  res.super_contractive = factor.clamped;
  res.kappa = res.sigma - res.r;

  Vector x = cfg.start.value_or(inst.reference().x);
  auto apply_h = [&](const Vector& xx) {
    const Vector w = xx + res.lambda * v - res.lambda * inst.evaluate_base(xx, p, q);
    return prox_map(inst.potential(), {res.lambda, w, p});
  };

  if (cfg.keep_trace) res.trace.push_back(x);
  double prev_step = -1.0;
  int bad_ratio_run = 0;
  const double step_floor = std::max(100.0 * cfg.tol, 1e-12);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const Vector xn = apply_h(x);
    const double step = (xn - x).norm();
    if (prev_step > step_floor && step > step_floor) {
      const double ratio = step / prev_step;
      res.measured_rate = std::max(res.measured_rate, ratio);
      if (ratio > res.alpha_theoretical + cfg.ratio_slack)
        ++bad_ratio_run;
      else
        bad_ratio_run = 0;
      if (bad_ratio_run >= cfg.divergence_window)
        throw NumericsError(
            "solve: measured contraction ratio persistently above alpha; the "
            "model constants look wrong");
    }
    prev_step = step;
    x = xn;
    if (cfg.keep_trace) res.trace.push_back(x);
    res.iterations = k;
    if (step <= cfg.tol) {
      res.converged = true;
      break;
    }
    // early exit on exact membership (constant maps converge in one step)
    if (k == 1) {
      const double rr = subgradient_distance(inst.potential(), x, p,
                                             v - inst.evaluate_base(x, p, q));
      if (rr <= cfg.tol) {
        res.converged = true;
        break;
      }
    }
  }
  if (!res.converged)
    throw LimitError("solve: max_iter exceeded before convergence");

  res.x = x;
  res.fixed_point_residual = (apply_h(x) - x).norm();
  res.inclusion_residual = subgradient_distance(inst.potential(), x, p,
                                                v - inst.evaluate_base(x, p, q));
  if (res.inclusion_residual > tol::kProxResidual) {
    std::ostringstream os;
    os << "solve: converged iterate violates the inclusion, residual = "
       << res.inclusion_residual;
    throw NumericsError(os.str());
  }
  return res;
}

FailureProbe solve_certified_failure_probe(const PvsInstance& inst,
                                           const Vector& v, const Vector& p,
                                           const Vector& q) {
  FailureProbe probe;
  probe.sigma = inst.strong_monotonicity_modulus();
  const auto constants = potential_constants(
      inst.potential(), inst.reference().x, inst.reference().p, inst.v_hat(),
      probe.sigma);
  probe.threshold = constants.threshold;
  if (probe.sigma > probe.threshold) {
    probe.refused = false;
    probe.note = "sigma > threshold: the contraction solver applies, use solve";
    return probe;
  }
  probe.refused = true;
  probe.note = "sigma <= threshold of prox-regularity: no contraction certificate";

  // Solvability necessity for diagonal (Q + W) over a lower-bounded box with
  // inactive upper bounds: per coordinate, alpha_i - m_i x_i must enter
  // N_{[0,inf)}(x_i - a_i); with m_i <= 0 this forces alpha_i <= 0.
  const auto* quad = std::get_if<QuadraticPlusIndicator>(&inst.potential());
  const IndicatorBox* box =
      quad ? std::get_if<IndicatorBox>(&quad->inner) : nullptr;
  if (box == nullptr) return probe;
  const int n = inst.dims().n;
  Matrix m_eff = inst.base().q + quad->w;
  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int j = 0; j < n && diagonal; ++j)
      if (i != j && std::abs(m_eff(i, j)) > 1e-12) diagonal = false;
  bool lower_only = true;
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(box->lower[i]) || std::isfinite(box->upper[i]))
      lower_only = false;
  if (!diagonal || !lower_only || box->shift.size() > 0) return probe;

  probe.solvability_known = true;
  const Vector alpha = v - inst.evaluate_base(box->lower, p, q) -
                       quad->w * box->lower;
  for (int i = 0; i < n; ++i) {
    const double m = m_eff(i, i);
    const bool solvable = m > 1e-12 || alpha[i] <= 1e-12;
    if (!solvable) {
      probe.empty = true;
      probe.witness_coordinate = i;
      std::ostringstream os;
      os << "no solution: coordinate " << i
         << " requires v - f(a,p,q) - W a <= 0 but the value is " << alpha[i];
      probe.note += "; " + os.str();
      break;
    }
  }
  return probe;
}

std::vector<Vector> enumerate_solutions(const PvsInstance& inst, const Vector& v,
                                        const Vector& p, const Vector& q,
                                        const Vector& center, double radius) {
  if (!potential_is_polyhedral(inst.potential()))
    throw ValidationError("enumerate_solutions: potential is not polyhedral");
  const int n = inst.dims().n;
  const Polyhedron dom = potential_domain(inst.potential(), p);
  const Matrix& g = dom.g();
  const Vector& h = dom.h();
  const int s = int(g.rows());
  const Matrix q_eff = inst.base().q + potential_quadratic(inst.potential(), n);
  const Vector rhs_const = v - inst.evaluate_base(Vector::Zero(n), p, q);

  std::vector<Vector> solutions;
  auto consider = [&](const std::vector<int>& subset) {
    const int k = int(subset.size());
    Matrix kkt(n + k, n + k);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = q_eff;
    for (int i = 0; i < k; ++i) {
      kkt.block(0, n + i, n, 1) = g.row(subset[i]).transpose();
      kkt.block(n + i, 0, 1, n) = g.row(subset[i]);
    }
    Vector rhs(n + k);
    rhs.head(n) = rhs_const;
    for (int i = 0; i < k; ++i) rhs[n + i] = h[subset[i]];
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) return;
    const Vector sol = lu.solve(rhs);
    const Vector x = sol.head(n);
    const Vector mu = sol.tail(k);
    if (mu.size() > 0 && mu.minCoeff() < -1e-9) return;
    if (s > 0 && (g * x - h).maxCoeff() > 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff()))
      return;
    if ((x - center).norm() > radius) return;
    const double residual = subgradient_distance(
        inst.potential(), x, p, v - inst.evaluate_base(x, p, q));
    if (residual > tol::kProxResidual) return;
    for (const auto& other : solutions)
      if ((other - x).norm() <= 1e-8 * std::max(1.0, x.norm())) return;
    solutions.push_back(x);
  };

  std::vector<int> subset;
  // all row subsets of size <= n
  auto recurse = [&](auto&& self, int start) -> void {
    consider(subset);
    if (int(subset.size()) == n) return;
    for (int i = start; i < s; ++i) {
      subset.push_back(i);
      self(self, i + 1);
      subset.pop_back();
    }
  };
  recurse(recurse, 0);
  return solutions;
}

}  // namespace varstab
