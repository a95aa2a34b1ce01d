#include "varstab/prox.hpp"

#include "varstab/linalg.hpp"
#include "varstab/pointbased.hpp"
#include "varstab/qp.hpp"
#include "varstab/rng.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace varstab {

namespace {

Vector clamp_to_box(const Vector& v, const Vector& lo, const Vector& hi) {
  Vector out = v;
  for (int i = 0; i < v.size(); ++i)
    out[i] = std::min(std::max(v[i], lo[i]), hi[i]);
  return out;
}

// Projection onto {x : phi_i(x,p) <= 0} for a quadratic inequality system:
// sequential linearized projections, verified by the membership residual.
Vector project_smooth_ineq(const SmoothIneq& pot, const Vector& v,
                           const Vector& p) {
  Vector x = v;
  const int s = pot.count();
  for (int iter = 0; iter < 100; ++iter) {
    Matrix g(s, v.size());
    Vector h(s);
    for (int i = 0; i < s; ++i) {
      const Vector grad = pot.gradient_x(i, x);
      g.row(i) = grad.transpose();
      h[i] = grad.dot(x) - pot.value(i, x, p);
    }
    Vector x_next;
    try {
      x_next = project_polyhedron(v, g, h).x;
    } catch (const InfeasibleError&) {
      throw NumericsError("smooth-inequality projection: linearization empty");
    }
    if ((x_next - x).norm() <= 1e-12 * std::max(1.0, x.norm())) {
      x = x_next;
      break;
    }
    x = x_next;
  }
  double feas = 0.0;
  for (int i = 0; i < s; ++i) feas = std::max(feas, pot.value(i, x, p));
  if (feas > 1e-8)
    throw NumericsError("smooth-inequality projection did not converge");
  return x;
}

Vector project_domain(const PotentialSpec& g, const Vector& v, const Vector& p) {
  if (const auto* box = std::get_if<IndicatorBox>(&g)) {
    Vector off = Vector::Zero(box->lower.size());
    if (box->shift.size() > 0 && p.size() > 0) off = box->shift * p;
    Vector lo = box->lower, hi = box->upper;
    for (int i = 0; i < lo.size(); ++i) {
      if (std::isfinite(lo[i])) lo[i] += off[i];
      if (std::isfinite(hi[i])) hi[i] += off[i];
    }
    return clamp_to_box(v, lo, hi);
  }
  if (const auto* si = std::get_if<SmoothIneq>(&g)) {
    if (!si->affine_in_x()) return project_smooth_ineq(*si, v, p);
  }
  const Polyhedron dom = potential_domain(g, p);
  return project_polyhedron(v, dom.g(), dom.h(), dom.feasible_point()).x;
}

}  // namespace

Vector prox_map(const PotentialSpec& g, const ProxQuery& query) {
  if (!(query.lambda > 0))
    throw ValidationError("prox_map: lambda must be positive");
  if (const auto* quad = std::get_if<QuadraticPlusIndicator>(&g)) {
    const int n = int(query.v.size());
    const Matrix p_mat =
        Matrix::Identity(n, n) + query.lambda * sym(quad->w);
    Eigen::LLT<Matrix> llt(p_mat);
    if (llt.info() != Eigen::Success)
      throw ValidationError(
          "prox_map: I + lambda W is not positive definite (lambda is at or "
          "beyond the prox-regularity threshold)");
    const PotentialSpec inner = std::visit(
        [](const auto& in) { return PotentialSpec(in); }, quad->inner);
    const Polyhedron dom = potential_domain(inner, query.p);
    return solve_qp(p_mat, query.v, dom.g(), dom.h(), dom.feasible_point()).x;
  }
  // indicator classes: the projector, independent of lambda
  return project_domain(g, query.v, query.p);
}

// --- graph sampling -----------------------------------------------------------

namespace {

// 1-D graph point of N_[a,b] nearest to (y, v) (closed form per piece).
void project_interval_graph(double a, double b, double y, double v, double* y_out,
                            double* v_out) {
  struct Candidate {
    double y, v, dist;
  };
  std::vector<Candidate> cands;
  if (a == b) {
    cands.push_back({a, v, std::abs(y - a)});
  } else {
    const double t = std::min(std::max(y, a), b);
    cands.push_back({t, 0.0, std::hypot(y - t, v)});
    if (std::isfinite(a)) {
      const double vv = std::min(v, 0.0);
      cands.push_back({a, vv, std::hypot(y - a, v - vv)});
    }
    if (std::isfinite(b)) {
      const double vv = std::max(v, 0.0);
      cands.push_back({b, vv, std::hypot(y - b, v - vv)});
    }
  }
  const auto best = std::min_element(
      cands.begin(), cands.end(),
      [](const Candidate& l, const Candidate& r) { return l.dist < r.dist; });
  *y_out = best->y;
  *v_out = best->v;
}

// Normal-cone projection: nearest point of cone{active rows of G at x} to
// target, via NNLS.
Vector project_onto_normal_cone(const Matrix& g, const Vector& h, const Vector& x,
                                const Vector& target) {
  std::vector<int> active;
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 1.0);
  for (int i = 0; i < g.rows(); ++i)
    if (std::abs(g.row(i).dot(x) - h[i]) <= tol::kActive * scale)
      active.push_back(i);
  if (active.empty()) return Vector::Zero(x.size());
  Matrix gens(x.size(), int(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i)
    gens.col(int(i)) = g.row(active[i]).transpose();
  const auto fit = nnls(gens, target);
  return gens * fit.z;
}

struct PolyhedralView {
  Matrix g;
  Vector h;
};

PolyhedralView polyhedral_view(const PotentialSpec& pot, const Vector& p) {
  const Polyhedron dom = potential_domain(pot, p);
  return {dom.g(), dom.h()};
}

}  // namespace

std::vector<SubgradientSample> sample_subdifferential_graph(
    const PotentialSpec& g, const Vector& x_bar, const Vector& p_bar,
    const Vector& v_hat, double eta, int count, std::uint64_t seed,
    bool perturb_p) {
  const double center_residual = subgradient_distance(g, x_bar, p_bar, v_hat);
  if (center_residual > tol::kResidual)
    throw ValidationError("sample_subdifferential_graph: center is off-graph");

  const int n = int(x_bar.size());
  std::vector<SubgradientSample> out;
  out.reserve(std::size_t(std::max(count, 0)));

  const bool moves_p = perturb_p && potential_depends_on_p(g);

  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::substream(seed, std::uint64_t(i));
    SubgradientSample best;
    double best_score = kInf;
    for (int attempt = 0; attempt < 64; ++attempt) {
      SubgradientSample s;
      s.p = p_bar;
      if (moves_p && p_bar.size() > 0) s.p = p_bar + rng.ball(int(p_bar.size()), eta);

      if (const auto* quad = std::get_if<QuadraticPlusIndicator>(&g)) {
        const PotentialSpec inner = std::visit(
            [](const auto& in) { return PotentialSpec(in); }, quad->inner);
        const Vector v_inner_hat = v_hat - quad->w * x_bar;
        const double lip = 1.0 + spectral_norm(quad->w);
        auto inner_samples = sample_subdifferential_graph(
            inner, x_bar, s.p, v_inner_hat, eta / lip, 1,
            seed ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t(i) * 64 + attempt + 1)),
            false);
        s.x = inner_samples.front().x;
        s.v = quad->w * s.x + inner_samples.front().v;
      } else if (const auto* box = std::get_if<IndicatorBox>(&g)) {
        Vector off = Vector::Zero(n);
        if (box->shift.size() > 0 && s.p.size() > 0) off = box->shift * s.p;
        Vector y_center = x_bar;
        if (box->shift.size() > 0 && p_bar.size() > 0)
          y_center -= box->shift * p_bar;
        s.x = Vector(n);
        s.v = Vector(n);
        for (int k = 0; k < n; ++k) {
          const double dy = rng.uniform(-eta, eta);
          const double dv = rng.uniform(-eta, eta);
          double yk, vk;
          project_interval_graph(box->lower[k], box->upper[k], y_center[k] + dy,
                                 v_hat[k] + dv, &yk, &vk);
          s.x[k] = yk + off[k];
          s.v[k] = vk;
        }
      } else {
        const auto view = polyhedral_view(g, s.p);
        const Vector target_x = x_bar + rng.ball(n, eta);
        s.x = project_polyhedron(target_x, view.g, view.h).x;
        const Vector target_v = v_hat + rng.ball(n, eta);
        s.v = project_onto_normal_cone(view.g, view.h, s.x, target_v);
      }

      const double dist =
          std::max((s.x - x_bar).norm(),
                   std::max((s.v - v_hat).norm(), (s.p - p_bar).norm()));
      if (dist <= eta) {
        s.residual = subgradient_distance(g, s.x, s.p, s.v);
        best = s;
        best_score = dist;
        break;
      }
      if (dist < best_score) {
        s.residual = subgradient_distance(g, s.x, s.p, s.v);
        best = s;
        best_score = dist;
      }
    }
    if (best_score == kInf) {
      // fall back to the center itself; always on the graph
      best = {x_bar, p_bar, v_hat, center_residual};
    }
    out.push_back(std::move(best));
  }
  return out;
}

// --- thresholds ------------------------------------------------------------------

ThresholdEstimate threshold_estimate_hypomonotone(const PotentialSpec& g,
                                                  const Vector& x_bar,
                                                  const Vector& p_bar,
                                                  const Vector& v_hat, double eta,
                                                  int count, std::uint64_t seed) {
  const auto samples =
      sample_subdifferential_graph(g, x_bar, p_bar, v_hat, eta, count, seed);
  ThresholdEstimate est;
  est.method = ThresholdEstimate::Method::kHypomonotoneSampling;
  est.eta = eta;
  est.samples = int(samples.size());

  double sup = -kInf;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const Vector dx = samples[i].x - samples[j].x;
      const double dn = dx.norm();
      if (dn < tol::kPairFloor) continue;
      const Vector dv = samples[i].v - samples[j].v;
      sup = std::max(sup, -dv.dot(dx) / (dn * dn));
      ++est.usable_pairs;
    }
  }
  if (est.usable_pairs < 1)
    throw NumericsError(
        "threshold_estimate_hypomonotone: fewer than 2 usable samples");
  est.r_est = std::max(0.0, sup);
  return est;
}

ThresholdEstimate threshold_pointbased_box(const QuadraticPlusIndicator& g,
                                           const Vector& x_bar,
                                           const Vector& v_hat) {
  const auto* box = std::get_if<IndicatorBox>(&g.inner);
  if (box == nullptr)
    throw ValidationError(
        "threshold_pointbased_box: inner set is not a box (use the sampling "
        "estimator)");
  const int n = int(x_bar.size());
  const Vector v_graph = v_hat - g.w * x_bar;

  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    const auto piece = classify_interval_graph_point(box->lower[i], box->upper[i],
                                                     x_bar[i], v_graph[i]);
    const bool pinned = piece == IntervalPiece::kLowerRay ||
                        piece == IntervalPiece::kUpperRay ||
                        piece == IntervalPiece::kPoint;
    if (!pinned) free_idx.push_back(i);
  }

  ThresholdEstimate est;
  est.method = ThresholdEstimate::Method::kPointbasedCoderivative;
  if (free_idx.empty()) {
    est.tau = kInf;  // no admissible direction; the quotient infimum is vacuous
    est.r_est = 0.0;
    return est;
  }
  Matrix basis = Matrix::Zero(n, int(free_idx.size()));
  for (std::size_t k = 0; k < free_idx.size(); ++k) basis(free_idx[k], int(k)) = 1.0;
  est.tau = min_eigenvalue(basis.transpose() * sym(g.w) * basis);
  est.r_est = std::max(0.0, -est.tau);
  return est;
}

PotentialConstants potential_constants(const PotentialSpec& g,
                                       const Vector& x_bar, const Vector& p_bar,
                                       const Vector& v_hat, double sigma) {
  PotentialConstants pc;
  pc.provenance = PotentialConstants::Provenance::kClosedForm;
  if (const auto* quad = std::get_if<QuadraticPlusIndicator>(&g)) {
    if (std::holds_alternative<IndicatorBox>(quad->inner)) {
      pc.threshold = threshold_pointbased_box(*quad, x_bar, v_hat).r_est;
    } else {
      // certified upper bound: g + (r/2)||.||^2 is convex from r = -lambda_min(W)
      pc.threshold = std::max(0.0, -min_eigenvalue(quad->w));
    }
  } else {
    pc.threshold = 0.0;  // convex indicator classes
    (void)p_bar;
  }
  pc.r = pc.threshold + 0.01 * std::max(1.0, sigma - pc.threshold);
  return pc;
}

}  // namespace varstab
