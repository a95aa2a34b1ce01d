#include "varstab/pvc.hpp"

#include "varstab/linalg.hpp"
#include "varstab/lp.hpp"
#include "varstab/prox.hpp"
#include "varstab/qp.hpp"
#include "varstab/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace varstab {

namespace {

const SmoothIneq& smooth_potential(const PvsInstance& inst) {
  const auto* pot = std::get_if<SmoothIneq>(&inst.potential());
  if (pot == nullptr)
    throw ValidationError("certificate pipeline requires a smooth-inequality potential");
  return *pot;
}

Matrix active_gradients(const SmoothIneq& pot, const std::vector<int>& idx,
                        const Vector& x) {
  Matrix g(int(idx.size()), int(x.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    g.row(int(i)) = pot.gradient_x(idx[i], x).transpose();
  return g;
}

// Lagrangian Hessian in x: Jacobian of the base plus the weighted
// constraint Hessians.
Matrix lagrangian_hessian(const PvsInstance& inst, const Vector& lambda,
                          const Vector& /*x*/) {
  const auto& pot = smooth_potential(inst);
  Matrix h = inst.base().q;
  for (int i = 0; i < pot.count(); ++i) {
    if (std::abs(lambda[i]) <= 0.0) continue;
    if (pot.constraints[i].a.size() > 0) h += lambda[i] * pot.constraints[i].a;
  }
  return h;
}

std::vector<int> strict_support(const Vector& lambda,
                                const std::vector<int>& active) {
  std::vector<int> out;
  for (int i : active)
    if (lambda[i] > tol::kActive) out.push_back(i);
  return out;
}

}  // namespace

std::vector<int> active_set(const SmoothIneq& pot, const Vector& x,
                            const Vector& p, double tolerance) {
  std::vector<int> idx;
  for (int i = 0; i < pot.count(); ++i) {
    const double val = pot.value(i, x, p);
    if (val > tolerance)
      throw ValidationError("active_set: point is infeasible");
    if (std::abs(val) <= tolerance) idx.push_back(i);
  }
  return idx;
}

MfcqReport mfcq_check(const SmoothIneq& pot, const Vector& x, const Vector& p) {
  const auto idx = active_set(pot, x, p);
  MfcqReport rep;
  if (idx.empty()) {
    rep.holds = true;
    rep.vacuous = true;
    rep.margin = kInf;
    rep.witness = Vector::Zero(x.size());
    return rep;
  }
  // max t s.t. <grad_i, d> + t <= 0, ||d||_inf <= 1, 0 <= t <= big
  const int n = int(x.size());
  LpProblem lp(n + 1);
  lp.c = Vector::Zero(n + 1);
  lp.c[n] = -1.0;
  lp.a_ub = Matrix(int(idx.size()), n + 1);
  lp.b_ub = Vector::Zero(int(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    lp.a_ub.row(int(i)).head(n) = pot.gradient_x(idx[i], x).transpose();
    lp.a_ub(int(i), n) = 1.0;
  }
  lp.lb.head(n).setConstant(-1.0);
  lp.ub.head(n).setConstant(1.0);
  lp.lb[n] = 0.0;
  lp.ub[n] = 1e6;
  const auto sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw NumericsError("mfcq_check: descent LP failed");
  rep.margin = sol.x[n];
  rep.witness = sol.x.head(n);
  rep.holds = rep.margin > tol::kMfcqMargin;
  return rep;
}

LicqReport licq_check(const SmoothIneq& pot, const Vector& x, const Vector& p) {
  const auto idx = active_set(pot, x, p);
  LicqReport rep;
  rep.active_count = int(idx.size());
  rep.rank = rank(active_gradients(pot, idx, x));
  rep.holds = rep.rank == rep.active_count;
  return rep;
}

CrcqReport crcq_check(const SmoothIneq& pot, const Vector& x_bar,
                      const Vector& p_bar, double delta, int grid,
                      std::uint64_t seed) {
  const auto idx = active_set(pot, x_bar, p_bar);
  if (idx.size() > 12)
    throw LimitError("crcq_check: more than 12 active constraints");
  CrcqReport rep;
  rep.holds = true;

  const int n = int(x_bar.size()), l = int(p_bar.size());
  const std::size_t subsets = std::size_t(1) << idx.size();
  std::vector<int> base_rank(subsets, -1);
  for (int s = 0; s < grid && rep.holds; ++s) {
    Vector x = x_bar, p = p_bar;
    if (s > 0) {
      Rng rng = Rng::substream(seed, std::uint64_t(s));
      x += rng.ball(n, delta);
      if (l > 0) p += rng.ball(l, delta);
    }
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      std::vector<int> sub;
      for (std::size_t b = 0; b < idx.size(); ++b)
        if (mask & (std::size_t(1) << b)) sub.push_back(idx[b]);
      const int r = rank(active_gradients(pot, sub, x));
      if (base_rank[mask] < 0) {
        base_rank[mask] = r;
      } else if (base_rank[mask] != r) {
        rep.holds = false;
        rep.failing_subset = sub;
        break;
      }
    }
    ++rep.samples;
  }
  return rep;
}

MultiplierPolytope multipliers(const SmoothIneq& pot, const PvsInstance& inst,
                               const Vector& x, const Vector& p, const Vector& q,
                               const Vector& v) {
  MultiplierPolytope poly;
  poly.support = active_set(pot, x, p);
  const int s = pot.count();
  const int k = int(poly.support.size());
  if (k > 12) throw LimitError("multipliers: more than 12 active constraints");
  const Vector b = v - inst.evaluate_base(x, p, q);

  if (k == 0) {
    if (b.norm() <= tol::kResidual) {
      poly.empty = false;
      poly.vertices.push_back(Vector::Zero(s));
    }
    return poly;
  }

  Matrix m(int(x.size()), k);
  for (int i = 0; i < k; ++i) m.col(i) = pot.gradient_x(poly.support[i], x);

  // existence
  const auto feas = nnls(m, b);
  if (feas.residual > tol::kResidual) return poly;  // empty polytope
  poly.empty = false;

  // boundedness: recession cone {lambda >= 0 : M lambda = 0} must be {0}
  LpProblem rec(k);
  rec.c = -Vector::Ones(k);
  rec.a_eq = m;
  rec.b_eq = Vector::Zero(int(x.size()));
  rec.lb.setZero();
  rec.ub.setOnes();
  const auto rec_sol = solve_lp(rec);
  poly.bounded = rec_sol.status == LpStatus::kOptimal && -rec_sol.value <= 1e-7;

  // vertices: basic feasible solutions over column subsets
  const std::size_t subsets = std::size_t(1) << k;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<int> cols;
    for (int bpos = 0; bpos < k; ++bpos)
      if (mask & (std::size_t(1) << bpos)) cols.push_back(bpos);
    if (int(cols.size()) > int(x.size())) continue;
    Matrix ms(int(x.size()), int(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) ms.col(int(i)) = m.col(cols[i]);
    if (int(cols.size()) > 0 && rank(ms) < int(cols.size())) continue;
    Vector sol = cols.empty() ? Vector(0)
                              : Vector(ms.colPivHouseholderQr().solve(b));
    const double res = cols.empty() ? b.norm() : (ms * sol - b).norm();
    if (res > tol::kResidual) continue;
    if (sol.size() > 0 && sol.minCoeff() < -1e-12) continue;
    Vector lambda = Vector::Zero(s);
    for (std::size_t i = 0; i < cols.size(); ++i)
      lambda[poly.support[cols[i]]] = std::max(0.0, sol[int(i)]);
    bool dup = false;
    for (const auto& w : poly.vertices)
      if ((w - lambda).lpNorm<Eigen::Infinity>() <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) {
      poly.vertices.push_back(lambda);
      Vector stat = b;
      for (int i = 0; i < s; ++i)
        if (lambda[i] != 0.0) stat -= lambda[i] * pot.gradient_x(i, x);
      poly.max_residual = std::max(poly.max_residual, stat.norm());
    }
  }
  return poly;
}

GssoscReport gssosc_check(const PvsInstance& inst, const Vector& x,
                          const Vector& p, const Vector& q, const Vector& v,
                          std::uint64_t seed) {
  const auto& pot = smooth_potential(inst);
  const auto poly = multipliers(pot, inst, x, p, q, v);
  if (poly.empty)
    throw ValidationError("gssosc_check: multiplier polytope is empty");
  if (!poly.bounded)
    throw ValidationError("gssosc_check: multiplier polytope is unbounded");

  GssoscReport rep;
  rep.holds = true;
  const auto active = poly.support;
  const int n = inst.dims().n;

  std::vector<Vector> candidates = poly.vertices;
  if (poly.vertices.size() > 1) {
    Rng rng(seed);
    for (int k = 0; k < 100; ++k) {
      const Vector w = rng.on_simplex(int(poly.vertices.size()));
      Vector lambda = Vector::Zero(int(poly.vertices.front().size()));
      for (std::size_t j = 0; j < poly.vertices.size(); ++j)
        lambda += w[int(j)] * poly.vertices[j];
      candidates.push_back(lambda);
    }
  }

  for (const auto& lambda : candidates) {
    ++rep.multipliers_checked;
    const auto plus = strict_support(lambda, active);
    const Matrix grads = active_gradients(pot, plus, x);
    const Matrix z = null_space_basis(grads, n);
    if (z.cols() == 0) continue;  // trivial subspace, nothing to test
    const Matrix h = lagrangian_hessian(inst, lambda, x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(z.transpose() * sym(h) * z);
    const double mineig = es.eigenvalues().minCoeff();
    if (mineig < rep.min_curvature) {
      rep.min_curvature = mineig;
      int arg = 0;
      es.eigenvalues().minCoeff(&arg);
      rep.failing_u = z * es.eigenvectors().col(arg);
      rep.failing_lambda = lambda;
    }
    if (mineig <= tol::kEig) rep.holds = false;
  }
  return rep;
}

double min_quadratic_on_cone(const Matrix& h, const Matrix& eq_rows,
                             const Matrix& ineq_rows, Vector* argmin) {
  const int n = int(h.rows());
  const int s = int(ineq_rows.rows());
  if (s > 12) throw LimitError("min_quadratic_on_cone: face enumeration limit");
  const Matrix hs = sym(h);
  double best = kInf;

  // The cone minimum is attained in the relative interior of some face,
  // where it is a critical point of the face-restricted quadratic, i.e. an
  // eigenvalue of the reduced matrix whose eigenspace meets the cone.
  const std::size_t subsets = std::size_t(1) << s;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<int> face;
    std::vector<int> rest;
    for (int b = 0; b < s; ++b) {
      if (mask & (std::size_t(1) << b))
        face.push_back(b);
      else
        rest.push_back(b);
    }
    Matrix eq(int(eq_rows.rows()) + int(face.size()), n);
    if (eq_rows.rows() > 0) eq.topRows(eq_rows.rows()) = eq_rows;
    for (std::size_t i = 0; i < face.size(); ++i)
      eq.row(int(eq_rows.rows() + int(i))) = ineq_rows.row(face[i]);
    const Matrix z = null_space_basis(eq, n);
    if (z.cols() == 0) continue;
    Matrix a_rem(int(rest.size()), n);
    for (std::size_t i = 0; i < rest.size(); ++i)
      a_rem.row(int(i)) = ineq_rows.row(rest[i]);

    Eigen::SelfAdjointEigenSolver<Matrix> es(z.transpose() * hs * z);
    const auto& vals = es.eigenvalues();
    int k = 0;
    while (k < vals.size()) {
      int k_end = k + 1;
      while (k_end < vals.size() &&
             vals[k_end] - vals[k] <= 1e-10 * std::max(1.0, std::abs(vals[k])))
        ++k_end;
      if (vals[k] >= best) break;  // no smaller candidate on this face
      const Matrix eigenspace = z * es.eigenvectors().middleCols(k, k_end - k);
      bool feasible = false;
      Vector witness;
      if (eigenspace.cols() == 1) {
        const Vector u = eigenspace.col(0);
        if (rest.empty() || (a_rem * u).minCoeff() >= -1e-9) {
          feasible = true;
          witness = u;
        } else if ((a_rem * (-u)).minCoeff() >= -1e-9) {
          feasible = true;
          witness = -u;
        }
      } else if (rest.empty()) {
        feasible = true;
        witness = eigenspace.col(0);
      } else {
        // polyhedral-cone nontriviality of {y : A Z_E y >= 0} by
        // coordinate-objective LPs
        const Matrix az = a_rem * eigenspace;
        for (int coord = 0; coord < eigenspace.cols() && !feasible; ++coord) {
          for (double sign : {1.0, -1.0}) {
            LpProblem lp(int(eigenspace.cols()));
            lp.c = Vector::Zero(eigenspace.cols());
            lp.c[coord] = -sign;
            lp.a_ub = -az;
            lp.b_ub = Vector::Zero(az.rows());
            lp.lb.setConstant(-1.0);
            lp.ub.setConstant(1.0);
            const auto sol = solve_lp(lp);
            if (sol.status == LpStatus::kOptimal && -sol.value > 1e-6) {
              feasible = true;
              witness = eigenspace * sol.x;
              break;
            }
          }
        }
      }
      if (feasible) {
        if (vals[k] < best) {
          best = vals[k];
          if (argmin != nullptr && witness.size() > 0)
            *argmin = witness / witness.norm();
        }
        break;  // smallest feasible eigenvalue on this face found
      }
      k = k_end;
    }
  }
  return best;
}

GusoscReport gusosc_check(const PvsInstance& inst, const SampleConfig& cfg) {
  const auto& pot = smooth_potential(inst);
  const auto& ref = inst.reference();
  const auto mfcq = mfcq_check(pot, ref.x, ref.p);
  if (!mfcq.holds)
    throw ValidationError(
        "gusosc_check: MFCQ fails at the reference, the multiplier "
        "representation is not available");

  GusoscReport rep;
  const int n = inst.dims().n, l = inst.dims().l, m = inst.dims().m;
  const bool polyhedral = pot.affine_in_x();

  for (int i = 0; i < cfg.count; ++i) {
    ++rep.samples;
    Vector x = ref.x, p = ref.p, q = ref.q, v_target = ref.v;
    if (i > 0) {
      Rng rng = Rng::substream(cfg.seed, std::uint64_t(i));
      p = ref.p + rng.ball(l, cfg.eta);
      q = ref.q + rng.ball(m, cfg.eta);
      v_target = ref.v + rng.ball(n, 0.5 * cfg.eta);
      const Vector x_raw = ref.x + rng.ball(n, cfg.eta);
      if (polyhedral) {
        const Polyhedron dom = potential_domain(inst.potential(), p);
        x = project_polyhedron(x_raw, dom.g(), dom.h(), dom.feasible_point()).x;
      } else {
        x = prox_map(inst.potential(), {1.0, x_raw, p});
      }
      if ((x - ref.x).norm() > cfg.eta) continue;
    }

    // multiplier fit: lambda >= 0 on the active set with L(x,p,q,lambda)
    // as close to the target canonical parameter as possible
    const auto active = active_set(pot, x, p);
    Matrix grads(n, int(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
      grads.col(int(k)) = pot.gradient_x(active[k], x);
    const Vector b = v_target - inst.evaluate_base(x, p, q);
    const auto fit = nnls(grads, b);
    Vector v = inst.evaluate_base(x, p, q);
    if (grads.cols() > 0) v += grads * fit.z;
    if ((v - ref.v).norm() > cfg.eta) continue;  // sample left the graph ball
    ++rep.accepted;

    const auto poly = multipliers(pot, inst, x, p, q, v);
    if (poly.empty) continue;
    for (const auto& lambda : poly.vertices) {
      const auto plus = strict_support(lambda, active);
      std::vector<int> rest;
      for (int idx : active)
        if (lambda[idx] <= tol::kActive) rest.push_back(idx);
      const Matrix eq = active_gradients(pot, plus, x);
      const Matrix ineq = active_gradients(pot, rest, x);
      Vector witness;
      const double cone_min = min_quadratic_on_cone(
          lagrangian_hessian(inst, lambda, x), eq, ineq, &witness);
      if (cone_min < rep.ell_best) {
        rep.ell_best = cone_min;
        rep.vacuous = false;
        rep.witness_x = x;
        rep.witness_u = witness;
      }
      if (cone_min < kInf) rep.vacuous = false;
    }
  }
  rep.holds = rep.ell_best > 1e-6;
  return rep;
}

ScocProbe scoc_bordered_determinant(const PvsInstance& inst,
                                    const Vector& lambda_vertex) {
  const auto& pot = smooth_potential(inst);
  const auto& ref = inst.reference();
  const auto active = active_set(pot, ref.x, ref.p);
  const auto plus = strict_support(lambda_vertex, active);
  const Matrix h = lagrangian_hessian(inst, lambda_vertex, ref.x);
  const int n = inst.dims().n;

  ScocProbe probe;
  if (plus.empty()) {
    const double det = h.fullPivLu().determinant();
    probe.determinants.push_back(det);
    probe.subsets.push_back({});
    probe.any_zero = std::abs(det) <= tol::kDet * std::max(1.0, spectral_norm(h));
    return probe;
  }

  const Matrix all_grads = active_gradients(pot, plus, ref.x);
  const int r_star = rank(all_grads);
  // all maximal independent subsets (size r_star, full rank)
  const std::size_t subsets = std::size_t(1) << plus.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<int> j;
    for (std::size_t b = 0; b < plus.size(); ++b)
      if (mask & (std::size_t(1) << b)) j.push_back(plus[b]);
    if (int(j.size()) != r_star) continue;
    const Matrix a = active_gradients(pot, j, ref.x);
    if (rank(a) < r_star) continue;
    Matrix bordered(n + r_star, n + r_star);
    bordered.setZero();
    bordered.topLeftCorner(n, n) = h;
    bordered.topRightCorner(n, r_star) = a.transpose();
    bordered.bottomLeftCorner(r_star, n) = -a;
    const double det = bordered.fullPivLu().determinant();
    probe.determinants.push_back(det);
    probe.subsets.push_back(j);
    const double scale =
        std::max(1.0, std::pow(spectral_norm(bordered), double(n + r_star)));
    if (std::abs(det) <= tol::kDet * scale) probe.any_zero = true;
  }
  if (probe.determinants.empty())
    throw NumericsError("scoc_bordered_determinant: no independent subset");
  return probe;
}

CertificateReport certify_full_stability(const PvsInstance& inst,
                                         const SampleConfig& cfg) {
  const auto& pot = smooth_potential(inst);
  const auto& ref = inst.reference();

  CertificateReport rep;
  rep.mfcq = mfcq_check(pot, ref.x, ref.p);
  rep.licq = licq_check(pot, ref.x, ref.p);
  rep.crcq = crcq_check(pot, ref.x, ref.p, 1e-3, 50, cfg.seed);
  rep.lambda = multipliers(pot, inst, ref.x, ref.p, ref.q, ref.v);
  rep.gssosc = gssosc_check(inst, ref.x, ref.p, ref.q, ref.v, cfg.seed);
  rep.gusosc = gusosc_check(inst, cfg);
  for (const auto& vertex : rep.lambda.vertices)
    rep.scoc.push_back(scoc_bordered_determinant(inst, vertex));

  rep.fully_stable = rep.mfcq.holds && rep.crcq.holds && rep.gusosc.holds;
  rep.licq_route_applicable = rep.licq.holds;
  rep.licq_route_verdict = rep.gssosc.holds;
  rep.route_disagreement =
      rep.licq.holds && (rep.gssosc.holds != rep.gusosc.holds);
  return rep;
}

}  // namespace varstab
