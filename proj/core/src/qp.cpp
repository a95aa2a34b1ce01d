#include "varstab/qp.hpp"

#include "varstab/linalg.hpp"
#include "varstab/lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace varstab {

namespace {

Matrix rows_of(const Matrix& g, const std::vector<int>& idx) {
  Matrix out(int(idx.size()), g.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(int(i)) = g.row(idx[i]);
  return out;
}

double kkt_residual_of(const Matrix& p, const Vector& c, const Matrix& g,
                       const Vector& h, const Vector& x, const Vector& mult) {
  Vector stat = p * x - c;
  if (g.rows() > 0) stat += g.transpose() * mult;
  double res = stat.lpNorm<Eigen::Infinity>();
  for (int i = 0; i < g.rows(); ++i) {
    const double viol = g.row(i).dot(x) - h[i];
    res = std::max(res, viol);
    res = std::max(res, std::abs(mult[i] * viol));
    res = std::max(res, -mult[i]);
  }
  return res;
}

}  // namespace

QpResult solve_qp(const Matrix& p, const Vector& c, const Matrix& g,
                  const Vector& h, std::optional<Vector> feasible_start,
                  int max_iter) {
  const int n = int(p.rows());
  const int s = int(g.rows());
  if (max_iter <= 0) max_iter = 100 * (n + s) + 200;

  Vector x;
  if (feasible_start) {
    x = *feasible_start;
  } else if (s == 0) {
    x = Vector::Zero(n);
  } else {
    const auto feas = find_feasible_point(g, h);
    if (!feas.feasible) throw InfeasibleError("QP constraint set is empty");
    x = feas.x;
  }

  Eigen::LLT<Matrix> llt(sym(p));
  if (llt.info() != Eigen::Success)
    throw NumericsError("QP matrix is not positive definite");
  if (s == 0) {
    Vector xs = llt.solve(c);
    QpResult r{xs, Vector(0), {}, 1, 0.0};
    r.kkt_residual = (p * xs - c).lpNorm<Eigen::Infinity>();
    return r;
  }

  std::vector<int> w;  // working set, sorted
  std::vector<char> in_w(s, 0);

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Vector grad = p * x - c;
    Matrix gw = rows_of(g, w);
    Matrix z = null_space_basis(gw, n);

    Vector d = Vector::Zero(n);
    if (z.cols() > 0) {
      Matrix zpz = z.transpose() * p * z;
      Vector rhs = -z.transpose() * grad;
      d = z * zpz.ldlt().solve(rhs);
    }

    if (d.lpNorm<Eigen::Infinity>() <= tol::kQp * std::max(1.0, x.norm())) {
      // Stationary on the working set; check multipliers.
      Vector mu_w;
      if (!w.empty()) {
        mu_w = gw.transpose()
                   .colPivHouseholderQr()
                   .solve(c - p * x);
      }
      int drop = -1;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (mu_w[int(i)] < -tol::kQp) {
          drop = int(i);
          break;  // Bland: smallest working-set position
        }
      }
      if (drop < 0) {
        Vector mult = Vector::Zero(s);
        for (std::size_t i = 0; i < w.size(); ++i)
          mult[w[i]] = std::max(0.0, w.empty() ? 0.0 : mu_w[int(i)]);
        QpResult r{x, mult, w, iter, 0.0};
        r.kkt_residual = kkt_residual_of(p, c, g, h, x, mult);
        return r;
      }
      in_w[w[drop]] = 0;
      w.erase(w.begin() + drop);
      continue;
    }

    // Ratio test toward the full step.
    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < s; ++i) {
      if (in_w[i]) continue;
      const double gd = g.row(i).dot(d);
      if (gd > tol::kQp) {
        const double slack = h[i] - g.row(i).dot(x);
        const double a = std::max(0.0, slack) / gd;
        if (a < alpha - 1e-15) {
          alpha = a;
          blocking = i;
        } else if (blocking >= 0 && a < alpha + 1e-15 && i < blocking) {
          blocking = i;
        }
      }
    }
    x += alpha * d;
    if (blocking >= 0) {
      w.insert(std::lower_bound(w.begin(), w.end(), blocking), blocking);
      in_w[blocking] = 1;
    }
  }
  throw LimitError("active-set QP iteration limit exceeded");
}

QpResult project_polyhedron(const Vector& v, const Matrix& g, const Vector& h,
                            std::optional<Vector> feasible_start) {
  return solve_qp(Matrix::Identity(int(v.size()), int(v.size())), v, g, h,
                  std::move(feasible_start));
}

NnlsResult nnls(const Matrix& a, const Vector& b,
                const std::vector<bool>& free_cols) {
  const int n = int(a.cols());
  Vector z = Vector::Zero(n);
  if (n == 0) return {z, b.norm()};

  std::vector<char> passive(n, 0);
  for (int j = 0; j < n; ++j)
    if (j < int(free_cols.size()) && free_cols[j]) passive[j] = 1;

  const double scale = std::max(1.0, b.norm());
  const double wtol = 1e-11 * scale * std::max(1.0, a.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Vector& out) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    out = Vector::Zero(n);
    if (idx.empty()) return;
    Matrix ap(a.rows(), int(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(int(k)) = a.col(idx[k]);
    Vector sol = ap.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = sol[int(k)];
  };

  auto restore_feasible = [&]() {
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      Vector zp;
      solve_passive(zp);
      bool ok = true;
      for (int j = 0; j < n; ++j) {
        const bool is_free = j < int(free_cols.size()) && free_cols[j];
        if (passive[j] && !is_free && zp[j] <= 1e-12 * scale) ok = false;
      }
      if (ok) {
        z = zp;
        return;
      }
      double alpha = kInf;
      for (int j = 0; j < n; ++j) {
        const bool is_free = j < int(free_cols.size()) && free_cols[j];
        if (passive[j] && !is_free && zp[j] <= 1e-12 * scale)
          alpha = std::min(alpha, z[j] / (z[j] - zp[j]));
      }
      if (!std::isfinite(alpha)) alpha = 0.0;
      z += alpha * (zp - z);
      for (int j = 0; j < n; ++j) {
        const bool is_free = j < int(free_cols.size()) && free_cols[j];
        if (passive[j] && !is_free && z[j] <= 1e-12 * scale) {
          passive[j] = 0;
          z[j] = 0.0;
        }
      }
    }
  };

  bool any_passive = false;
  for (int j = 0; j < n; ++j) any_passive |= (passive[j] != 0);
  if (any_passive) restore_feasible();

  const int outer_cap = 3 * n + 10;
  for (int outer = 0; outer < outer_cap; ++outer) {
    const Vector w = a.transpose() * (b - a * z);
    int enter = -1;
    double best = wtol;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[enter] = 1;
    restore_feasible();
  }
  return {z, (a * z - b).norm()};
}

double distance_to_generated_cone(const Vector& v, const Matrix& gens,
                                  const Matrix& lin) {
  const int ng = int(gens.cols());
  const int nl = int(lin.cols());
  if (ng + nl == 0) return v.norm();
  Matrix a(v.size(), ng + nl);
  if (ng > 0) a.leftCols(ng) = gens;
  if (nl > 0) a.rightCols(nl) = lin;
  std::vector<bool> free_cols(ng + nl, false);
  for (int j = ng; j < ng + nl; ++j) free_cols[j] = true;
  return nnls(a, v, free_cols).residual;
}

}  // namespace varstab
