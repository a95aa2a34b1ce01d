#include "varstab/lp.hpp"

#include <cmath>
#include <vector>

namespace varstab {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;

// Tableau simplex on standard form: min c^T y, A y = b, y >= 0, b >= 0.
// Bland's rule throughout (smallest eligible index), which guarantees
// finite termination at the cost of speed we do not need here.
class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b) : m_(int(a.rows())), n_(int(a.cols())) {
    t_ = Matrix::Zero(m_ + 1, n_ + 1);
    t_.topLeftCorner(m_, n_) = a;
    t_.col(n_).head(m_) = b;
    basis_.assign(m_, -1);
  }

  void set_objective(const Vector& c) {
    t_.row(m_).head(n_) = c.transpose();
    t_(m_, n_) = 0.0;
    // price out current basis
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[r];
      if (j >= 0 && std::abs(t_(m_, j)) > 0.0) t_.row(m_) -= t_(m_, j) * t_.row(r);
    }
  }

  void set_basis(int row, int col) { basis_[row] = col; }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int r = 0; r <= m_; ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (std::abs(f) > 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[row] = col;
  }

  // Returns kOptimal or kUnbounded.
  LpStatus iterate(int col_limit) {
    const int iter_cap = 50 * (m_ + n_ + 10) * (m_ + n_ + 10);
    for (int iter = 0; iter < iter_cap; ++iter) {
      int enter = -1;
      for (int j = 0; j < col_limit; ++j) {
        if (t_(m_, j) < -kCostTol) {
          enter = j;
          break;  // Bland: first negative reduced cost
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      int leave = -1;
      double best = kInf;
      for (int r = 0; r < m_; ++r) {
        const double a = t_(r, enter);
        if (a > kPivTol) {
          const double ratio = t_(r, n_) / a;
          if (ratio < best - kPivTol ||
              (ratio < best + kPivTol && (leave < 0 || basis_[r] < basis_[leave]))) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
    }
    throw LimitError("simplex iteration cap exceeded");
  }

  double objective_value() const { return -t_(m_, n_); }
  double rhs(int row) const { return t_(row, n_); }
  double coeff(int row, int col) const { return t_(row, col); }
  int basis(int row) const { return basis_[row]; }
  int rows() const { return m_; }

  Vector solution(int n_real) const {
    Vector y = Vector::Zero(n_real);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] >= 0 && basis_[r] < n_real) y[basis_[r]] = t_(r, n_);
    return y;
  }

 private:
  int m_, n_;
  Matrix t_;
  std::vector<int> basis_;
};

}  // namespace

LpProblem::LpProblem(int n)
    : c(Vector::Zero(n)),
      a_ub(Matrix(0, n)),
      b_ub(Vector(0)),
      a_eq(Matrix(0, n)),
      b_eq(Vector(0)),
      lb(Vector::Constant(n, -kInf)),
      ub(Vector::Constant(n, kInf)) {}

LpResult solve_lp(const LpProblem& p) {
  const int n = int(p.c.size());

  // Column mapping to nonnegative variables. Each original variable
  // contributes one column (shifted or reflected) or two (free split).
  struct Col {
    int var;
    double sign;    // contribution sign
    double shift;   // x = shift + sign * y
  };
  std::vector<Col> cols;
  std::vector<std::pair<int, double>> extra_ub;  // y_col <= bound rows
  for (int j = 0; j < n; ++j) {
    const double lo = p.lb[j], hi = p.ub[j];
    if (std::isfinite(lo)) {
      cols.push_back({j, 1.0, lo});
      if (std::isfinite(hi)) extra_ub.emplace_back(int(cols.size()) - 1, hi - lo);
    } else if (std::isfinite(hi)) {
      cols.push_back({j, -1.0, hi});
    } else {
      cols.push_back({j, 1.0, 0.0});
      cols.push_back({j, -1.0, 0.0});
    }
  }
  const int nc = int(cols.size());

  const int m_ub = int(p.a_ub.rows());
  const int m_eq = int(p.a_eq.rows());
  const int m = m_ub + m_eq + int(extra_ub.size());
  const int n_slack = m_ub + int(extra_ub.size());

  Matrix a = Matrix::Zero(m, nc + n_slack);
  Vector b = Vector::Zero(m);

  // Row shifts: sum over original vars of coeff * shift (each var shifted once).
  auto row_shift = [&](const Eigen::RowVectorXd& coeffs) {
    double s = 0.0;
    std::vector<bool> seen(n, false);
    for (int k = 0; k < nc; ++k) {
      if (!seen[cols[k].var]) {
        s += coeffs[cols[k].var] * cols[k].shift;
        seen[cols[k].var] = true;
      }
    }
    return s;
  };

  int row = 0;
  for (int i = 0; i < m_ub; ++i, ++row) {
    for (int k = 0; k < nc; ++k) a(row, k) = p.a_ub(i, cols[k].var) * cols[k].sign;
    a(row, nc + i) = 1.0;
    b[row] = p.b_ub[i] - row_shift(p.a_ub.row(i));
  }
  for (int i = 0; i < m_eq; ++i, ++row) {
    for (int k = 0; k < nc; ++k) a(row, k) = p.a_eq(i, cols[k].var) * cols[k].sign;
    b[row] = p.b_eq[i] - row_shift(p.a_eq.row(i));
  }
  for (std::size_t i = 0; i < extra_ub.size(); ++i, ++row) {
    a(row, extra_ub[i].first) = 1.0;
    a(row, nc + m_ub + int(i)) = 1.0;
    b[row] = extra_ub[i].second;
  }

  for (int r = 0; r < m; ++r) {
    if (b[r] < 0) {
      a.row(r) *= -1.0;
      b[r] *= -1.0;
    }
  }

  // Phase 1 with artificials.
  const int n_total = nc + n_slack;
  Matrix a1(m, n_total + m);
  a1 << a, Matrix::Identity(m, m);
  Tableau tab(a1, b);
  for (int r = 0; r < m; ++r) tab.set_basis(r, n_total + r);
  Vector c1 = Vector::Zero(n_total + m);
  c1.tail(m).setOnes();
  tab.set_objective(c1);
  if (tab.iterate(n_total + m) == LpStatus::kUnbounded)
    throw NumericsError("phase-1 LP unbounded");
  if (tab.objective_value() > 1e-7) return {LpStatus::kInfeasible, Vector(), 0.0};

  // Drive remaining artificials out of the basis; rows that cannot pivot
  // are redundant and harmless (they stay with rhs ~ 0).
  for (int r = 0; r < m; ++r) {
    if (tab.basis(r) >= n_total) {
      for (int j = 0; j < n_total; ++j) {
        if (std::abs(tab.coeff(r, j)) > 1e-7) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  Vector c2 = Vector::Zero(n_total + m);
  for (int k = 0; k < nc; ++k) c2[k] = p.c[cols[k].var] * cols[k].sign;
  tab.set_objective(c2);
  const LpStatus st = tab.iterate(n_total);  // artificials barred from re-entry
  if (st == LpStatus::kUnbounded) return {LpStatus::kUnbounded, Vector(), 0.0};

  const Vector y = tab.solution(n_total);
  Vector x = Vector::Zero(n);
  std::vector<bool> seen(n, false);
  for (int k = 0; k < nc; ++k) {
    if (!seen[cols[k].var]) {
      x[cols[k].var] = cols[k].shift;
      seen[cols[k].var] = true;
    }
    x[cols[k].var] += cols[k].sign * y[k];
  }
  return {LpStatus::kOptimal, x, p.c.dot(x)};
}

FeasibilityResult find_feasible_point(const Matrix& g, const Vector& h) {
  const int n = int(g.cols());
  LpProblem p(n);
  p.a_ub = g;
  p.b_ub = h;
  const LpResult r = solve_lp(p);
  if (r.status != LpStatus::kOptimal) return {false, Vector()};
  return {true, r.x};
}

InteriorProbe cone_interior_probe(const Matrix& m) {
  const int n = int(m.cols());
  if (m.rows() == 0) {
    return {1.0, Vector::Zero(n)};  // whole space, any direction strictly slack
  }
  // variables (w, t): max t  s.t.  M w + t * 1 <= 0, -1 <= w <= 1, 0 <= t <= 1
  LpProblem p(n + 1);
  p.c = Vector::Zero(n + 1);
  p.c[n] = -1.0;
  p.a_ub = Matrix(m.rows(), n + 1);
  p.a_ub << m, Vector::Ones(m.rows());
  p.b_ub = Vector::Zero(m.rows());
  p.lb.head(n).setConstant(-1.0);
  p.ub.head(n).setConstant(1.0);
  p.lb[n] = 0.0;
  p.ub[n] = 1.0;
  const LpResult r = solve_lp(p);
  if (r.status != LpStatus::kOptimal)
    throw NumericsError("cone interior probe LP failed");
  return {r.x[n], r.x.head(n)};
}

}  // namespace varstab
