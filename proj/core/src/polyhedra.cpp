#include "varstab/polyhedra.hpp"

#include "varstab/linalg.hpp"
#include "varstab/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace varstab {

namespace {

constexpr double kGeomTol = 1e-9;

Matrix drop_zero_rows(const Matrix& m) {
  std::vector<int> keep;
  for (int i = 0; i < m.rows(); ++i)
    if (m.row(i).norm() > kGeomTol) keep.push_back(i);
  Matrix out(int(keep.size()), m.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) out.row(int(i)) = m.row(keep[i]);
  return out;
}

Matrix append_columns(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Double description with explicit lineality handling. Maintains the
// invariant cone == span(lin) + cone(rays) for the rows processed so far.
// Candidate rays are pruned back to a minimal generator set after every
// cut, which keeps intermediate counts at the true f-vector sizes; NNLS
// redundancy checks replace the usual adjacency bookkeeping (desk scale).
struct DdState {
  Matrix lin;   // columns, orthonormal
  Matrix rays;  // columns, unit norm, orthogonal to lin
};

Matrix prune_rays(std::vector<Vector> cand, const Matrix& lin, int n) {
  std::vector<Vector> rays;
  for (auto& r : cand) {
    if (lin.cols() > 0) r -= lin * (lin.transpose() * r);
    const double nn = r.norm();
    if (nn <= kGeomTol) continue;
    r /= nn;
    bool dup = false;
    for (const auto& q : rays)
      if ((q - r).norm() < 1e-8) {
        dup = true;
        break;
      }
    if (!dup) rays.push_back(r);
  }
  bool changed = true;
  while (changed && rays.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < rays.size(); ++i) {
      Matrix others(n, int(rays.size()) - 1);
      int k = 0;
      for (std::size_t j = 0; j < rays.size(); ++j)
        if (j != i) others.col(k++) = rays[j];
      if (distance_to_generated_cone(rays[i], others, lin) <= 1e-9) {
        rays.erase(rays.begin() + long(i));
        changed = true;
        break;
      }
    }
  }
  Matrix out(n, int(rays.size()));
  for (std::size_t j = 0; j < rays.size(); ++j) out.col(int(j)) = rays[j];
  return out;
}

void dd_process_halfspace(DdState& st, Vector m) {
  const int n = int(m.size());
  if (m.norm() <= kGeomTol) return;
  m /= m.norm();

  int pivot = -1;
  double best = kGeomTol;
  for (int j = 0; j < st.lin.cols(); ++j) {
    const double d = std::abs(m.dot(st.lin.col(j)));
    if (d > best) {
      best = d;
      pivot = j;
    }
  }

  std::vector<Vector> cand;
  if (pivot >= 0) {
    // The lineality space crosses the hyperplane. Split off a pivot
    // direction; everything else projects onto m-perp and the pivot
    // re-enters as the one-sided ray -l0.
    Vector l0 = st.lin.col(pivot);
    if (m.dot(l0) < 0) l0 = -l0;
    const double ml0 = m.dot(l0);
    Matrix new_lin(n, st.lin.cols() - 1);
    int k = 0;
    for (int j = 0; j < st.lin.cols(); ++j) {
      if (j == pivot) continue;
      Vector l = st.lin.col(j);
      new_lin.col(k++) = l - (m.dot(l) / ml0) * l0;
    }
    for (int j = 0; j < st.rays.cols(); ++j) {
      Vector r = st.rays.col(j);
      cand.push_back(r - (m.dot(r) / ml0) * l0);
    }
    cand.push_back(-l0);
    st.lin = column_space_basis(new_lin);
    st.rays = prune_rays(std::move(cand), st.lin, n);
    return;
  }

  // Lineality already inside the hyperplane: classical ray splitting.
  std::vector<int> neg, zero, pos;
  for (int j = 0; j < st.rays.cols(); ++j) {
    const double d = m.dot(st.rays.col(j));
    if (d < -kGeomTol)
      neg.push_back(j);
    else if (d > kGeomTol)
      pos.push_back(j);
    else
      zero.push_back(j);
  }
  if (pos.empty()) return;
  for (int j : neg) cand.push_back(st.rays.col(j));
  for (int j : zero) cand.push_back(st.rays.col(j));
  for (int jn : neg) {
    for (int jp : pos) {
      const double dn = m.dot(st.rays.col(jn));
      const double dp = m.dot(st.rays.col(jp));
      cand.push_back(dp * st.rays.col(jn) - dn * st.rays.col(jp));
    }
  }
  st.rays = prune_rays(std::move(cand), st.lin, n);
}

DdState dd_from_inequalities(const Matrix& m_in) {
  const Matrix m = drop_zero_rows(m_in);
  const int n = int(m.cols());
  DdState st;
  st.lin = Matrix::Identity(n, n);
  st.rays = Matrix(n, 0);
  for (int i = 0; i < m.rows(); ++i) dd_process_halfspace(st, m.row(i).transpose());
  return st;
}

}  // namespace

// --- Polyhedron --------------------------------------------------------------

Polyhedron::Polyhedron(Matrix g, Vector h) : g_(std::move(g)), h_(std::move(h)) {
  if (g_.rows() != h_.size())
    throw ValidationError("polyhedron rows of G and h disagree");
  const auto feas = find_feasible_point(g_, h_);
  if (!feas.feasible) throw InfeasibleError("polyhedron is empty");
  feasible_ = feas.x;
}

Polyhedron Polyhedron::box(const Vector& lower, const Vector& upper) {
  const int n = int(lower.size());
  std::vector<std::pair<Vector, double>> rows;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(upper[i])) {
      Vector r = Vector::Zero(n);
      r[i] = 1.0;
      rows.emplace_back(r, upper[i]);
    }
    if (std::isfinite(lower[i])) {
      Vector r = Vector::Zero(n);
      r[i] = -1.0;
      rows.emplace_back(r, -lower[i]);
    }
  }
  Matrix g(int(rows.size()), n);
  Vector h(int(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    g.row(int(i)) = rows[i].first.transpose();
    h[int(i)] = rows[i].second;
  }
  return Polyhedron(g, h);
}

Polyhedron Polyhedron::nonnegative_orthant(int n) {
  return Polyhedron(-Matrix::Identity(n, n), Vector::Zero(n));
}

bool Polyhedron::contains(const Vector& x, double tolerance) const {
  if (g_.rows() == 0) return true;
  return ((g_ * x - h_).maxCoeff() <= tolerance);
}

std::vector<int> Polyhedron::active_rows(const Vector& x, double tolerance) const {
  std::vector<int> idx;
  for (int i = 0; i < g_.rows(); ++i) {
    const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
    if (std::abs(g_.row(i).dot(x) - h_[i]) <= tolerance * scale) idx.push_back(i);
  }
  return idx;
}

std::vector<Vector> Polyhedron::vertices() const {
  const int n = dim();
  const int s = int(g_.rows());
  std::vector<Vector> verts;
  if (s < n) return verts;
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  const double scale = std::max(1.0, h_.cwiseAbs().maxCoeff());
  auto try_comb = [&]() {
    Matrix gs(n, n);
    Vector hs(n);
    for (int i = 0; i < n; ++i) {
      gs.row(i) = g_.row(comb[i]);
      hs[i] = h_[comb[i]];
    }
    Eigen::FullPivLU<Matrix> lu(gs);
    if (!lu.isInvertible()) return;
    Vector x = lu.solve(hs);
    if ((g_ * x - h_).maxCoeff() > 1e-7 * scale) return;
    for (const auto& v : verts)
      if ((v - x).norm() < 1e-7 * scale) return;
    verts.push_back(x);
  };
  // iterate over all n-subsets of rows
  while (true) {
    try_comb();
    int i = n - 1;
    while (i >= 0 && comb[i] == s - n + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
  }
  return verts;
}

Polyhedron Polyhedron::intersect(const Matrix& g2, const Vector& h2) const {
  Matrix g(g_.rows() + g2.rows(), dim());
  g << g_, g2;
  Vector h(h_.size() + h2.size());
  h << h_, h2;
  return Polyhedron(g, h);
}

// --- PolyCone ----------------------------------------------------------------

bool PolyCone::contains(const Vector& w, double tolerance) const {
  if (m.rows() == 0) return true;
  const double scale = std::max(1.0, w.norm());
  return (m * w).maxCoeff() <= tolerance * scale;
}

bool PolyCone::contains_generator_form(const Vector& w, double tolerance) const {
  return distance(w) <= tolerance * std::max(1.0, w.norm());
}

double PolyCone::distance(const Vector& w) const {
  return distance_to_generated_cone(w, rays, lineality);
}

bool PolyCone::is_subspace(double tolerance) const {
  for (int j = 0; j < rays.cols(); ++j)
    if (!contains_generator_form(-rays.col(j), tolerance)) return false;
  return true;
}

PolyCone PolyCone::from_inequalities(const Matrix& m) {
  DdState st = dd_from_inequalities(m);
  PolyCone k;
  k.m = m;
  k.rays = st.rays;
  k.lineality = st.lin;
  return k;
}

PolyCone PolyCone::from_generators(const Matrix& rays, const Matrix& lineality) {
  const int n = int(rays.rows() > 0 ? rays.rows() : lineality.rows());
  // polar in inequality form, convert, polar back
  Matrix m_polar(rays.cols() + 2 * lineality.cols(), n);
  for (int j = 0; j < rays.cols(); ++j) m_polar.row(j) = rays.col(j).transpose();
  for (int j = 0; j < lineality.cols(); ++j) {
    m_polar.row(rays.cols() + 2 * j) = lineality.col(j).transpose();
    m_polar.row(rays.cols() + 2 * j + 1) = -lineality.col(j).transpose();
  }
  DdState polar_gen = dd_from_inequalities(m_polar);
  Matrix m(polar_gen.rays.cols() + 2 * polar_gen.lin.cols(), n);
  for (int j = 0; j < polar_gen.rays.cols(); ++j)
    m.row(j) = polar_gen.rays.col(j).transpose();
  for (int j = 0; j < polar_gen.lin.cols(); ++j) {
    m.row(polar_gen.rays.cols() + 2 * j) = polar_gen.lin.col(j).transpose();
    m.row(polar_gen.rays.cols() + 2 * j + 1) = -polar_gen.lin.col(j).transpose();
  }
  PolyCone k;
  k.m = m;
  k.rays = rays;
  for (int j = 0; j < k.rays.cols(); ++j) {
    const double nn = k.rays.col(j).norm();
    if (nn > 0) k.rays.col(j) /= nn;
  }
  k.lineality = column_space_basis(lineality);
  return k;
}

PolyCone PolyCone::subspace(const Matrix& basis, int n) {
  Matrix b = column_space_basis(basis);
  Matrix complement = null_space_basis(b.transpose(), n);
  Matrix m(2 * complement.cols(), n);
  for (int j = 0; j < complement.cols(); ++j) {
    m.row(2 * j) = complement.col(j).transpose();
    m.row(2 * j + 1) = -complement.col(j).transpose();
  }
  PolyCone k;
  k.m = m;
  k.rays = Matrix(n, 0);
  k.lineality = b;
  return k;
}

PolyCone PolyCone::full_space(int n) { return subspace(Matrix::Identity(n, n), n); }

PolyCone PolyCone::zero(int n) { return subspace(Matrix(n, 0), n); }

PolyCone PolyCone::polar() const {
  // polar of span(L)+cone(R) is {w : L^T w = 0, R^T w <= 0}
  Matrix m_polar(rays.cols() + 2 * lineality.cols(), dim());
  for (int j = 0; j < rays.cols(); ++j) m_polar.row(j) = rays.col(j).transpose();
  for (int j = 0; j < lineality.cols(); ++j) {
    m_polar.row(rays.cols() + 2 * j) = lineality.col(j).transpose();
    m_polar.row(rays.cols() + 2 * j + 1) = -lineality.col(j).transpose();
  }
  return PolyCone::from_inequalities(m_polar);
}

// --- cone calculus -------------------------------------------------------------

PolyCone tangent_cone(const Polyhedron& c, const Vector& x) {
  if (!c.contains(x, tol::kResidual * 10))
    throw ValidationError("tangent_cone: point is not in the set");
  const auto idx = c.active_rows(x);
  Matrix m(int(idx.size()), c.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) m.row(int(i)) = c.g().row(idx[i]);
  return PolyCone::from_inequalities(m);
}

PolyCone normal_cone(const Polyhedron& c, const Vector& x) {
  if (!c.contains(x, tol::kResidual * 10))
    throw ValidationError("normal_cone: point is not in the set");
  const auto idx = c.active_rows(x);
  Matrix gens(c.dim(), int(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i)
    gens.col(int(i)) = c.g().row(idx[i]).transpose();
  return PolyCone::from_generators(gens, Matrix(c.dim(), 0));
}

PolyCone critical_cone(const Polyhedron& c, const Vector& x, const Vector& v) {
  const PolyCone n = normal_cone(c, x);
  if (n.distance(v) > tol::kActive * std::max(1.0, v.norm()))
    throw ValidationError("critical_cone: v is not normal to C at x");
  const auto idx = c.active_rows(x);
  Matrix m(int(idx.size()) + 2, c.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) m.row(int(i)) = c.g().row(idx[i]);
  m.row(int(idx.size())) = v.transpose();
  m.row(int(idx.size()) + 1) = -v.transpose();
  return PolyCone::from_inequalities(m);
}

PolyCone cone_difference_span(const PolyCone& k) {
  Matrix all = append_columns(k.rays, k.lineality);
  return PolyCone::subspace(column_space_basis(all), k.dim());
}

// --- faces ----------------------------------------------------------------------

namespace {

// Closure of an equality candidate set: rows forced to zero on the face
// {M_J w = 0, M w <= 0} are absorbed until a relative-interior witness with
// strictly negative remaining rows exists.
struct FaceClosure {
  std::vector<int> equality;
  Vector witness;
  bool exists = false;
};

FaceClosure face_closure(const Matrix& m, std::vector<int> j_set) {
  const int n = int(m.cols());
  const int s = int(m.rows());
  std::set<int> j(j_set.begin(), j_set.end());
  while (true) {
    std::vector<int> rest;
    for (int i = 0; i < s; ++i)
      if (!j.count(i)) rest.push_back(i);
    // probe: max t s.t. M_J w = 0, M_rest w + t <= 0, |w|<=1, 0<=t<=1
    LpProblem p(n + 1);
    p.c = Vector::Zero(n + 1);
    p.c[n] = -1.0;
    p.a_eq = Matrix(int(j.size()), n + 1);
    p.b_eq = Vector::Zero(int(j.size()));
    int r = 0;
    for (int i : j) {
      p.a_eq.row(r).head(n) = m.row(i);
      p.a_eq(r, n) = 0.0;
      ++r;
    }
    p.a_ub = Matrix(int(rest.size()), n + 1);
    p.b_ub = Vector::Zero(int(rest.size()));
    for (std::size_t k = 0; k < rest.size(); ++k) {
      p.a_ub.row(int(k)).head(n) = m.row(rest[k]);
      p.a_ub(int(k), n) = 1.0;
    }
    p.lb.head(n).setConstant(-1.0);
    p.ub.head(n).setConstant(1.0);
    p.lb[n] = 0.0;
    p.ub[n] = 1.0;
    const LpResult res = solve_lp(p);
    if (res.status != LpStatus::kOptimal) return {};  // face empty
    if (res.x[n] > 1e-7 || rest.empty()) {
      FaceClosure fc;
      fc.equality.assign(j.begin(), j.end());
      fc.witness = res.x.head(n);
      fc.exists = true;
      return fc;
    }
    // find rows forced to zero: min M_i w over the face must be ~ 0
    bool grew = false;
    for (int i : rest) {
      LpProblem q(n);
      q.c = m.row(i).transpose();
      q.a_eq = Matrix(int(j.size()), n);
      q.b_eq = Vector::Zero(int(j.size()));
      int rr = 0;
      for (int jj : j) q.a_eq.row(rr++) = m.row(jj);
      q.a_ub = Matrix(int(rest.size()), n);
      q.b_ub = Vector::Zero(int(rest.size()));
      for (std::size_t k = 0; k < rest.size(); ++k) q.a_ub.row(int(k)) = m.row(rest[k]);
      q.lb.setConstant(-1.0);
      q.ub.setConstant(1.0);
      const LpResult rmin = solve_lp(q);
      if (rmin.status == LpStatus::kOptimal && rmin.value >= -1e-7) {
        j.insert(i);
        grew = true;
      }
    }
    if (!grew) {
      // numerically flat but nothing provably forced: accept as-is
      FaceClosure fc;
      fc.equality.assign(j.begin(), j.end());
      fc.witness = Vector::Zero(n);
      fc.exists = true;
      return fc;
    }
  }
}

}  // namespace

std::vector<ConeFace> face_enumeration(const PolyCone& k) {
  const Matrix m = drop_zero_rows(k.m);
  const int s = int(m.rows());
  const int n = int(m.cols());
  if (s > 20) throw LimitError("face_enumeration: more than 20 inequalities");

  std::vector<ConeFace> faces;
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> queue;

  auto push = [&](const std::vector<int>& j0) {
    FaceClosure fc = face_closure(m, j0);
    if (!fc.exists) return;
    if (seen.count(fc.equality)) return;
    seen.insert(fc.equality);
    ConeFace f;
    f.equality = fc.equality;
    for (int i = 0; i < s; ++i)
      if (!std::count(f.equality.begin(), f.equality.end(), i))
        f.inequality.push_back(i);
    f.witness = fc.witness;
    Matrix mj(int(f.equality.size()), n);
    for (std::size_t i = 0; i < f.equality.size(); ++i)
      mj.row(int(i)) = m.row(f.equality[i]);
    f.dim = n - rank(mj);
    faces.push_back(f);
    queue.push_back(fc.equality);
  };

  push({});
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::vector<int> base = queue[qi];
    for (int i = 0; i < s; ++i) {
      if (std::count(base.begin(), base.end(), i)) continue;
      std::vector<int> j = base;
      j.push_back(i);
      push(j);
    }
    if (faces.size() > 4096) throw LimitError("face_enumeration: face bound hit");
  }
  return faces;
}

// --- local Hausdorff distance ----------------------------------------------------

namespace {

double max_dist_truncated(const Polyhedron& c_from, const Polyhedron& c_to,
                          const Vector& center, double radius) {
  const int n = c_from.dim();
  Matrix box_g(2 * n, n);
  Vector box_h(2 * n);
  box_g << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  box_h.head(n) = center + Vector::Constant(n, radius);
  box_h.tail(n) = -(center - Vector::Constant(n, radius));
  Polyhedron trunc = c_from.intersect(box_g, box_h);  // throws if empty
  double best = 0.0;
  for (const auto& v : trunc.vertices()) {
    const auto p = project_polyhedron(v, c_to.g(), c_to.h(), c_to.feasible_point());
    best = std::max(best, (v - p.x).norm());
  }
  return best;
}

}  // namespace

LocalHausdorff hausdorff_local(const Polyhedron& c1, const Polyhedron& c2,
                               const Vector& center, double radius) {
  LocalHausdorff out;
  out.center = center;
  out.radius = radius;
  try {
    const double d12 = max_dist_truncated(c1, c2, center, radius);
    const double d21 = max_dist_truncated(c2, c1, center, radius);
    out.theta = std::max(d12, d21);
  } catch (const InfeasibleError&) {
    throw InfeasibleError("hausdorff_local: a set does not meet the ball");
  }
  out.slack = 0.0;  // vertex maximization of a convex distance is exact
  return out;
}

}  // namespace varstab
