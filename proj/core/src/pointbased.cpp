#include "varstab/pointbased.hpp"

#include "varstab/linalg.hpp"

#include <cmath>

namespace varstab {

IntervalPiece classify_interval_graph_point(double a, double b, double x,
                                            double v, double tolerance) {
  if (a == b) return IntervalPiece::kPoint;
  const bool at_lower = std::isfinite(a) && std::abs(x - a) <= tolerance;
  const bool at_upper = std::isfinite(b) && std::abs(x - b) <= tolerance;
  if (at_lower) {
    if (v < -tolerance) return IntervalPiece::kLowerRay;
    if (std::abs(v) <= tolerance) return IntervalPiece::kLowerCorner;
    throw ValidationError("interval graph point has v > 0 at the lower bound");
  }
  if (at_upper) {
    if (v > tolerance) return IntervalPiece::kUpperRay;
    if (std::abs(v) <= tolerance) return IntervalPiece::kUpperCorner;
    throw ValidationError("interval graph point has v < 0 at the upper bound");
  }
  if (x < a - tolerance || x > b + tolerance)
    throw ValidationError("interval graph point is outside [a, b]");
  if (std::abs(v) > tolerance)
    throw ValidationError("interval graph point has v != 0 in the interior");
  return IntervalPiece::kInterior;
}

ZSet interval_coderivative(IntervalPiece piece, double w, CoderivativeKind kind) {
  switch (piece) {
    case IntervalPiece::kInterior:
      return ZSet::kZero;
    case IntervalPiece::kLowerRay:
    case IntervalPiece::kUpperRay:
    case IntervalPiece::kPoint:
      return w == 0.0 ? ZSet::kAll : ZSet::kEmpty;
    case IntervalPiece::kLowerCorner:
      if (kind == CoderivativeKind::kRegular)
        return w <= 0.0 ? ZSet::kNonPos : ZSet::kEmpty;
      if (w > 0.0) return ZSet::kZero;
      if (w == 0.0) return ZSet::kAll;
      return ZSet::kNonPos;
    case IntervalPiece::kUpperCorner:
      if (kind == CoderivativeKind::kRegular)
        return w >= 0.0 ? ZSet::kNonNeg : ZSet::kEmpty;
      if (w < 0.0) return ZSet::kZero;
      if (w == 0.0) return ZSet::kAll;
      return ZSet::kNonNeg;
  }
  return ZSet::kEmpty;
}

bool zset_contains(ZSet z, double value, double tolerance) {
  switch (z) {
    case ZSet::kEmpty:
      return false;
    case ZSet::kZero:
      return std::abs(value) <= tolerance;
    case ZSet::kNonPos:
      return value <= tolerance;
    case ZSet::kNonNeg:
      return value >= -tolerance;
    case ZSet::kAll:
      return true;
  }
  return false;
}

bool zset_subset(ZSet inner, ZSet outer) {
  if (inner == ZSet::kEmpty) return true;
  if (outer == ZSet::kAll) return true;
  if (inner == outer) return true;
  if (inner == ZSet::kZero)
    return outer == ZSet::kNonPos || outer == ZSet::kNonNeg;
  return false;
}

double zset_inf_product(ZSet z, double w) {
  switch (z) {
    case ZSet::kEmpty:
      return kInf;
    case ZSet::kZero:
      return 0.0;
    case ZSet::kAll:
      return w == 0.0 ? 0.0 : -kInf;
    case ZSet::kNonPos:
      return w > 0.0 ? -kInf : 0.0;
    case ZSet::kNonNeg:
      return w < 0.0 ? -kInf : 0.0;
  }
  return kInf;
}

double BoxCoderivative::inf_inner_product(const Vector& w) const {
  if (empty) return kInf;
  double total = 0.0;
  for (std::size_t i = 0; i < per_coordinate.size(); ++i) {
    const double c = zset_inf_product(per_coordinate[i], w[int(i)]);
    if (c == kInf) return kInf;
    if (c == -kInf) return -kInf;
    total += c;
  }
  return total;
}

BoxCoderivative coderivative_box_normal(const Vector& lower, const Vector& upper,
                                        const Vector& x, const Vector& v,
                                        const Vector& w, CoderivativeKind kind) {
  const int n = int(x.size());
  BoxCoderivative out;
  out.per_coordinate.resize(n);
  out.pieces.resize(n);
  for (int i = 0; i < n; ++i) {
    out.pieces[i] = classify_interval_graph_point(lower[i], upper[i], x[i], v[i]);
    out.per_coordinate[i] = interval_coderivative(out.pieces[i], w[i], kind);
    if (out.per_coordinate[i] == ZSet::kEmpty) out.empty = true;
  }
  return out;
}

// --- (Mor) -----------------------------------------------------------------------

MorReport check_mor_condition(const IndicatorBox& box, const Vector& x_bar,
                              const Vector& p_bar, const Vector& v_hat) {
  const int n = int(x_bar.size());
  Vector y = x_bar;
  if (box.shift.size() > 0 && p_bar.size() > 0) y -= box.shift * p_bar;

  MorReport rep;
  rep.pieces.resize(n);
  for (int i = 0; i < n; ++i)
    rep.pieces[i] =
        classify_interval_graph_point(box.lower[i], box.upper[i], y[i], v_hat[i]);

  // Graph normals have the form (xi, -S^T xi, zeta) with (xi, zeta) normal to
  // gph N_box at (y, v_hat). The (Mor) membership pins the x-part xi to zero,
  // which forces z = -S^T xi = 0 for every shift. The pieces are recorded so
  // a report can show which coordinates carried vertical graph segments.
  rep.holds = true;
  rep.witness_z = Vector::Zero(box.shift.size() > 0 ? int(box.shift.cols()) : 0);
  return rep;
}

// --- (4.43) ---------------------------------------------------------------------

PointbasedLipschitzReport check_pointbased_lipschitz(const PvsInstance& inst) {
  const int n = inst.dims().n;
  const IndicatorBox* box = std::get_if<IndicatorBox>(&inst.potential());
  Matrix h = inst.base().q;
  Vector v_graph = inst.v_hat();
  if (box == nullptr) {
    const auto* quad = std::get_if<QuadraticPlusIndicator>(&inst.potential());
    if (quad == nullptr || !std::holds_alternative<IndicatorBox>(quad->inner))
      throw ValidationError(
          "check_pointbased_lipschitz: requires a box-class potential");
    box = &std::get<IndicatorBox>(quad->inner);
    h += quad->w;  // D*(W x + N_box) = W w + D*N_box(w)
    v_graph -= quad->w * inst.reference().x;
  }

  PointbasedLipschitzReport rep;
  const auto mor = check_mor_condition(*box, inst.reference().x,
                                       inst.reference().p, v_graph);
  rep.mor_holds = mor.holds;

  Vector y = inst.reference().x;
  if (box->shift.size() > 0 && inst.reference().p.size() > 0)
    y -= box->shift * inst.reference().p;

  // Ray pieces force w_i = 0 (the coderivative is empty otherwise); corner
  // and interior pieces contribute infimum zero to <z, w>.
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i) {
    const auto piece =
        classify_interval_graph_point(box->lower[i], box->upper[i], y[i], v_graph[i]);
    const bool pinned = piece == IntervalPiece::kLowerRay ||
                        piece == IntervalPiece::kUpperRay ||
                        piece == IntervalPiece::kPoint;
    if (pinned)
      rep.pinned.push_back(i);
    else
      free_idx.push_back(i);
  }

  if (free_idx.empty()) {
    rep.curvature_holds = true;  // no admissible w != 0: condition is vacuous
    rep.min_curvature = kInf;
  } else {
    Matrix basis = Matrix::Zero(n, int(free_idx.size()));
    for (std::size_t k = 0; k < free_idx.size(); ++k) basis(free_idx[k], int(k)) = 1.0;
    Matrix hr = basis.transpose() * sym(h) * basis;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hr);
    rep.min_curvature = es.eigenvalues().minCoeff();
    rep.curvature_holds = rep.min_curvature > tol::kEig;
    if (!rep.curvature_holds) {
      int arg = 0;
      es.eigenvalues().minCoeff(&arg);
      rep.witness_w = basis * es.eigenvectors().col(arg);
    }
  }
  rep.holds = rep.mor_holds && rep.curvature_holds;
  return rep;
}

// --- cone limits ------------------------------------------------------------------

ConeLimit cone_limit_polyhedral(const Polyhedron& c, const Vector& x_bar,
                                const Vector& v_hat) {
  const PolyCone k = critical_cone(c, x_bar, v_hat);
  return {cone_difference_span(k)};
}

ConeLimit cone_limit_box(const Vector& lower, const Vector& upper,
                         const Vector& x_bar, const Vector& v_hat) {
  const int n = int(x_bar.size());
  for (int i = 0; i < n; ++i)  // validates graph membership
    classify_interval_graph_point(lower[i], upper[i], x_bar[i], v_hat[i]);
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i)
    if (std::abs(v_hat[i]) <= tol::kActive) free_idx.push_back(i);
  Matrix basis = Matrix::Zero(n, int(free_idx.size()));
  for (std::size_t k = 0; k < free_idx.size(); ++k) basis(free_idx[k], int(k)) = 1.0;
  return {PolyCone::subspace(basis, n)};
}

// --- PVI positive definiteness -------------------------------------------------------

PviPdReport pvi_positive_definiteness(const Matrix& q, const Polyhedron& c,
                                      const Vector& x_bar, const Vector& v_hat,
                                      PviVariant variant) {
  Matrix basis;
  if (variant == PviVariant::kCriticalSpan) {
    const PolyCone k = critical_cone(c, x_bar, v_hat);
    basis = cone_difference_span(k).lineality;
  } else {
    // cl[T - T] is the span of the tangent cone's generators; the closure is
    // exact because the span of finitely many generators is closed.
    const PolyCone t = tangent_cone(c, x_bar);
    Matrix gens(q.rows(), t.rays.cols() + t.lineality.cols());
    if (t.rays.cols() > 0) gens.leftCols(t.rays.cols()) = t.rays;
    if (t.lineality.cols() > 0) gens.rightCols(t.lineality.cols()) = t.lineality;
    basis = span_intersect_orthogonal(gens, v_hat);
  }

  PviPdReport rep;
  rep.subspace_dim = int(column_space_basis(basis).cols());
  if (rep.subspace_dim == 0) {
    rep.holds = true;
    rep.min_eigenvalue = kInf;
    return rep;
  }
  rep.min_eigenvalue = min_eigenvalue_on_span(q, basis);
  rep.holds = rep.min_eigenvalue > tol::kEig;
  return rep;
}

}  // namespace varstab
