#include "varstab/model.hpp"

#include "varstab/linalg.hpp"

#include <cmath>
#include <sstream>

namespace varstab {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

// Distance from (y, v) to gph N_[a,b] in R^2, closed form over the three
// pieces of the polyline.
double interval_graph_distance(double a, double b, double y, double v) {
  if (a == b) return std::abs(y - a);  // graph degenerates to the line {a} x R
  const double t = std::min(std::max(y, a), b);
  double best = std::hypot(y - t, v);  // horizontal piece
  if (std::isfinite(a))
    best = std::min(best, std::hypot(y - a, std::max(v, 0.0)));  // lower ray
  if (std::isfinite(b))
    best = std::min(best, std::hypot(y - b, std::min(v, 0.0)));  // upper ray
  return best;
}

// Feasibility + cone distance for a polyhedron-valued potential.
double polyhedral_subgradient_distance(const Matrix& g, const Vector& h,
                                       const Vector& x, const Vector& v) {
  double violation = 0.0;
  if (g.rows() > 0) violation = std::max(0.0, (g * x - h).maxCoeff());
  // generous activity window so the residual degrades continuously
  std::vector<int> active;
  const double scale = std::max(1.0, h.size() ? h.cwiseAbs().maxCoeff() : 1.0);
  for (int i = 0; i < g.rows(); ++i)
    if (std::abs(g.row(i).dot(x) - h[i]) <= 1e-6 * scale) active.push_back(i);
  Matrix gens(x.size(), int(active.size()));
  for (std::size_t i = 0; i < active.size(); ++i)
    gens.col(int(i)) = g.row(active[i]).transpose();
  return violation + distance_to_generated_cone(v, gens);
}

}  // namespace

Vector BaseMapSpec::evaluate(const Vector& x, const Vector& p,
                             const Vector& qq) const {
  require(x.size() == q.cols(), "evaluate_base: x dimension mismatch");
  require(p.size() == b.cols(), "evaluate_base: p dimension mismatch");
  require(qq.size() == d.cols(), "evaluate_base: q dimension mismatch");
  Vector out = c + q * x;
  if (p.size() > 0) out += b * p;
  if (qq.size() > 0) out += d * qq;
  return out;
}

double BaseMapSpec::strong_monotonicity_modulus() const {
  return min_eigenvalue(q);
}

// --- SmoothIneq ---------------------------------------------------------------

double SmoothIneq::value(int i, const Vector& x, const Vector& p) const {
  const auto& c = constraints[i];
  double out = c.b.dot(x) + c.d;
  if (c.a.size() > 0) out += 0.5 * x.dot(c.a * x);
  if (p.size() > 0) out += c.g.dot(p);
  return out;
}

Vector SmoothIneq::gradient_x(int i, const Vector& x) const {
  const auto& c = constraints[i];
  if (c.a.size() > 0) return c.a * x + c.b;
  return c.b;
}

bool SmoothIneq::affine_in_x() const {
  for (const auto& c : constraints)
    if (c.a.size() > 0 && c.a.cwiseAbs().maxCoeff() > 0) return false;
  return true;
}

// --- potential dispatch ---------------------------------------------------------

bool potential_depends_on_p(const PotentialSpec& g) {
  return std::visit(
      [](const auto& pot) -> bool {
        using T = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<T, IndicatorPolyhedron>) return false;
        if constexpr (std::is_same_v<T, IndicatorAffineQvi>) return true;
        if constexpr (std::is_same_v<T, IndicatorBox>)
          return pot.shift.size() > 0 && pot.shift.cwiseAbs().maxCoeff() > 0;
        if constexpr (std::is_same_v<T, QuadraticPlusIndicator>)
          return std::visit(
              [](const auto& inner) {
                return potential_depends_on_p(PotentialSpec(inner));
              },
              pot.inner);
        if constexpr (std::is_same_v<T, SmoothIneq>) {
          for (const auto& c : pot.constraints)
            if (c.g.size() > 0 && c.g.cwiseAbs().maxCoeff() > 0) return true;
          return false;
        }
      },
      g);
}

bool potential_is_polyhedral(const PotentialSpec& g) {
  return std::visit(
      [](const auto& pot) -> bool {
        using T = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<T, SmoothIneq>) return pot.affine_in_x();
        if constexpr (std::is_same_v<T, QuadraticPlusIndicator>) {
          (void)pot;
          return true;  // inner variants are all polyhedral
        }
        return true;
      },
      g);
}

Polyhedron potential_domain(const PotentialSpec& g, const Vector& p) {
  return std::visit(
      [&](const auto& pot) -> Polyhedron {
        using T = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<T, IndicatorPolyhedron>) {
          return Polyhedron(pot.g, pot.h);
        } else if constexpr (std::is_same_v<T, IndicatorAffineQvi>) {
          const int n = int(pot.a.cols());
          Matrix gg(pot.a.rows() + n, n);
          gg << pot.a, -Matrix::Identity(n, n);
          Vector hh(pot.a.rows() + n);
          hh << p, Vector::Zero(n);
          return Polyhedron(gg, hh);
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          Vector off = Vector::Zero(pot.lower.size());
          if (pot.shift.size() > 0 && p.size() > 0) off = pot.shift * p;
          Vector lo = pot.lower, hi = pot.upper;
          for (int i = 0; i < lo.size(); ++i) {
            if (std::isfinite(lo[i])) lo[i] += off[i];
            if (std::isfinite(hi[i])) hi[i] += off[i];
          }
          return Polyhedron::box(lo, hi);
        } else if constexpr (std::is_same_v<T, QuadraticPlusIndicator>) {
          return std::visit(
              [&](const auto& inner) {
                return potential_domain(PotentialSpec(inner), p);
              },
              pot.inner);
        } else {
          if (!pot.affine_in_x())
            throw ValidationError(
                "potential_domain: quadratic inequality system is not "
                "polyhedral");
          const int n = pot.constraints.empty()
                            ? pot.dim
                            : int(pot.constraints.front().b.size());
          Matrix gg(pot.count(), n);
          Vector hh(pot.count());
          for (int i = 0; i < pot.count(); ++i) {
            gg.row(i) = pot.constraints[i].b.transpose();
            hh[i] = -pot.constraints[i].d;
            if (p.size() > 0) hh[i] -= pot.constraints[i].g.dot(p);
          }
          return Polyhedron(gg, hh);
        }
      },
      g);
}

Matrix potential_quadratic(const PotentialSpec& g, int n) {
  if (const auto* q = std::get_if<QuadraticPlusIndicator>(&g)) return q->w;
  return Matrix::Zero(n, n);
}

double potential_value(const PotentialSpec& g, const Vector& x, const Vector& p) {
  return std::visit(
      [&](const auto& pot) -> double {
        using T = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<T, QuadraticPlusIndicator>) {
          const double inner = std::visit(
              [&](const auto& in) {
                return potential_value(PotentialSpec(in), x, p);
              },
              pot.inner);
          if (!std::isfinite(inner)) return kInf;
          return 0.5 * x.dot(pot.w * x);
        } else if constexpr (std::is_same_v<T, SmoothIneq>) {
          for (int i = 0; i < pot.count(); ++i)
            if (pot.value(i, x, p) > tol::kActive) return kInf;
          return 0.0;
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          Vector off = Vector::Zero(pot.lower.size());
          if (pot.shift.size() > 0 && p.size() > 0) off = pot.shift * p;
          for (int i = 0; i < x.size(); ++i) {
            const double y = x[i] - off[i];
            if (y < pot.lower[i] - tol::kActive || y > pot.upper[i] + tol::kActive)
              return kInf;
          }
          return 0.0;
        } else {
          const Polyhedron dom = potential_domain(PotentialSpec(pot), p);
          return dom.contains(x) ? 0.0 : kInf;
        }
      },
      g);
}

double subgradient_distance(const PotentialSpec& g, const Vector& x,
                            const Vector& p, const Vector& v) {
  return std::visit(
      [&](const auto& pot) -> double {
        using T = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<T, IndicatorPolyhedron>) {
          return polyhedral_subgradient_distance(pot.g, pot.h, x, v);
        } else if constexpr (std::is_same_v<T, IndicatorAffineQvi>) {
          const int n = int(pot.a.cols());
          Matrix gg(pot.a.rows() + n, n);
          gg << pot.a, -Matrix::Identity(n, n);
          Vector hh(pot.a.rows() + n);
          hh << p, Vector::Zero(n);
          return polyhedral_subgradient_distance(gg, hh, x, v);
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          Vector off = Vector::Zero(pot.lower.size());
          if (pot.shift.size() > 0 && p.size() > 0) off = pot.shift * p;
          double sq = 0.0;
          for (int i = 0; i < x.size(); ++i) {
            const double d = interval_graph_distance(pot.lower[i], pot.upper[i],
                                                     x[i] - off[i], v[i]);
            sq += d * d;
          }
          return std::sqrt(sq);
        } else if constexpr (std::is_same_v<T, QuadraticPlusIndicator>) {
          const Vector v_inner = v - pot.w * x;
          return std::visit(
              [&](const auto& in) {
                return subgradient_distance(PotentialSpec(in), x, p, v_inner);
              },
              pot.inner);
        } else {
          double violation = 0.0;
          std::vector<int> active;
          for (int i = 0; i < pot.count(); ++i) {
            const double val = pot.value(i, x, p);
            violation = std::max(violation, val);
            if (val >= -1e-6) active.push_back(i);
          }
          violation = std::max(0.0, violation);
          Matrix gens(x.size(), int(active.size()));
          for (std::size_t i = 0; i < active.size(); ++i)
            gens.col(int(i)) = pot.gradient_x(active[i], x);
          return violation + distance_to_generated_cone(v, gens);
        }
      },
      g);
}

// --- instance ---------------------------------------------------------------------

PvsInstance::PvsInstance(Dims dims, BaseMapSpec base, PotentialSpec potential,
                         ReferencePoint reference)
    : dims_(dims),
      base_(std::move(base)),
      potential_(std::move(potential)),
      reference_(std::move(reference)) {
  require(base_.c.size() == dims_.n, "base c has wrong dimension");
  require(base_.q.rows() == dims_.n && base_.q.cols() == dims_.n,
          "base Q has wrong shape");
  require(base_.b.rows() == dims_.n && base_.b.cols() == dims_.l,
          "base B has wrong shape");
  require(base_.d.rows() == dims_.n && base_.d.cols() == dims_.m,
          "base D has wrong shape");
  require(all_finite(base_.c) && all_finite(base_.q) && all_finite(base_.b) &&
              all_finite(base_.d),
          "base coefficients must be finite");
  require(reference_.x.size() == dims_.n, "reference x has wrong dimension");
  require(reference_.p.size() == dims_.l, "reference p has wrong dimension");
  require(reference_.q.size() == dims_.m, "reference q has wrong dimension");
  require(reference_.v.size() == dims_.n, "reference v has wrong dimension");

  if (const auto* si = std::get_if<SmoothIneq>(&potential_)) {
    for (const auto& c : si->constraints) {
      require(c.b.size() == dims_.n, "smooth_ineq b has wrong dimension");
      require(c.g.size() == dims_.l || (dims_.l == 0 && c.g.size() == 0),
              "smooth_ineq g has wrong dimension");
      if (c.a.size() > 0) {
        require(c.a.rows() == dims_.n && c.a.cols() == dims_.n,
                "smooth_ineq A has wrong shape");
        require((c.a - c.a.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
                "smooth_ineq A must be symmetric");
      }
    }
  }
  if (const auto* qi = std::get_if<QuadraticPlusIndicator>(&potential_)) {
    require(qi->w.rows() == dims_.n && qi->w.cols() == dims_.n,
            "quadratic W has wrong shape");
    require((qi->w - qi->w.transpose()).cwiseAbs().maxCoeff() <= 1e-12,
            "quadratic W must be symmetric");
  }

  const double res = reference_residual();
  if (res > tol::kResidual) {
    std::ostringstream os;
    os << "reference residual violation: dist(v_hat, subdifferential) = " << res;
    throw ValidationError(os.str());
  }
}

Vector PvsInstance::evaluate_base(const Vector& x, const Vector& p,
                                  const Vector& q) const {
  return base_.evaluate(x, p, q);
}

double PvsInstance::strong_monotonicity_modulus() const {
  return base_.strong_monotonicity_modulus();
}

LipschitzReport PvsInstance::lipschitz_modulus() const {
  Matrix concat(dims_.n, dims_.n + dims_.l + dims_.m);
  concat << base_.q, base_.b, base_.d;
  LipschitzReport rep;
  rep.concatenated = spectral_norm(concat);
  rep.max_block = std::max({spectral_norm(base_.q), spectral_norm(base_.b),
                            spectral_norm(base_.d)});
  return rep;
}

Vector PvsInstance::v_hat() const {
  return reference_.v - evaluate_base(reference_.x, reference_.p, reference_.q);
}

double PvsInstance::reference_residual() const {
  return subgradient_distance(potential_, reference_.x, reference_.p, v_hat());
}

}  // namespace varstab
