#pragma once

// Programmatic copies of the shipped instance fixtures, for tests that
// want to build instances without touching the filesystem.

#include "varstab/model.hpp"

namespace fixtures {

using namespace varstab;

// Worked PVC instance: quadratic-in-x cost gradient with four affine
// constraints in R^3, reference at the origin.
inline PvsInstance example94() {
  Dims dims{3, 2, 0};
  Matrix q(3, 3);
  q << 0, -1, 0, -1, 0, 0, 0, 0, 2;
  Matrix b(3, 2);
  b << 0, 1, 1, 0, 0, 0;
  Vector c(3);
  c << 0.25, 0, 1;
  BaseMapSpec base{c, q, b, Matrix(3, 0)};

  SmoothIneq pot;
  auto add = [&](double b1, double b2, double b3, double g1, double g2) {
    SmoothIneqConstraint sc;
    sc.a = Matrix(0, 0);
    sc.b = Vector(3);
    sc.b << b1, b2, b3;
    sc.g = Vector(2);
    sc.g << g1, g2;
    sc.d = 0.0;
    pot.constraints.push_back(sc);
  };
  add(1, 0, -1, -1, 0);   // x1 - x3 - p1 <= 0
  add(-1, 0, -1, 1, 0);   // -x1 - x3 + p1 <= 0
  add(0, 1, -1, 0, -1);   // x2 - x3 - p2 <= 0
  add(0, -1, -1, 0, 1);   // -x2 - x3 + p2 <= 0

  ReferencePoint ref{Vector::Zero(3), Vector::Zero(2), Vector(0), Vector::Zero(3)};
  return PvsInstance(dims, base, pot, ref);
}

// Orthant instance with a concave quadratic potential: f = sigma*x + p + q,
// g = indicator(R^2_+) - (r/2)||x||^2. sigma > r is the contractive regime.
inline PvsInstance example72(double sigma, double r) {
  Dims dims{2, 2, 2};
  BaseMapSpec base{Vector::Zero(2), sigma * Matrix::Identity(2, 2),
                   Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  QuadraticPlusIndicator pot{
      -r * Matrix::Identity(2, 2),
      IndicatorBox{Vector::Zero(2), Vector::Constant(2, kInf), Matrix(0, 0)}};
  ReferencePoint ref{Vector::Zero(2), Vector::Zero(2), Vector::Zero(2),
                     Vector::Zero(2)};
  return PvsInstance(dims, base, pot, ref);
}

// Affine quasi-variational inequality with C(p) = {x : x <= p, x >= 0} in R^1,
// reference in the interior of C(1).
inline PvsInstance aqvi1() {
  Dims dims{1, 1, 1};
  Matrix q(1, 1), b(1, 1), d(1, 1);
  q << 1;
  b << 0.5;
  d << 0.5;
  BaseMapSpec base{Vector::Zero(1), q, b, d};
  IndicatorAffineQvi pot{Matrix::Ones(1, 1)};
  Vector x(1), p(1), qq(1), v(1);
  x << 0.5;
  p << 1.0;
  qq << 0.0;
  v << 1.0;  // f(0.5, 1, 0) = 0.5 + 0.5 = 1, v_hat = 0
  return PvsInstance(dims, base, pot, {x, p, qq, v});
}

// Moving box C(p) = [0, p] around p = 1 with identity base; the reference
// sits at the upper bound with an outward normal, so prox queries probe the
// moving-set sensitivity.
inline PvsInstance box_moving() {
  Dims dims{1, 1, 0};
  Matrix q(1, 1);
  q << 1;
  BaseMapSpec base{Vector::Zero(1), q, Matrix::Zero(1, 1), Matrix(1, 0)};
  IndicatorAffineQvi pot{Matrix::Ones(1, 1)};
  Vector x(1), p(1), v(1);
  x << 1.0;
  p << 1.0;
  v << 2.0;  // v_hat = 2 - 1 = 1 in N_{[0,1]}(1)
  return PvsInstance(dims, base, pot, {x, p, Vector(0), v});
}

}  // namespace fixtures
