#include "varstab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace varstab {

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& m) {
  if (m.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(m));
  return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

int rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 1e-14) ++r;
  return r;
}

Matrix null_space_basis(const Matrix& m, int n, double rel_tol) {
  if (m.rows() == 0 || m.size() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() ? rel_tol * sv(0) : 0.0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 1e-14) ++r;
  return svd.matrixV().rightCols(n - r);
}

Matrix column_space_basis(const Matrix& m, double rel_tol) {
  if (m.size() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cutoff = (sv.size() ? rel_tol * sv(0) : 0.0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 1e-14) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix span_intersect_orthogonal(const Matrix& basis, const Vector& v,
                                 double rel_tol) {
  Matrix b = column_space_basis(basis, rel_tol);
  if (b.cols() == 0) return b;
  if (v.size() == 0 || v.norm() <= 1e-14) return b;
  // {B y : v^T B y = 0}: null space of the 1 x k row v^T B in y-coordinates.
  Eigen::RowVectorXd row = v.transpose() * b;
  if (row.norm() <= rel_tol * v.norm()) return b;  // span already ⊥ v
  Matrix y = null_space_basis(row, static_cast<int>(b.cols()), rel_tol);
  if (y.cols() == 0) return Matrix(basis.rows(), 0);
  return column_space_basis(b * y, rel_tol);
}

double distance_to_span(const Matrix& basis, const Vector& x) {
  if (basis.cols() == 0) return x.norm();
  Matrix b = column_space_basis(basis);
  if (b.cols() == 0) return x.norm();
  return (x - b * (b.transpose() * x)).norm();
}

double min_eigenvalue_on_span(const Matrix& h, const Matrix& basis) {
  Matrix b = column_space_basis(basis);
  if (b.cols() == 0) return kInf;
  return min_eigenvalue(b.transpose() * sym(h) * b);
}

}  // namespace varstab
