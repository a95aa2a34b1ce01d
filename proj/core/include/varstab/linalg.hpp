#pragma once

#include "varstab/types.hpp"

namespace varstab {

// Symmetric part (M + M^T)/2.
Matrix sym(const Matrix& m);

// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Matrix& m);

// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

// Numerical rank with a relative SVD cutoff.
int rank(const Matrix& m, double rel_tol = 1e-9);

// Orthonormal basis of the null space of m (columns), n x k.
// An empty/zero-row m yields the identity basis.
Matrix null_space_basis(const Matrix& m, int n, double rel_tol = 1e-9);

// Orthonormal basis of the column span of m.
Matrix column_space_basis(const Matrix& m, double rel_tol = 1e-9);

// Orthonormal basis of span(basis) ∩ {v}⊥.  basis columns need not be
// orthonormal. v = 0 returns the span basis itself.
Matrix span_intersect_orthogonal(const Matrix& basis, const Vector& v,
                                 double rel_tol = 1e-9);

// Distance from x to the column span of basis.
double distance_to_span(const Matrix& basis, const Vector& x);

// min eigenvalue of sym(H) restricted to the column span of basis
// (+inf if the span is trivial).
double min_eigenvalue_on_span(const Matrix& h, const Matrix& basis);

}  // namespace varstab
