#pragma once

#include "focal/types.hpp"

namespace focal {

// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

// Max absolute deviation from symmetry, ||M - M^T||_inf.
double symmetry_defect(const Matrix& m);

// Modified Gram-Schmidt on the columns, order preserving.  Columns that fall
// below `drop_tol` times the largest incoming column norm are an error: the
// callers always pass sets that are linearly independent by construction.
Matrix orthonormalize(const Matrix& m, double drop_tol = 1e-10);

// Orthonormal basis of the orthogonal complement of the (orthonormal) columns
// of `basis` inside R^dim.  `basis` may have zero columns.
Matrix complement_basis(const Matrix& basis, int dim);

// Minimum-norm least-squares solution of A x = b, discarding singular values
// below cut (an absolute threshold).
Vector pinv_solve(const Matrix& a, const Vector& b, double cut);

}  // namespace focal
