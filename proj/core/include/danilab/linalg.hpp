#pragma once

#include <vector>

#include "danilab/types.hpp"

namespace danilab {

// Singular values below tol * max(1, sigma_max) count as zero.
struct SpanResult {
  int rank = 0;
  Matrix basis;  // orthonormal columns
};

// Orthonormal basis of the column span of a.
SpanResult column_span(const Matrix& a, double tol = kRankTol);
// Orthonormal basis (columns) of {x : a x = 0}.
Matrix null_space(const Matrix& a, double tol = kRankTol);

double sup_norm(const Matrix& m);
double sup_norm(const Vector& v);

// Checked inverse: throws SingularityError when |det| <= kInvertTol.
Matrix checked_inverse(const Matrix& m, const char* what);

}  // namespace danilab
