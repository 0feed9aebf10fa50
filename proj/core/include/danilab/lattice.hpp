#pragma once

// Unimodular lattices in R^m, m <= 8: LLL reduction, exact sup-norm
// shortest vectors, box counts, and the K_mu / Mahler membership tests.

#include <cstdint>

#include "danilab/exact.hpp"
#include "danilab/types.hpp"

namespace danilab {

inline constexpr int kMaxLatticeDim = 8;

class LatticeBasis {
 public:
  // InvariantError unless cols is square with |det| = 1 within 1e-8.
  static LatticeBasis from_matrix(Matrix cols);
  // For products of unimodular factors, where the determinant is 1 by
  // construction and a numeric check would only measure rounding.
  static LatticeBasis unchecked(Matrix cols);
  static LatticeBasis identity(int m);

  int m() const { return static_cast<int>(cols_.rows()); }
  const Matrix& cols() const { return cols_; }

 private:
  explicit LatticeBasis(Matrix cols) : cols_(std::move(cols)) {}
  Matrix cols_;
};

struct ReduceResult {
  LatticeBasis basis;
  // reduced.cols() = original.cols() * transform, det(transform) = +-1.
  IntMatrix transform;
};

// LLL with delta = 0.99.
ReduceResult reduce(const LatticeBasis& basis);

struct ShortVectorResult {
  double length = 0.0;
  Vector vector;
  // Coefficients in the input basis; first nonzero entry is positive.
  IntVector coeffs;
};

// Exact minimiser of the sup norm over nonzero lattice vectors.  Ties
// (relative 1e-12) go to the lexicographically smallest coefficient vector.
ShortVectorResult shortest_supnorm(const LatticeBasis& basis);

// Number of nonzero v in the lattice with |v_i| <= halfwidths_i.
std::int64_t count_in_box(const LatticeBasis& basis, const Vector& halfwidths);

// No nonzero vector with sup norm < mu.  DomainError unless 0 < mu < 1.
bool in_K_mu(const LatticeBasis& basis, double mu);
bool in_mahler_compact(const LatticeBasis& basis, double eps);

namespace exact {

// Whether some nonzero integer combination of the columns has every
// coordinate strictly inside (-radius, radius).  Exact arithmetic; the
// float LLL only chooses the enumeration basis.
bool vector_in_open_box(const RationalMatrix& cols, const Rational& radius);

bool in_K_mu(const RationalMatrix& cols, const Rational& mu);

}  // namespace exact

}  // namespace danilab
