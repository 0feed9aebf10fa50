#pragma once

// Elements of G = SL(2n, R) used along the orbit: unipotents u(Phi) and
// u^-(Phi), the diagonal flow a_t, centralizer embeddings, and the
// SL(2, R) copy attached to an invertible Phi.

#include <cstdint>

#include "danilab/curve.hpp"
#include "danilab/exact.hpp"
#include "danilab/lattice.hpp"
#include "danilab/types.hpp"

namespace danilab {

class GroupElement {
 public:
  // InvariantError unless m is 2n x 2n with |det m - 1| <= 1e-8.
  static GroupElement from_matrix(Matrix m);
  // Skips the determinant check; for constructions with det 1 by algebra.
  static GroupElement unchecked(Matrix m);
  static GroupElement identity(int n);

  int n() const { return static_cast<int>(m_.rows()) / 2; }
  const Matrix& matrix() const { return m_; }

  GroupElement inverse() const;
  Vector apply(const Vector& v) const { return m_ * v; }

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.m_ * b.m_);
  }

 private:
  explicit GroupElement(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

enum class Side { upper, lower };

// upper: [[I, Phi], [0, I]]; lower: [[I, 0], [Phi, I]].
GroupElement u_embed(const Matrix& phi, Side side = Side::upper);
// diag(e^t I_n, e^-t I_n).
GroupElement a_diag(double t, int n);
// diag(B, C).
GroupElement z_embed(const CentralizerElement& z);

// a_t [z(s)] u(phi(s)) basepoint, with z(s) = normalizer(curve, s) when
// normalize is set.
LatticeBasis orbit_point(const MatrixPolyCurve& curve, double s, double t,
                         const LatticeBasis& basepoint, bool normalize);

// a_{log N} u(Phi) (-q, p) = (N (Phi p - q), p / N).
Vector dani_vector(const Matrix& phi, const IntVector& p, const IntVector& q, std::int64_t N);

class Sl2Copy {
 public:
  // SingularityError when Phi is not invertible.
  explicit Sl2Copy(Matrix phi);

  int n() const { return static_cast<int>(phi_.rows()); }
  const Matrix& phi() const { return phi_; }
  const Matrix& phi_inv() const { return phi_inv_; }

 private:
  Matrix phi_;
  Matrix phi_inv_;
};

// [[alpha I, beta Phi], [gamma Phi^-1, delta I]] for M = [[alpha, beta],
// [gamma, delta]]; InvariantError unless |det M - 1| <= 1e-10.
GroupElement sl2_image(const Sl2Copy& copy, const Eigen::Matrix2d& M);

// E = [[0, 1], [-1, 0]].
Eigen::Matrix2d weyl_element();

// Lower-left block of E(Phi)^-1 z0 u(D) z0^-1 E(Phi), after checking that
// the product is lower unipotent.  Equals -Phi^-1 (B D C^-1) Phi^-1.
Matrix conj_by_E(const Matrix& phi, const CentralizerElement& z0, const Matrix& D);

namespace exact {

RationalMatrix u_embed(const RationalMatrix& phi);
// diag(N I_n, I_n / N) = a_{log N}.
RationalMatrix a_scale(std::int64_t N, std::size_t n);
// Columns of a_{log N} u(Phi) Z^{2n}.
RationalMatrix dani_lattice(const RationalMatrix& phi, std::int64_t N);

}  // namespace exact

}  // namespace danilab
