#pragma once

// Polynomial matrix curves phi: [a,b] -> M(n x n, R) and the quantities the
// non-improvability argument reads off them: the inverse-shift curve
// s -> (phi(s) - phi(s0))^{-1}, its affine span, and the centralizer element
// z(s) that normalizes phi'(s) to the identity.

#include <cstdint>
#include <vector>

#include "danilab/exact.hpp"
#include "danilab/types.hpp"

namespace danilab {

class MatrixPolyCurve {
 public:
  // phi(s) = sum_k coeffs[k] s^k on [a, b]; all coefficients n x n.
  MatrixPolyCurve(std::vector<Matrix> coeffs, double a, double b);

  int n() const { return n_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  // Horner evaluation; DomainError outside [a, b].
  Matrix eval(double s) const;
  Matrix derivative(double s) const;

  // Evaluation without the interval check, for finite-difference stencils
  // that may step just past an endpoint.
  Matrix eval_unchecked(double s) const;

 private:
  void check_domain(double s) const;

  int n_;
  std::vector<Matrix> coeffs_;
  double a_;
  double b_;
};

// Same curve with exact rational coefficients and sample points.
class RationalPolyCurve {
 public:
  RationalPolyCurve(std::vector<RationalMatrix> coeffs, Rational a, Rational b);

  int n() const { return n_; }
  const std::vector<RationalMatrix>& coeffs() const { return coeffs_; }
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }

  RationalMatrix eval(const Rational& s) const;
  MatrixPolyCurve to_double() const;

 private:
  int n_;
  std::vector<RationalMatrix> coeffs_;
  Rational a_;
  Rational b_;
};

// z = diag(B, C) in the centralizer of the diagonal flow.
class CentralizerElement {
 public:
  // InvariantError unless |det B det C - 1| <= 1e-10.
  CentralizerElement(Matrix B, Matrix C);

  static CentralizerElement identity(int n);

  int n() const { return static_cast<int>(B_.rows()); }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }

  // The induced action on M(n x n): Phi -> B Phi C^{-1}.
  Matrix act(const Matrix& phi) const;

 private:
  Matrix B_;
  Matrix C_;
};

// (phi(s) - phi(s0))^{-1}; SingularityError when |det| <= kInvertTol.
Matrix inverse_shift(const MatrixPolyCurve& curve, double s0, double s);

struct AffineRank {
  int rank = 0;
  // Orthonormal basis of span{p_i - p_0}, one vector per entry.
  std::vector<Vector> basis;
};

AffineRank affine_rank(const std::vector<Vector>& points, double tol = kRankTol);

enum class Verdict { generic, degenerate };

struct GenericityVerdict {
  Verdict verdict = Verdict::degenerate;
  int affine_rank = 0;
  // Linear part of the affine hull; filled only for degenerate verdicts.
  std::vector<Vector> witness_subspace;
  int samples_used = 0;
  // Radius of the punctured neighbourhood of s0 that was sampled.
  double radius = 0.0;
};

// Samples m Chebyshev-distributed points in a punctured neighbourhood of
// s0 and tests whether the flattened inverse shifts span M(n x n)
// affinely.  seed = 0 gives the plain Chebyshev nodes; other seeds jitter
// each node inside its own Chebyshev cell.
GenericityVerdict genericity_test(const MatrixPolyCurve& curve, double s0, int m,
                                  double tol = kRankTol, std::uint64_t seed = 0);

// z(s) with z(s) phi'(s) = I_n: B = lambda I, C = B phi'(s), lambda =
// |det phi'(s)|^{-1/(2n)}.  OrientationError when det phi'(s) < 0.
CentralizerElement normalizer(const MatrixPolyCurve& curve, double s);

// Sup-norm distance between the central difference of the inverse shift and
// -(phi(s)-phi(s0))^{-1} phi'(s) (phi(s)-phi(s0))^{-1}.
double inverse_derivative_check(const MatrixPolyCurve& curve, double s0, double s, double h);

// Row-major flattening used for affine-rank computations.
Vector flatten(const Matrix& m);
Matrix unflatten(const Vector& v, int n);

}  // namespace danilab
