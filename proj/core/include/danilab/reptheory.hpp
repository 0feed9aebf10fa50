#pragma once

// Exterior powers of the standard representation and the adjoint
// representation of SL(2n, R), their a_t-weight gradings, and the linear
// algebra around the SL(2) copy: constrained vectors, q0 transport by E,
// obstruction and invariance subspaces, and (C, alpha)-good estimates.

#include <string>
#include <vector>

#include "danilab/curve.hpp"
#include "danilab/exact.hpp"
#include "danilab/flow.hpp"
#include "danilab/types.hpp"

namespace danilab {

class Representation {
 public:
  enum class Kind { exterior, adjoint };

  // k-th exterior power of R^{2n}, basis e_S over k-subsets S in
  // lexicographic order.
  static Representation exterior(int n, int k);
  // sl(2n) with basis E_ij (i != j, row-major) followed by
  // H_i = E_ii - E_{i+1,i+1}.
  static Representation adjoint(int n);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  // a_t acts on basis vector i by e^{weight(i) t}.
  const std::vector<int>& weights() const { return weights_; }

  Matrix image(const Matrix& g) const;
  RationalMatrix image(const RationalMatrix& g) const;
  // Derivative action d rho(X) for X in gl(2n); for the adjoint
  // representation X must be trace free.
  Matrix derivative(const Matrix& X) const;

  // Coordinates of a trace-zero matrix in the adjoint basis and back.
  Vector adjoint_coords(const Matrix& X) const;
  Matrix adjoint_matrix(const Vector& v) const;

 private:
  Representation(Kind kind, int n, int k);

  std::vector<Rational> adjoint_coords_exact(const RationalMatrix& X) const;
  RationalMatrix adjoint_matrix_exact(std::size_t index) const;

  Kind kind_;
  int n_;
  int k_;
  int dim_ = 0;
  std::vector<std::string> labels_;
  std::vector<int> weights_;
  std::vector<std::vector<int>> subsets_;
  std::vector<std::pair<int, int>> offdiag_;
};

Matrix rep_image(const Representation& rep, const GroupElement& g);

struct WeightDecomposition {
  std::vector<int> plus_idx;
  std::vector<int> zero_idx;
  std::vector<int> minus_idx;
};

enum class Part { plus, zero, minus };

WeightDecomposition weight_split(const Representation& rep);
Vector project(const WeightDecomposition& decomp, Part part, const Vector& v);

// Orthonormal basis (columns) of {v in V0 + V- : rho(u(r Phi)) v in V0 + V-}.
Matrix constrained_subspace(const Representation& rep, const Sl2Copy& copy, double r);

// ||q0(rho(u(r Phi)) v) - rho(E(Phi)) q0(v)||_inf.  HypothesisViolation
// when v or rho(u(r Phi)) v has a V+ component above tol * max(1, ||v||).
double verify_q0_transport(const Representation& rep, const Sl2Copy& copy, double r,
                           const Vector& v, double tol = 1e-9);

// ||q+(rho(u(r Phi)) v)||_inf for nonzero v in V-.
double verify_qplus_nonvanish(const Representation& rep, const Sl2Copy& copy, double r,
                              const Vector& v, double tol = 1e-9);

// Orthonormal basis of the v with q+(rho(u(phi(s_j))) v) = 0 for every j.
Matrix obstruction_subspace(const Representation& rep, const MatrixPolyCurve& curve,
                            const std::vector<double>& samples, double tol = kRankTol);
// Exact version; the basis comes from the reduced row echelon form and is
// not orthonormalised.
RationalMatrix obstruction_subspace(const Representation& rep, const RationalPolyCurve& curve,
                                    const std::vector<Rational>& samples);

struct InvarianceResult {
  // Basis of {Phi : d rho(u-direction Phi) w0 = 0}, orthonormal in the
  // Frobenius inner product.
  std::vector<Matrix> basis;
  // Whether rho(u(Phi)) w0 = w0 held for the sampled Phi in the span.
  bool verified = false;
  double max_residual = 0.0;
};

// DomainError unless w0 lies in V0.
InvarianceResult invariance_subspace(const Representation& rep, const WeightDecomposition& decomp,
                                     const Vector& w0, double tol = kRankTol);

// Largest C(J', r) = (|{|xi| < r} cap J'| / |J'|) (sup_J' |xi| / r)^alpha over
// dyadic subintervals J' and a log-spaced r grid, using the piecewise-linear
// interpolant of uniformly spaced samples.
double good_constants_estimate(const std::vector<double>& xi_samples, double alpha);

}  // namespace danilab
