#include "danilab/flow.hpp"

#include <cmath>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/linalg.hpp"

namespace danilab {

GroupElement GroupElement::from_matrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
    throw InvariantError("group element must be 2n x 2n");
  }
  const double det = m.determinant();
  if (std::abs(det - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "group element must have determinant 1, got " << det;
    throw InvariantError(msg.str());
  }
  return GroupElement(std::move(m));
}

GroupElement GroupElement::unchecked(Matrix m) { return GroupElement(std::move(m)); }

GroupElement GroupElement::identity(int n) { return GroupElement(Matrix::Identity(2 * n, 2 * n)); }

GroupElement GroupElement::inverse() const {
  return GroupElement(checked_inverse(m_, "group element"));
}

GroupElement u_embed(const Matrix& phi, Side side) {
  if (phi.rows() != phi.cols()) throw DomainError("u_embed needs a square matrix");
  const Eigen::Index n = phi.rows();
  Matrix g = Matrix::Identity(2 * n, 2 * n);
  if (side == Side::upper) {
    g.topRightCorner(n, n) = phi;
  } else {
    g.bottomLeftCorner(n, n) = phi;
  }
  return GroupElement::unchecked(std::move(g));
}

GroupElement a_diag(double t, int n) {
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n).diagonal().setConstant(std::exp(t));
  g.bottomRightCorner(n, n).diagonal().setConstant(std::exp(-t));
  return GroupElement::unchecked(std::move(g));
}

GroupElement z_embed(const CentralizerElement& z) {
  const int n = z.n();
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  g.topLeftCorner(n, n) = z.B();
  g.bottomRightCorner(n, n) = z.C();
  return GroupElement::unchecked(std::move(g));
}

LatticeBasis orbit_point(const MatrixPolyCurve& curve, double s, double t,
                         const LatticeBasis& basepoint, bool normalize) {
  const int n = curve.n();
  if (basepoint.m() != 2 * n) throw DomainError("basepoint dimension must be 2n");
  GroupElement g = u_embed(curve.eval(s));
  if (normalize) g = z_embed(normalizer(curve, s)) * g;
  g = a_diag(t, n) * g;
  return LatticeBasis::unchecked(g.matrix() * basepoint.cols());
}

Vector dani_vector(const Matrix& phi, const IntVector& p, const IntVector& q, std::int64_t N) {
  if (N < 1) throw DomainError("N must be a positive integer");
  const Eigen::Index n = phi.rows();
  if (p.size() != n || q.size() != n) throw DomainError("p and q must have length n");
  const double scale = static_cast<double>(N);
  Vector out(2 * n);
  out.head(n) = scale * (phi * p.cast<double>() - q.cast<double>());
  out.tail(n) = p.cast<double>() / scale;
  return out;
}

Sl2Copy::Sl2Copy(Matrix phi) : phi_(std::move(phi)) {
  if (phi_.rows() != phi_.cols()) throw DomainError("SL(2) copy needs a square matrix");
  phi_inv_ = checked_inverse(phi_, "Phi for the SL(2) copy");
  const Eigen::Index n = phi_.rows();
  if (sup_norm(Matrix(phi_ * phi_inv_ - Matrix::Identity(n, n))) > 1e-10) {
    throw InvariantError("Phi is too ill-conditioned for the SL(2) copy");
  }
}

GroupElement sl2_image(const Sl2Copy& copy, const Eigen::Matrix2d& M) {
  if (std::abs(M.determinant() - 1.0) > 1e-10) {
    throw InvariantError("SL(2) element must have determinant 1");
  }
  const int n = copy.n();
  Matrix g(2 * n, 2 * n);
  g.topLeftCorner(n, n) = M(0, 0) * Matrix::Identity(n, n);
  g.topRightCorner(n, n) = M(0, 1) * copy.phi();
  g.bottomLeftCorner(n, n) = M(1, 0) * copy.phi_inv();
  g.bottomRightCorner(n, n) = M(1, 1) * Matrix::Identity(n, n);
  return GroupElement::unchecked(std::move(g));
}

Eigen::Matrix2d weyl_element() {
  Eigen::Matrix2d e;
  e << 0, 1, -1, 0;
  return e;
}

Matrix conj_by_E(const Matrix& phi, const CentralizerElement& z0, const Matrix& D) {
  const Sl2Copy copy(phi);
  const int n = copy.n();
  if (z0.n() != n || D.rows() != n || D.cols() != n) throw DomainError("conj_by_E size mismatch");
  const GroupElement e = sl2_image(copy, weyl_element());
  const GroupElement z = z_embed(z0);
  const GroupElement g = e.inverse() * z * u_embed(D) * z.inverse() * e;
  const Matrix& m = g.matrix();

  const Matrix id = Matrix::Identity(n, n);
  const double upper = sup_norm(Matrix(m.topRightCorner(n, n)));
  const double diag = std::max(sup_norm(Matrix(m.topLeftCorner(n, n) - id)),
                               sup_norm(Matrix(m.bottomRightCorner(n, n) - id)));
  if (upper > 1e-9 || diag > 1e-9) {
    std::ostringstream msg;
    msg << "E-conjugate is not lower unipotent (upper block " << upper << ", diagonal " << diag
        << ")";
    throw InternalIdentityError(msg.str());
  }
  return m.bottomLeftCorner(n, n);
}

namespace exact {

RationalMatrix u_embed(const RationalMatrix& phi) {
  const std::size_t n = phi.rows();
  RationalMatrix g = RationalMatrix::identity(2 * n);
  g.set_block(0, n, phi);
  return g;
}

RationalMatrix a_scale(std::int64_t N, std::size_t n) {
  if (N < 1) throw DomainError("N must be a positive integer");
  RationalMatrix g(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    g(i, i) = Rational(N);
    g(n + i, n + i) = Rational(1, N);
  }
  return g;
}

RationalMatrix dani_lattice(const RationalMatrix& phi, std::int64_t N) {
  return a_scale(N, phi.rows()) * u_embed(phi);
}

}  // namespace exact

}  // namespace danilab
