#include "danilab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/linalg.hpp"
#include "danilab/random.hpp"

namespace danilab {

MatrixPolyCurve::MatrixPolyCurve(std::vector<Matrix> coeffs, double a, double b)
    : n_(0), coeffs_(std::move(coeffs)), a_(a), b_(b) {
  if (coeffs_.empty()) throw InvariantError("curve needs at least one coefficient matrix");
  n_ = static_cast<int>(coeffs_.front().rows());
  if (n_ <= 0) throw InvariantError("curve matrices must be at least 1 x 1");
  for (const auto& c : coeffs_) {
    if (c.rows() != n_ || c.cols() != n_) {
      throw InvariantError("every coefficient matrix must be n x n");
    }
  }
  if (!(b_ - a_ > 0)) throw InvariantError("curve interval must satisfy a < b");
}

void MatrixPolyCurve::check_domain(double s) const {
  if (!(s >= a_ && s <= b_)) {
    std::ostringstream msg;
    msg << "s = " << s << " lies outside [" << a_ << ", " << b_ << "]";
    throw DomainError(msg.str());
  }
}

Matrix MatrixPolyCurve::eval_unchecked(double s) const {
  Matrix acc = coeffs_.back();
  for (int k = degree() - 1; k >= 0; --k) acc = acc * s + coeffs_[k];
  return acc;
}

Matrix MatrixPolyCurve::eval(double s) const {
  check_domain(s);
  return eval_unchecked(s);
}

Matrix MatrixPolyCurve::derivative(double s) const {
  check_domain(s);
  if (degree() == 0) return Matrix::Zero(n_, n_);
  Matrix acc = coeffs_.back() * static_cast<double>(degree());
  for (int k = degree() - 1; k >= 1; --k) acc = acc * s + coeffs_[k] * static_cast<double>(k);
  return acc;
}

RationalPolyCurve::RationalPolyCurve(std::vector<RationalMatrix> coeffs, Rational a, Rational b)
    : n_(0), coeffs_(std::move(coeffs)), a_(std::move(a)), b_(std::move(b)) {
  if (coeffs_.empty()) throw InvariantError("curve needs at least one coefficient matrix");
  n_ = static_cast<int>(coeffs_.front().rows());
  for (const auto& c : coeffs_) {
    if (static_cast<int>(c.rows()) != n_ || static_cast<int>(c.cols()) != n_) {
      throw InvariantError("every coefficient matrix must be n x n");
    }
  }
  if (!(b_ > a_)) throw InvariantError("curve interval must satisfy a < b");
}

RationalMatrix RationalPolyCurve::eval(const Rational& s) const {
  if (s < a_ || s > b_) throw DomainError("s = " + to_string(s) + " lies outside the curve interval");
  RationalMatrix acc = coeffs_.back();
  for (int k = static_cast<int>(coeffs_.size()) - 2; k >= 0; --k) acc = s * acc + coeffs_[k];
  return acc;
}

MatrixPolyCurve RationalPolyCurve::to_double() const {
  std::vector<Matrix> c;
  for (const auto& m : coeffs_) c.push_back(m.to_double());
  return MatrixPolyCurve(std::move(c), danilab::to_double(a_), danilab::to_double(b_));
}

CentralizerElement::CentralizerElement(Matrix B, Matrix C) : B_(std::move(B)), C_(std::move(C)) {
  if (B_.rows() != B_.cols() || C_.rows() != C_.cols() || B_.rows() != C_.rows()) {
    throw InvariantError("centralizer blocks must be square of equal size");
  }
  const double prod = B_.determinant() * C_.determinant();
  if (std::abs(prod - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "centralizer element needs det(B) det(C) = 1, got " << prod;
    throw InvariantError(msg.str());
  }
}

CentralizerElement CentralizerElement::identity(int n) {
  return CentralizerElement(Matrix::Identity(n, n), Matrix::Identity(n, n));
}

Matrix CentralizerElement::act(const Matrix& phi) const {
  return B_ * phi * checked_inverse(C_, "centralizer C block");
}

Matrix inverse_shift(const MatrixPolyCurve& curve, double s0, double s) {
  const Matrix diff = curve.eval(s) - curve.eval(s0);
  return checked_inverse(diff, "phi(s) - phi(s0)");
}

Vector flatten(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

Matrix unflatten(const Vector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) throw DomainError("vector length is not n^2");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

AffineRank affine_rank(const std::vector<Vector>& points, double tol) {
  if (points.empty()) throw DomainError("affine_rank needs at least one point");
  const Eigen::Index dim = points.front().size();
  Matrix diffs(dim, static_cast<Eigen::Index>(points.size()) - 1);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != dim) throw DomainError("affine_rank points differ in dimension");
    diffs.col(static_cast<Eigen::Index>(i) - 1) = points[i] - points.front();
  }
  AffineRank out;
  const SpanResult span = column_span(diffs, tol);
  out.rank = span.rank;
  for (int k = 0; k < span.rank; ++k) out.basis.emplace_back(span.basis.col(k));
  return out;
}

namespace {

// m nodes on [lo, hi], never equal to s0.  Chebyshev points of the first
// kind; a nonzero seed jitters each node's angle within its own cell.
std::vector<double> punctured_nodes(double lo, double hi, double s0, int m, std::uint64_t seed) {
  std::vector<double> nodes;
  const double guard = 1e-9 * (hi - lo);
  for (int count = m; static_cast<int>(nodes.size()) < m; ++count) {
    nodes.clear();
    for (int j = 0; j < count; ++j) {
      double jitter = 0.0;
      if (seed != 0) jitter = counter_uniform(seed, static_cast<std::uint64_t>(j)) - 0.5;
      const double angle = (2.0 * j + 1.0 + jitter) * std::numbers::pi / (2.0 * count);
      const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(angle);
      if (std::abs(s - s0) > guard) nodes.push_back(s);
    }
  }
  nodes.resize(static_cast<std::size_t>(m));
  return nodes;
}

double abs_det_shift(const MatrixPolyCurve& curve, const Matrix& phi0, double s) {
  return std::abs((curve.eval(s) - phi0).determinant());
}

}  // namespace

GenericityVerdict genericity_test(const MatrixPolyCurve& curve, double s0, int m, double tol,
                                  std::uint64_t seed) {
  const int n = curve.n();
  if (m < n * n + 1) throw DomainError("genericity_test needs m >= n^2 + 1 samples");
  const Matrix phi0 = curve.eval(s0);

  // Halve the radius until every sampled node has an invertible shift.
  double radius = std::max(s0 - curve.a(), curve.b() - s0);
  std::vector<double> nodes;
  bool found = false;
  for (int iter = 0; iter < 60 && !found; ++iter, radius *= 0.5) {
    const double lo = std::max(curve.a(), s0 - radius);
    const double hi = std::min(curve.b(), s0 + radius);
    if (!(hi - lo > 1e-12 * std::max(1.0, std::abs(s0)))) break;
    nodes = punctured_nodes(lo, hi, s0, m, seed);
    found = std::all_of(nodes.begin(), nodes.end(),
                        [&](double s) { return abs_det_shift(curve, phi0, s) > kInvertTol; });
    if (found) break;
  }
  if (!found) {
    throw DegenerateInputError(
        "no punctured neighbourhood of s0 on which phi(s) - phi(s0) is invertible");
  }

  std::vector<Vector> points;
  points.reserve(nodes.size());
  for (double s : nodes) points.push_back(flatten(inverse_shift(curve, s0, s)));

  const AffineRank ar = affine_rank(points, tol);
  GenericityVerdict out;
  out.affine_rank = ar.rank;
  out.samples_used = static_cast<int>(nodes.size());
  out.radius = radius;
  out.verdict = ar.rank == n * n ? Verdict::generic : Verdict::degenerate;
  if (out.verdict == Verdict::degenerate) out.witness_subspace = ar.basis;
  return out;
}

CentralizerElement normalizer(const MatrixPolyCurve& curve, double s) {
  const Matrix d = curve.derivative(s);
  const double det = d.determinant();
  if (!(std::abs(det) > kInvertTol)) {
    throw SingularityError("phi'(s) is singular", std::abs(det));
  }
  if (det < 0) {
    throw OrientationError(
        "det phi'(s) < 0: no element diag(B, C) with det B det C = 1 maps phi'(s) to I_n");
  }
  const int n = curve.n();
  const double lambda = std::pow(det, -1.0 / (2.0 * n));
  Matrix B = lambda * Matrix::Identity(n, n);
  Matrix C = B * d;
  return CentralizerElement(std::move(B), std::move(C));
}

double inverse_derivative_check(const MatrixPolyCurve& curve, double s0, double s, double h) {
  if (!(h > 0)) throw DomainError("finite-difference step must be positive");
  const Matrix phi0 = curve.eval(s0);
  auto inv_at = [&](double sigma) {
    return checked_inverse(curve.eval_unchecked(sigma) - phi0, "phi(sigma) - phi(s0) in stencil");
  };
  const Matrix fd = (inv_at(s + h) - inv_at(s - h)) / (2.0 * h);
  const Matrix f = inv_at(s);
  const Matrix analytic = -f * curve.derivative(s) * f;
  return sup_norm(Matrix(fd - analytic));
}

}  // namespace danilab
