#include "danilab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "danilab/errors.hpp"

namespace danilab {

namespace {

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& a, unsigned options) {
  return Eigen::JacobiSVD<Matrix>(a, options);
}

int numeric_rank(const Vector& sigma, double tol) {
  if (sigma.size() == 0) return 0;
  const double cut = tol * std::max(1.0, sigma(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cut) ++r;
  return r;
}

}  // namespace

SpanResult column_span(const Matrix& a, double tol) {
  SpanResult out;
  if (a.size() == 0) {
    out.basis = Matrix(a.rows(), 0);
    return out;
  }
  auto svd = svd_of(a, Eigen::ComputeThinU);
  out.rank = numeric_rank(svd.singularValues(), tol);
  out.basis = svd.matrixU().leftCols(out.rank);
  return out;
}

Matrix null_space(const Matrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  auto svd = svd_of(a, Eigen::ComputeFullV);
  const int r = numeric_rank(svd.singularValues(), tol);
  return svd.matrixV().rightCols(n - r);
}

double sup_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double sup_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Matrix checked_inverse(const Matrix& m, const char* what) {
  Eigen::FullPivLU<Matrix> lu(m);
  const double det = std::abs(lu.determinant());
  if (!(det > kInvertTol)) {
    throw SingularityError(std::string(what) + ": |det| = " + std::to_string(det) +
                               " is below the inversion threshold",
                           det);
  }
  return lu.inverse();
}

}  // namespace danilab
