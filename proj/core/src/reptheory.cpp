#include "danilab/reptheory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/linalg.hpp"
#include "danilab/random.hpp"

namespace danilab {

namespace {

void k_subsets(int m, int k, std::vector<int>& cur, int start, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < m; ++i) {
    cur.push_back(i);
    k_subsets(m, k, cur, i + 1, out);
    cur.pop_back();
  }
}

}  // namespace

Representation::Representation(Kind kind, int n, int k) : kind_(kind), n_(n), k_(k) {
  if (n < 1) throw DomainError("representation block size must be positive");
  const int m = 2 * n;
  if (kind == Kind::exterior) {
    if (k < 1 || k > m) throw DomainError("exterior power degree must lie in [1, 2n]");
    std::vector<int> cur;
    k_subsets(m, k, cur, 0, subsets_);
    for (const auto& S : subsets_) {
      std::string label = "e";
      int p = 0;
      for (std::size_t a = 0; a < S.size(); ++a) {
        label += (a ? "^" : "") + std::to_string(S[a] + 1);
        p += S[a] < n ? 1 : 0;
      }
      labels_.push_back(label);
      weights_.push_back(p - (k - p));
    }
  } else {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        offdiag_.emplace_back(i, j);
        labels_.push_back("E" + std::to_string(i + 1) + "," + std::to_string(j + 1));
        weights_.push_back(i < n && j >= n ? 2 : (j < n && i >= n ? -2 : 0));
      }
    }
    for (int i = 0; i + 1 < m; ++i) {
      labels_.push_back("H" + std::to_string(i + 1));
      weights_.push_back(0);
    }
  }
  dim_ = static_cast<int>(labels_.size());
}

Representation Representation::exterior(int n, int k) { return Representation(Kind::exterior, n, k); }
Representation Representation::adjoint(int n) { return Representation(Kind::adjoint, n, 0); }

Vector Representation::adjoint_coords(const Matrix& X) const {
  const int m = 2 * n_;
  Vector v(dim_);
  std::size_t idx = 0;
  for (const auto& [i, j] : offdiag_) v(static_cast<Eigen::Index>(idx++)) = X(i, j);
  double acc = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    acc += X(i, i);
    v(static_cast<Eigen::Index>(idx++)) = acc;
  }
  return v;
}

Matrix Representation::adjoint_matrix(const Vector& v) const {
  const int m = 2 * n_;
  Matrix X = Matrix::Zero(m, m);
  std::size_t idx = 0;
  for (const auto& [i, j] : offdiag_) X(i, j) = v(static_cast<Eigen::Index>(idx++));
  for (int i = 0; i + 1 < m; ++i) {
    const double c = v(static_cast<Eigen::Index>(idx++));
    X(i, i) += c;
    X(i + 1, i + 1) -= c;
  }
  return X;
}

std::vector<Rational> Representation::adjoint_coords_exact(const RationalMatrix& X) const {
  const auto m = static_cast<std::size_t>(2 * n_);
  std::vector<Rational> v;
  v.reserve(static_cast<std::size_t>(dim_));
  for (const auto& [i, j] : offdiag_) v.push_back(X(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  Rational acc = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    acc += X(i, i);
    v.push_back(acc);
  }
  return v;
}

RationalMatrix Representation::adjoint_matrix_exact(std::size_t index) const {
  const auto m = static_cast<std::size_t>(2 * n_);
  RationalMatrix X(m, m);
  if (index < offdiag_.size()) {
    X(static_cast<std::size_t>(offdiag_[index].first), static_cast<std::size_t>(offdiag_[index].second)) = 1;
  } else {
    const std::size_t i = index - offdiag_.size();
    X(i, i) = 1;
    X(i + 1, i + 1) = -1;
  }
  return X;
}

Matrix Representation::image(const Matrix& g) const {
  const int m = 2 * n_;
  if (g.rows() != m || g.cols() != m) throw DomainError("group element size does not match representation");
  Matrix out(dim_, dim_);
  if (kind_ == Kind::exterior) {
    Matrix minor(k_, k_);
    for (int a = 0; a < dim_; ++a) {
      for (int b = 0; b < dim_; ++b) {
        const auto& S = subsets_[static_cast<std::size_t>(a)];
        const auto& T = subsets_[static_cast<std::size_t>(b)];
        for (int i = 0; i < k_; ++i)
          for (int j = 0; j < k_; ++j) minor(i, j) = g(S[static_cast<std::size_t>(i)], T[static_cast<std::size_t>(j)]);
        out(a, b) = minor.determinant();
      }
    }
    return out;
  }
  const Matrix ginv = checked_inverse(g, "group element");
  for (int b = 0; b < dim_; ++b) {
    out.col(b) = adjoint_coords(g * adjoint_matrix(Vector::Unit(dim_, b)) * ginv);
  }
  return out;
}

RationalMatrix Representation::image(const RationalMatrix& g) const {
  const auto m = static_cast<std::size_t>(2 * n_);
  if (g.rows() != m || g.cols() != m) throw DomainError("group element size does not match representation");
  const auto d = static_cast<std::size_t>(dim_);
  RationalMatrix out(d, d);
  if (kind_ == Kind::exterior) {
    const auto k = static_cast<std::size_t>(k_);
    RationalMatrix minor(k, k);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j)
            minor(i, j) = g(static_cast<std::size_t>(subsets_[a][i]), static_cast<std::size_t>(subsets_[b][j]));
        out(a, b) = determinant(minor);
      }
    }
    return out;
  }
  const RationalMatrix ginv = inverse(g);
  for (std::size_t b = 0; b < d; ++b) {
    const std::vector<Rational> col = adjoint_coords_exact(g * adjoint_matrix_exact(b) * ginv);
    for (std::size_t a = 0; a < d; ++a) out(a, b) = col[a];
  }
  return out;
}

Matrix Representation::derivative(const Matrix& X) const {
  const int m = 2 * n_;
  if (X.rows() != m || X.cols() != m) throw DomainError("Lie algebra element size does not match representation");
  Matrix out = Matrix::Zero(dim_, dim_);
  if (kind_ == Kind::adjoint) {
    for (int b = 0; b < dim_; ++b) {
      const Matrix Y = adjoint_matrix(Vector::Unit(dim_, b));
      out.col(b) = adjoint_coords(X * Y - Y * X);
    }
    return out;
  }
  std::map<std::vector<int>, int> index;
  for (int a = 0; a < dim_; ++a) index[subsets_[static_cast<std::size_t>(a)]] = a;
  // X acts on e_T as a derivation: replace one factor e_t by X e_t.
  for (int b = 0; b < dim_; ++b) {
    const auto& T = subsets_[static_cast<std::size_t>(b)];
    for (int t : T) {
      for (int i = 0; i < m; ++i) {
        const double x = X(i, t);
        if (x == 0.0) continue;
        if (i != t && std::find(T.begin(), T.end(), i) != T.end()) continue;
        std::vector<int> S;
        int between = 0;
        for (int u : T) {
          if (u == t) continue;
          S.push_back(u);
          if ((u > std::min(i, t)) && (u < std::max(i, t))) ++between;
        }
        S.push_back(i);
        std::sort(S.begin(), S.end());
        out(index.at(S), b) += (between % 2 ? -1.0 : 1.0) * x;
      }
    }
  }
  return out;
}

Matrix rep_image(const Representation& rep, const GroupElement& g) {
  if (g.n() != rep.n()) throw DomainError("group element block size does not match representation");
  return rep.image(g.matrix());
}

WeightDecomposition weight_split(const Representation& rep) {
  WeightDecomposition d;
  for (int i = 0; i < rep.dim(); ++i) {
    const int w = rep.weights()[static_cast<std::size_t>(i)];
    (w > 0 ? d.plus_idx : (w == 0 ? d.zero_idx : d.minus_idx)).push_back(i);
  }
  return d;
}

namespace {

const std::vector<int>& part_indices(const WeightDecomposition& d, Part part) {
  switch (part) {
    case Part::plus: return d.plus_idx;
    case Part::zero: return d.zero_idx;
    case Part::minus: return d.minus_idx;
  }
  return d.zero_idx;
}

std::vector<int> zero_minus(const WeightDecomposition& d) {
  std::vector<int> idx = d.zero_idx;
  idx.insert(idx.end(), d.minus_idx.begin(), d.minus_idx.end());
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix submatrix(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(rows[i], cols[j]);
  return out;
}

}  // namespace

Vector project(const WeightDecomposition& decomp, Part part, const Vector& v) {
  Vector out = Vector::Zero(v.size());
  for (int i : part_indices(decomp, part)) {
    if (i >= v.size()) throw DomainError("vector is shorter than the representation");
    out(i) = v(i);
  }
  return out;
}

Matrix constrained_subspace(const Representation& rep, const Sl2Copy& copy, double r) {
  if (r == 0.0) throw DomainError("r must be nonzero");
  if (copy.n() != rep.n()) throw DomainError("SL(2) copy block size does not match representation");
  const WeightDecomposition d = weight_split(rep);
  const std::vector<int> cols = zero_minus(d);
  const Matrix rho = rep.image(u_embed(r * copy.phi()).matrix());
  const Matrix constraint = submatrix(rho, d.plus_idx, cols);
  const Matrix kernel = null_space(constraint);
  Matrix out = Matrix::Zero(rep.dim(), kernel.cols());
  for (std::size_t i = 0; i < cols.size(); ++i) out.row(cols[i]) = kernel.row(static_cast<Eigen::Index>(i));
  return out;
}

double verify_q0_transport(const Representation& rep, const Sl2Copy& copy, double r,
                           const Vector& v, double tol) {
  if (v.size() != rep.dim()) throw DomainError("vector length does not match representation");
  const WeightDecomposition d = weight_split(rep);
  const double scale = std::max(1.0, sup_norm(v));
  const Vector image = rep.image(u_embed(r * copy.phi()).matrix()) * v;
  const double before = sup_norm(Vector(project(d, Part::plus, v)));
  const double after = sup_norm(Vector(project(d, Part::plus, image)));
  if (before > tol * scale || after > tol * scale) {
    throw HypothesisViolation("v and rho(u(r Phi)) v must both lie in V0 + V-", std::max(before, after));
  }
  const Matrix rho_e = rep.image(sl2_image(copy, weyl_element()).matrix());
  return sup_norm(Vector(project(d, Part::zero, image) - rho_e * project(d, Part::zero, v)));
}

double verify_qplus_nonvanish(const Representation& rep, const Sl2Copy& copy, double r,
                              const Vector& v, double tol) {
  if (v.size() != rep.dim()) throw DomainError("vector length does not match representation");
  if (r == 0.0) throw DomainError("r must be nonzero");
  const WeightDecomposition d = weight_split(rep);
  const double norm = sup_norm(v);
  if (norm == 0.0) throw DomainError("v must be nonzero");
  if (sup_norm(Vector(v - project(d, Part::minus, v))) > tol * std::max(1.0, norm)) {
    throw DomainError("v must lie in V-");
  }
  const Vector image = rep.image(u_embed(r * copy.phi()).matrix()) * v;
  return sup_norm(Vector(project(d, Part::plus, image)));
}

Matrix obstruction_subspace(const Representation& rep, const MatrixPolyCurve& curve,
                            const std::vector<double>& samples, double tol) {
  if (samples.empty()) throw DomainError("obstruction_subspace needs at least one sample");
  if (curve.n() != rep.n()) throw DomainError("curve size does not match representation");
  const WeightDecomposition d = weight_split(rep);
  const auto rows_per = static_cast<Eigen::Index>(d.plus_idx.size());
  Matrix constraints(rows_per * static_cast<Eigen::Index>(samples.size()), rep.dim());
  std::vector<int> all(static_cast<std::size_t>(rep.dim()));
  for (int i = 0; i < rep.dim(); ++i) all[static_cast<std::size_t>(i)] = i;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Matrix rho = rep.image(u_embed(curve.eval(samples[j])).matrix());
    constraints.middleRows(static_cast<Eigen::Index>(j) * rows_per, rows_per) = submatrix(rho, d.plus_idx, all);
  }
  if (constraints.rows() == 0) return Matrix::Identity(rep.dim(), rep.dim());
  return null_space(constraints, tol);
}

RationalMatrix obstruction_subspace(const Representation& rep, const RationalPolyCurve& curve,
                                    const std::vector<Rational>& samples) {
  if (samples.empty()) throw DomainError("obstruction_subspace needs at least one sample");
  if (curve.n() != rep.n()) throw DomainError("curve size does not match representation");
  const WeightDecomposition d = weight_split(rep);
  const auto dim = static_cast<std::size_t>(rep.dim());
  const std::size_t rows_per = d.plus_idx.size();
  if (rows_per == 0) return RationalMatrix::identity(dim);
  RationalMatrix constraints(rows_per * samples.size(), dim);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const RationalMatrix rho = rep.image(exact::u_embed(curve.eval(samples[j])));
    for (std::size_t a = 0; a < rows_per; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        constraints(j * rows_per + a, b) = rho(static_cast<std::size_t>(d.plus_idx[a]), b);
  }
  return null_space(constraints);
}

InvarianceResult invariance_subspace(const Representation& rep, const WeightDecomposition& decomp,
                                     const Vector& w0, double tol) {
  if (w0.size() != rep.dim()) throw DomainError("w0 length does not match representation");
  const double scale = std::max(1.0, sup_norm(w0));
  if (sup_norm(Vector(w0 - project(decomp, Part::zero, w0))) > tol * scale) {
    throw DomainError("w0 must lie in V0");
  }
  const int n = rep.n();
  // Column a*n+b is d rho applied to the upper-right elementary matrix E_ab.
  Matrix lin(rep.dim(), n * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Matrix X = Matrix::Zero(2 * n, 2 * n);
      X(a, n + b) = 1.0;
      lin.col(a * n + b) = rep.derivative(X) * w0;
    }
  }
  const Matrix kernel = null_space(lin, tol);

  InvarianceResult out;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) out.basis.push_back(unflatten(kernel.col(c), n));

  constexpr int kChecks = 8;
  constexpr std::uint64_t kSeed = 0x1d5eedULL;
  for (int trial = 0; trial < kChecks; ++trial) {
    Matrix phi = Matrix::Zero(n, n);
    for (std::size_t c = 0; c < out.basis.size(); ++c) {
      const double coef = 3.0 * counter_normal(kSeed, static_cast<std::uint64_t>(trial), c);
      phi += coef * out.basis[c];
    }
    const Vector moved = rep.image(u_embed(phi).matrix()) * w0;
    out.max_residual = std::max(out.max_residual, sup_norm(Vector(moved - w0)));
  }
  out.verified = out.max_residual <= 1e-8 * scale;
  return out;
}

namespace {

// Length of {tau in [0,1] : |y0 + (y1 - y0) tau| < r}.
double cell_sublevel(double y0, double y1, double r) {
  const double d = y1 - y0;
  if (d == 0.0) return std::abs(y0) < r ? 1.0 : 0.0;
  double lo = (-r - y0) / d;
  double hi = (r - y0) / d;
  if (lo > hi) std::swap(lo, hi);
  return std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.0));
}

}  // namespace

double good_constants_estimate(const std::vector<double>& xi_samples, double alpha) {
  if (xi_samples.size() < 1024) throw DomainError("good_constants_estimate needs at least 1024 samples");
  if (!(alpha > 0)) throw DomainError("alpha must be positive");
  if (std::all_of(xi_samples.begin(), xi_samples.end(), [](double x) { return x == 0.0; })) {
    throw DegenerateInputError("xi vanishes at every sample");
  }
  constexpr int kMinCells = 4;
  constexpr int kRSteps = 96;
  const std::size_t cells = xi_samples.size() - 1;

  double best = 0.0;
  for (std::size_t pieces = 1; cells / pieces >= kMinCells; pieces *= 2) {
    for (std::size_t piece = 0; piece < pieces; ++piece) {
      const std::size_t c0 = piece * cells / pieces;
      const std::size_t c1 = (piece + 1) * cells / pieces;
      double sup = 0.0;
      for (std::size_t i = c0; i <= c1; ++i) sup = std::max(sup, std::abs(xi_samples[i]));
      if (sup == 0.0) continue;
      // Just above sup the sublevel set is all of J' and the ratio is 1.
      best = std::max(best, 1.0);
      for (int j = 0; j <= kRSteps; ++j) {
        const double r = sup * std::pow(10.0, -j / 16.0);
        double measure = 0.0;
        for (std::size_t c = c0; c < c1; ++c) measure += cell_sublevel(xi_samples[c], xi_samples[c + 1], r);
        const double frac = measure / static_cast<double>(c1 - c0);
        best = std::max(best, frac * std::pow(sup / r, alpha));
      }
    }
  }
  return best;
}

}  // namespace danilab
