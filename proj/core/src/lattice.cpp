#include "danilab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/linalg.hpp"

namespace danilab {

LatticeBasis LatticeBasis::from_matrix(Matrix cols) {
  if (cols.rows() != cols.cols() || cols.rows() == 0) {
    throw InvariantError("lattice basis must be a nonempty square matrix");
  }
  const double det = cols.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "lattice basis is not unimodular: |det| = " << std::abs(det);
    throw InvariantError(msg.str());
  }
  return LatticeBasis(std::move(cols));
}

LatticeBasis LatticeBasis::unchecked(Matrix cols) { return LatticeBasis(std::move(cols)); }

LatticeBasis LatticeBasis::identity(int m) { return LatticeBasis(Matrix::Identity(m, m)); }

namespace {

void check_size(int m) {
  if (m > kMaxLatticeDim) {
    throw UnsupportedSizeError("lattice dimension " + std::to_string(m) + " exceeds " +
                               std::to_string(kMaxLatticeDim));
  }
}

struct GramSchmidt {
  Matrix mu;
  Vector norms2;
};

GramSchmidt gram_schmidt(const Matrix& b) {
  const Eigen::Index m = b.cols();
  GramSchmidt gs{Matrix::Zero(m, m), Vector::Zero(m)};
  Matrix star = b;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      gs.mu(i, j) = b.col(i).dot(star.col(j)) / gs.norms2(j);
      star.col(i) -= gs.mu(i, j) * star.col(j);
    }
    gs.norms2(i) = star.col(i).squaredNorm();
  }
  return gs;
}

}  // namespace

ReduceResult reduce(const LatticeBasis& basis) {
  constexpr double delta = 0.99;
  const Eigen::Index m = basis.m();
  Matrix b = basis.cols();
  IntMatrix u = IntMatrix::Identity(m, m);

  Eigen::Index k = 1;
  int guard = 0;
  while (k < m) {
    if (++guard > 100000) throw InternalIdentityError("LLL failed to terminate");
    GramSchmidt gs = gram_schmidt(b);
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(gs.mu(k, j));
      if (q != 0.0) {
        b.col(k) -= q * b.col(j);
        u.col(k) -= static_cast<std::int64_t>(q) * u.col(j);
        gs = gram_schmidt(b);
      }
    }
    const double lhs = gs.norms2(k);
    const double rhs = (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.norms2(k - 1);
    if (lhs >= rhs) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      u.col(k).swap(u.col(k - 1));
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  // Recompute from the integer transform so the reduced basis carries no
  // accumulated rounding from the column operations.
  Matrix exact_b = basis.cols() * u.cast<double>();
  return ReduceResult{LatticeBasis::unchecked(std::move(exact_b)), std::move(u)};
}

namespace {

// Depth-first enumeration of integer coefficient vectors c of the reduced
// basis with |c_i| <= box_i and ||R c||_2 <= radius, highest index first.
// visit(c) may shrink box and radius through the references it captures.
class Enumerator {
 public:
  Enumerator(Matrix r, Vector& box, double& radius,
             std::function<void(const IntVector&)> visit)
      : r_(std::move(r)), box_(box), radius_(radius), visit_(std::move(visit)),
        c_(IntVector::Zero(r_.cols())) {}

  void run() { descend(static_cast<int>(r_.cols()) - 1, 0.0); }

 private:
  void descend(int level, double partial) {
    double center = 0.0;
    for (Eigen::Index j = level + 1; j < r_.cols(); ++j) center += r_(level, j) * static_cast<double>(c_(j));
    const double diag = r_(level, level);
    const double rem2 = radius_ * radius_ - partial;
    if (rem2 < 0) return;
    const double rem = std::sqrt(rem2);
    double lo = (-rem - center) / diag;
    double hi = (rem - center) / diag;
    if (lo > hi) std::swap(lo, hi);
    const double b = std::floor(box_(level));
    const auto first = static_cast<std::int64_t>(std::max(std::ceil(lo - 1e-9), -b));
    const auto last = static_cast<std::int64_t>(std::min(std::floor(hi + 1e-9), b));
    for (std::int64_t x = first; x <= last; ++x) {
      c_(level) = x;
      const double y = center + diag * static_cast<double>(x);
      const double next = partial + y * y;
      if (next > radius_ * radius_ * (1 + 1e-9) + 1e-300) continue;
      if (level == 0) {
        visit_(c_);
      } else {
        descend(level - 1, next);
      }
    }
    c_(level) = 0;
  }

  Matrix r_;
  Vector& box_;
  double& radius_;
  std::function<void(const IntVector&)> visit_;
  IntVector c_;
};

Matrix r_factor(const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.matrixQR().triangularView<Eigen::Upper>();
}

// Normalise sign so the first nonzero coefficient is positive.
bool canonicalize(IntVector& c) {
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (c(i) > 0) return true;
    if (c(i) < 0) {
      c = -c;
      return true;
    }
  }
  return false;
}

bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

ShortVectorResult shortest_supnorm(const LatticeBasis& basis) {
  const int m = basis.m();
  check_size(m);
  const ReduceResult red = reduce(basis);
  const Matrix& b = red.basis.cols();
  const Matrix binv = checked_inverse(b, "reduced lattice basis");
  const Vector row_l1 = binv.cwiseAbs().rowwise().sum();

  ShortVectorResult best;
  best.length = std::numeric_limits<double>::infinity();
  auto consider = [&](const IntVector& reduced_coeffs) {
    IntVector coeffs = red.transform * reduced_coeffs;
    if (!canonicalize(coeffs)) return;
    const Vector v = basis.cols() * coeffs.cast<double>();
    const double len = sup_norm(v);
    if (!std::isfinite(best.length) || len < best.length * (1 - 1e-12) ||
        (len <= best.length * (1 + 1e-12) && lex_less(coeffs, best.coeffs))) {
      best.length = len;
      best.vector = v;
      best.coeffs = coeffs;
    }
  };
  for (int i = 0; i < m; ++i) consider(IntVector::Unit(m, i));

  const double slack = 1 + 1e-9;
  Vector box = row_l1 * best.length * slack;
  double radius = std::sqrt(static_cast<double>(m)) * best.length * slack;
  Enumerator en(r_factor(b), box, radius, [&](const IntVector& c) {
    if (c.isZero()) return;
    const double before = best.length;
    consider(c);
    if (best.length < before) {
      box = row_l1 * best.length * slack;
      radius = std::sqrt(static_cast<double>(m)) * best.length * slack;
    }
  });
  en.run();
  return best;
}

std::int64_t count_in_box(const LatticeBasis& basis, const Vector& halfwidths) {
  const int m = basis.m();
  check_size(m);
  if (halfwidths.size() != m) throw DomainError("halfwidths length must equal the lattice dimension");
  if ((halfwidths.array() <= 0).any()) throw DomainError("halfwidths must be positive");
  const ReduceResult red = reduce(basis);
  const Matrix& b = red.basis.cols();
  const Matrix binv = checked_inverse(b, "reduced lattice basis");
  Vector box = binv.cwiseAbs() * halfwidths * (1 + 1e-9);
  double radius = halfwidths.norm() * (1 + 1e-9);
  // Boundary points are kept when they miss the box by rounding only.
  const Vector limit = halfwidths.array() + 1e-12 * halfwidths.array().max(1.0);

  std::int64_t count = 0;
  Enumerator en(r_factor(b), box, radius, [&](const IntVector& c) {
    if (c.isZero()) return;
    const Vector v = basis.cols() * (red.transform * c).cast<double>();
    if ((v.cwiseAbs().array() <= limit.array()).all()) ++count;
  });
  en.run();
  return count;
}

bool in_K_mu(const LatticeBasis& basis, double mu) {
  if (!(mu > 0 && mu < 1)) throw DomainError("mu must lie in (0,1)");
  return shortest_supnorm(basis).length >= mu;
}

bool in_mahler_compact(const LatticeBasis& basis, double eps) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  return shortest_supnorm(basis).length >= eps;
}

namespace exact {

bool vector_in_open_box(const RationalMatrix& cols, const Rational& radius) {
  const auto m = static_cast<int>(cols.rows());
  if (cols.cols() != cols.rows()) throw DomainError("lattice basis must be square");
  check_size(m);
  if (radius <= 0) return false;

  const ReduceResult red = reduce(LatticeBasis::unchecked(cols.to_double()));
  const RationalMatrix b = cols * RationalMatrix::from_int(red.transform);
  const RationalMatrix binv = inverse(b);

  // |c_i| = |(B^-1 v)_i| < radius * sum_j |B^-1_ij|.
  std::vector<std::int64_t> bound(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Rational s = 0;
    for (int j = 0; j < m; ++j) s += abs(binv(i, j));
    bound[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(floor(s * radius));
  }

  // Odometer over the half box whose first nonzero coordinate is positive.
  IntVector c = IntVector::Zero(m);
  for (int i = 0; i < m; ++i) c(i) = -bound[static_cast<std::size_t>(i)];
  while (true) {
    bool positive_lead = false;
    for (int i = 0; i < m; ++i) {
      if (c(i) != 0) {
        positive_lead = c(i) > 0;
        break;
      }
    }
    if (positive_lead) {
      bool inside = true;
      for (int i = 0; i < m && inside; ++i) {
        Rational v = 0;
        for (int j = 0; j < m; ++j) {
          if (c(j) != 0) v += b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * c(j);
        }
        inside = abs(v) < radius;
      }
      if (inside) return true;
    }
    int pos = m - 1;
    while (pos >= 0 && c(pos) == bound[static_cast<std::size_t>(pos)]) {
      c(pos) = -bound[static_cast<std::size_t>(pos)];
      --pos;
    }
    if (pos < 0) return false;
    ++c(pos);
  }
}

bool in_K_mu(const RationalMatrix& cols, const Rational& mu) {
  if (!(mu > 0 && mu < 1)) throw DomainError("mu must lie in (0,1)");
  return !vector_in_open_box(cols, mu);
}

}  // namespace exact

}  // namespace danilab
