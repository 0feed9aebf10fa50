#pragma once

// Reference implementations used only by tests.  Each one takes the most
// direct route available (brute force, closed forms, permutation sums) and
// shares no code with the library path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Calls f on every integer vector in [-bound, bound]^m.
inline void for_each_box_point(int m, std::int64_t bound,
                               const std::function<void(const std::vector<std::int64_t>&)>& f) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(m), -bound);
  while (true) {
    f(c);
    int pos = m - 1;
    while (pos >= 0 && c[static_cast<std::size_t>(pos)] == bound) {
      c[static_cast<std::size_t>(pos)] = -bound;
      --pos;
    }
    if (pos < 0) return;
    ++c[static_cast<std::size_t>(pos)];
  }
}

inline Vector combine(const Matrix& cols, const std::vector<std::int64_t>& c) {
  Vector v = Vector::Zero(cols.rows());
  for (std::size_t j = 0; j < c.size(); ++j) v += static_cast<double>(c[j]) * cols.col(static_cast<Eigen::Index>(j));
  return v;
}

// Minimum sup norm over nonzero coefficient vectors in [-bound, bound]^m.
inline double brute_shortest_supnorm(const Matrix& cols, std::int64_t bound) {
  double best = INFINITY;
  for_each_box_point(static_cast<int>(cols.cols()), bound, [&](const std::vector<std::int64_t>& c) {
    if (std::all_of(c.begin(), c.end(), [](std::int64_t x) { return x == 0; })) return;
    best = std::min(best, combine(cols, c).cwiseAbs().maxCoeff());
  });
  return best;
}

inline std::int64_t brute_count_in_box(const Matrix& cols, const Vector& w, std::int64_t bound) {
  std::int64_t count = 0;
  for_each_box_point(static_cast<int>(cols.cols()), bound, [&](const std::vector<std::int64_t>& c) {
    if (std::all_of(c.begin(), c.end(), [](std::int64_t x) { return x == 0; })) return;
    const Vector v = combine(cols, c);
    if (((v.cwiseAbs() - w).array() <= 1e-12).all()) ++count;
  });
  return count;
}

// Determinant by Leibniz permutation expansion.
inline double leibniz_det(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= a(i, perm[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Eigen::Matrix2d inverse_2x2(const Eigen::Matrix2d& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Eigen::Matrix2d out;
  out << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return out / det;
}

// Scalar Dirichlet system by scanning every p in (-muN, muN) and every q
// within one unit of s p.  No sign reduction.
inline bool scalar_solvable(double s, std::int64_t N, double mu, bool q_nonzero) {
  const double Nd = static_cast<double>(N);
  for (std::int64_t p = -static_cast<std::int64_t>(mu * Nd) - 1; p <= static_cast<std::int64_t>(mu * Nd) + 1; ++p) {
    if (p == 0 || !(std::abs(static_cast<double>(p)) < mu * Nd)) continue;
    const double x = s * static_cast<double>(p);
    for (auto q = static_cast<std::int64_t>(std::floor(x)) - 1; q <= static_cast<std::int64_t>(std::ceil(x)) + 1; ++q) {
      if (q_nonzero && q == 0) continue;
      if (std::abs(x - static_cast<double>(q)) < mu / Nd) return true;
    }
  }
  return false;
}

// Fixed-seed linear congruential source, independent of the library RNG.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  double uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double symmetric(double scale) { return scale * (2.0 * uniform() - 1.0); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }
  Matrix matrix(int rows, int cols, double scale) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = symmetric(scale);
    return m;
  }
  // Random real matrix scaled to determinant +1.
  Matrix unimodular(int m) {
    while (true) {
      Matrix a = matrix(m, m, 1.0);
      const double det = a.determinant();
      if (std::abs(det) < 0.2) continue;
      a /= std::pow(std::abs(det), 1.0 / m);
      if (det < 0) a.col(0) *= -1.0;
      return a;
    }
  }
  Matrix invertible(int n, double min_det = 0.1) {
    while (true) {
      Matrix a = matrix(n, n, 1.0);
      if (std::abs(a.determinant()) >= min_det) return a;
    }
  }

 private:
  std::uint64_t state_;
};

// Random integer matrix with determinant +-1, built from elementary moves.
inline Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> integer_unimodular(int m, Lcg& rng, int moves) {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> u =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Identity(m, m);
  for (int k = 0; k < moves; ++k) {
    const auto i = rng.integer(0, m - 1);
    auto j = rng.integer(0, m - 1);
    if (i == j) j = (j + 1) % m;
    u.col(i) += rng.integer(-2, 2) * u.col(j);
  }
  return u;
}

}  // namespace oracle
