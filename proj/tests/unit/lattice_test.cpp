#include "danilab/lattice.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "danilab/errors.hpp"
#include "danilab/flow.hpp"
#include "danilab/linalg.hpp"
#include "support/oracles.hpp"

namespace danilab {
namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

LatticeBasis diag_lattice(double a, double b) { return LatticeBasis::from_matrix(mat2(a, 0, 0, b)); }

TEST(LatticeTest, BasisValidation) {
  EXPECT_THROW(LatticeBasis::from_matrix(mat2(2, 0, 0, 1)), InvariantError);
  EXPECT_THROW(LatticeBasis::from_matrix(Matrix::Identity(2, 3)), InvariantError);
  EXPECT_NO_THROW(LatticeBasis::from_matrix(mat2(0, 1, 1, 0)));
}

TEST(LatticeTest, ReduceIdentityAndShear) {
  const ReduceResult id = reduce(LatticeBasis::identity(3));
  EXPECT_EQ(id.basis.cols(), Matrix::Identity(3, 3));
  EXPECT_EQ(id.transform, IntMatrix::Identity(3, 3));

  const LatticeBasis shear = LatticeBasis::from_matrix(mat2(1, 100, 0, 1));
  const ReduceResult r = reduce(shear);
  EXPECT_NEAR(r.basis.cols().col(0).norm(), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.basis.cols().determinant()), 1.0, 1e-12);
  EXPECT_EQ(std::abs(r.transform.cast<double>().determinant()), 1.0);
}

TEST(LatticeTest, ReduceKeepsLattice) {
  oracle::Lcg rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = static_cast<int>(rng.integer(2, 6));
    const Matrix skew = rng.unimodular(m) * oracle::integer_unimodular(m, rng, 12).cast<double>();
    const ReduceResult r = reduce(LatticeBasis::from_matrix(skew));
    EXPECT_NEAR(std::abs(r.transform.cast<double>().determinant()), 1.0, 1e-9);
    EXPECT_LT(sup_norm(Matrix(r.basis.cols() - skew * r.transform.cast<double>())), 1e-9 * std::max(1.0, sup_norm(skew)));
    // Lovasz condition with delta = 0.99 on the output.
    const Matrix b = r.basis.cols();
    Eigen::HouseholderQR<Matrix> qr(b);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 1; k < m; ++k) {
      const double mu = R(k - 1, k) / R(k - 1, k - 1);
      EXPECT_GE(R(k, k) * R(k, k) + 1e-9, (0.99 - mu * mu) * R(k - 1, k - 1) * R(k - 1, k - 1));
      EXPECT_LE(std::abs(mu), 0.5 + 1e-9);
    }
  }
}

TEST(LatticeTest, ShortestExamples) {
  EXPECT_DOUBLE_EQ(shortest_supnorm(LatticeBasis::identity(2)).length, 1.0);

  const ShortVectorResult d = shortest_supnorm(diag_lattice(2, 0.5));
  EXPECT_DOUBLE_EQ(d.length, 0.5);
  EXPECT_DOUBLE_EQ(std::abs(d.vector(0)), 0.0);
  EXPECT_DOUBLE_EQ(std::abs(d.vector(1)), 0.5);

  const LatticeBasis sheared = LatticeBasis::from_matrix(mat2(2, 1, 0, 0.5));
  const ShortVectorResult s = shortest_supnorm(sheared);
  EXPECT_NEAR(s.length, 1.0, 1e-15);
  EXPECT_NEAR(oracle::brute_shortest_supnorm(sheared.cols(), 4), 1.0, 1e-15);
}

TEST(LatticeTest, ShortestResultIsConsistent) {
  oracle::Lcg rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = static_cast<int>(rng.integer(2, 5));
    const LatticeBasis b = LatticeBasis::from_matrix(rng.unimodular(m));
    const ShortVectorResult r = shortest_supnorm(b);
    EXPECT_FALSE(r.coeffs.isZero());
    Eigen::Index first = 0;
    while (r.coeffs(first) == 0) ++first;
    EXPECT_GT(r.coeffs(first), 0);
    EXPECT_LT(sup_norm(Vector(r.vector - b.cols() * r.coeffs.cast<double>())), 1e-12);
    EXPECT_DOUBLE_EQ(r.length, sup_norm(r.vector));
  }
}

TEST(LatticeTest, ShortestTieGoesToSmallestCoefficients) {
  // Z^2: (0,1) and (1,0) tie; lexicographic order prefers (0, 1).
  const ShortVectorResult r = shortest_supnorm(LatticeBasis::identity(2));
  EXPECT_EQ(r.coeffs(0), 0);
  EXPECT_EQ(r.coeffs(1), 1);
}

TEST(LatticeTest, ShortestMatchesBruteForce) {
  oracle::Lcg rng(107);
  for (int m : {2, 4}) {
    for (int trial = 0; trial < 100; ++trial) {
      const LatticeBasis b = LatticeBasis::from_matrix(rng.unimodular(m));
      const double bound = m == 2 ? 10 : 6;
      EXPECT_NEAR(shortest_supnorm(b).length, oracle::brute_shortest_supnorm(b.cols(), static_cast<std::int64_t>(bound)), 1e-12)
          << "m = " << m << ", trial " << trial;
    }
  }
}

TEST(LatticeTest, ShortestOnSkewedFlowLattices) {
  // a_t u(s) Z^2 for t large: the short vector is far from the input basis.
  for (double t : {3.0, 6.0, 9.0}) {
    for (double s : {0.1234, std::sqrt(2.0) - 1, 0.5}) {
      const Matrix cols = (a_diag(t, 1) * u_embed(Matrix::Constant(1, 1, s))).matrix();
      const ShortVectorResult r = shortest_supnorm(LatticeBasis::unchecked(cols));
      // Best sup norm of (e^t (s p - q), e^-t p) over a generous coefficient range.
      double best = INFINITY;
      for (std::int64_t p = -200000; p <= 200000; ++p) {
        const double x = s * static_cast<double>(p);
        for (double q : {std::floor(x), std::ceil(x)}) {
          if (p == 0 && q == 0) continue;
          best = std::min(best, std::max(std::exp(t) * std::abs(x - q), std::exp(-t) * std::abs(static_cast<double>(p))));
        }
      }
      EXPECT_NEAR(r.length, best, 1e-9 * best) << "t = " << t << ", s = " << s;
    }
  }
}

TEST(LatticeTest, CountInBoxExamples) {
  EXPECT_EQ(count_in_box(LatticeBasis::identity(2), Vector::Ones(2)), 8);
  EXPECT_EQ(count_in_box(diag_lattice(2, 0.5), Vector::Ones(2)), 4);
  EXPECT_EQ(count_in_box(diag_lattice(2, 0.5), Vector::Constant(2, 0.4)), 0);
  EXPECT_EQ(count_in_box(LatticeBasis::identity(2), Vector::Constant(2, 1e-6)), 0);
  EXPECT_THROW(count_in_box(LatticeBasis::identity(2), Vector::Constant(2, -1)), DomainError);
}

TEST(LatticeTest, CountInBoxMatchesBruteForceAndIsEven) {
  oracle::Lcg rng(109);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = static_cast<int>(rng.integer(2, 3));
    const LatticeBasis b = LatticeBasis::from_matrix(rng.unimodular(m));
    Vector w(m);
    for (int i = 0; i < m; ++i) w(i) = 0.3 + 1.5 * rng.uniform();
    const std::int64_t c = count_in_box(b, w);
    EXPECT_EQ(c % 2, 0);
    EXPECT_EQ(c, oracle::brute_count_in_box(b.cols(), w, 12)) << "trial " << trial;
  }
}

TEST(LatticeTest, CountInBoxInvariantUnderRecombination) {
  oracle::Lcg rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = static_cast<int>(rng.integer(2, 4));
    const Matrix cols = rng.unimodular(m);
    const IntMatrix u = oracle::integer_unimodular(m, rng, 10);
    Vector w(m);
    for (int i = 0; i < m; ++i) w(i) = 0.5 + rng.uniform();
    EXPECT_EQ(count_in_box(LatticeBasis::from_matrix(cols), w),
              count_in_box(LatticeBasis::unchecked(cols * u.cast<double>()), w));
  }
}

TEST(LatticeTest, DimensionLimit) {
  EXPECT_THROW(shortest_supnorm(LatticeBasis::identity(9)), UnsupportedSizeError);
  EXPECT_THROW(count_in_box(LatticeBasis::identity(9), Vector::Ones(9)), UnsupportedSizeError);
  EXPECT_DOUBLE_EQ(shortest_supnorm(LatticeBasis::identity(8)).length, 1.0);
}

TEST(LatticeTest, KMuMembership) {
  EXPECT_TRUE(in_K_mu(LatticeBasis::identity(4), 0.9));
  EXPECT_FALSE(in_K_mu(diag_lattice(2, 0.5), 0.9));
  EXPECT_TRUE(in_K_mu(diag_lattice(2, 0.5), 0.4));
  EXPECT_THROW(in_K_mu(LatticeBasis::identity(2), 1.0), DomainError);
  EXPECT_THROW(in_K_mu(LatticeBasis::identity(2), 0.0), DomainError);
}

TEST(LatticeTest, KMuMonotoneInMu) {
  oracle::Lcg rng(127);
  for (int trial = 0; trial < 50; ++trial) {
    const LatticeBasis b = LatticeBasis::from_matrix(rng.unimodular(static_cast<int>(rng.integer(2, 4))));
    bool seen_false = false;
    for (double mu = 0.05; mu < 1.0; mu += 0.05) {
      const bool in = in_K_mu(b, mu);
      if (seen_false) EXPECT_FALSE(in);
      seen_false = seen_false || !in;
    }
  }
}

TEST(LatticeTest, MahlerCompactness) {
  EXPECT_TRUE(in_mahler_compact(LatticeBasis::identity(2), 0.5));
  EXPECT_FALSE(in_mahler_compact(diag_lattice(2, 0.5), 0.6));
  EXPECT_TRUE(in_mahler_compact(LatticeBasis::unchecked(a_diag(2.2, 1).matrix()), 0.1));
  EXPECT_FALSE(in_mahler_compact(LatticeBasis::unchecked(a_diag(2.4, 1).matrix()), 0.1));
  EXPECT_THROW(in_mahler_compact(LatticeBasis::identity(2), 0.0), DomainError);
}

TEST(LatticeTest, ExactOpenBoxBoundary) {
  RationalMatrix d(2, 2);
  d(0, 0) = 2;
  d(1, 1) = Rational(1, 2);
  // (0, 1/2) sits on the boundary of the open ball of radius 1/2.
  EXPECT_FALSE(exact::vector_in_open_box(d, Rational(1, 2)));
  EXPECT_TRUE(exact::vector_in_open_box(d, Rational(1, 2) + Rational(1, 1000000)));
  EXPECT_TRUE(exact::in_K_mu(d, Rational(1, 2)));
  EXPECT_FALSE(exact::in_K_mu(d, Rational(501, 1000)));
  EXPECT_THROW(exact::in_K_mu(d, Rational(1)), DomainError);
}

TEST(LatticeTest, ExactAgreesWithFloatAwayFromBoundary) {
  oracle::Lcg rng(131);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    RationalMatrix cols(2, 2);
    cols(0, 0) = Rational(rng.integer(1, 9), rng.integer(1, 9));
    cols(0, 1) = Rational(rng.integer(-20, 20), rng.integer(1, 9));
    cols(1, 1) = 1 / cols(0, 0);
    const double lambda = shortest_supnorm(LatticeBasis::unchecked(cols.to_double())).length;
    const double mu = 0.05 + 0.9 * rng.uniform();
    if (std::abs(lambda - mu) < 1e-9) continue;
    ++compared;
    EXPECT_EQ(exact::in_K_mu(cols, rational_from_double(mu)), lambda >= mu);
  }
  EXPECT_GT(compared, 150);
}

}  // namespace
}  // namespace danilab
