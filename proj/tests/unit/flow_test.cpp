#include "danilab/flow.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "danilab/errors.hpp"
#include "danilab/linalg.hpp"
#include "support/oracles.hpp"

namespace danilab {
namespace {

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

double dist(const Matrix& a, const Matrix& b) { return sup_norm(Matrix(a - b)); }

TEST(FlowTest, UnipotentEmbeddings) {
  EXPECT_EQ(u_embed(m1(2), Side::upper).matrix(), mat({{1, 2}, {0, 1}}));
  EXPECT_EQ(u_embed(m1(2), Side::lower).matrix(), mat({{1, 0}, {2, 1}}));
  oracle::Lcg rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p1 = rng.matrix(2, 2, 3.0);
    const Matrix p2 = rng.matrix(2, 2, 3.0);
    EXPECT_LT(dist((u_embed(p1) * u_embed(p2)).matrix(), u_embed(p1 + p2).matrix()), 1e-14);
  }
}

TEST(FlowTest, DiagonalFlow) {
  EXPECT_EQ(a_diag(0, 2).matrix(), Matrix::Identity(4, 4));
  EXPECT_LT(dist(a_diag(std::log(2.0), 1).matrix(), mat({{2, 0}, {0, 0.5}})), 1e-15);
  EXPECT_LT(dist((a_diag(0.7, 2) * a_diag(-1.9, 2)).matrix(), a_diag(-1.2, 2).matrix()), 1e-14);
}

TEST(FlowTest, CentralizerEmbedding) {
  EXPECT_EQ(z_embed(CentralizerElement::identity(2)).matrix(), Matrix::Identity(4, 4));
  const CentralizerElement z(m1(2), m1(0.5));
  const GroupElement g = z_embed(z);
  EXPECT_LT(dist((g * u_embed(m1(1)) * g.inverse()).matrix(), u_embed(m1(4)).matrix()), 1e-15);

  const CentralizerElement z2(mat({{2, 0}, {0, 1}}), mat({{1, 0}, {0, 0.5}}));
  Matrix expected = Matrix::Zero(4, 4);
  expected.diagonal() << 2, 1, 1, 0.5;
  EXPECT_EQ(z_embed(z2).matrix(), expected);
}

TEST(FlowTest, CentralizerConjugationIdentity) {
  oracle::Lcg rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 3));
    Matrix B = rng.invertible(n, 0.3);
    Matrix C = rng.invertible(n, 0.3);
    if (B.determinant() * C.determinant() < 0) C.col(0) *= -1;
    C *= std::pow(B.determinant() * C.determinant(), -1.0 / n);
    const CentralizerElement z(B, C);
    const Matrix phi = rng.matrix(n, n, 2.0);
    const GroupElement g = z_embed(z);
    EXPECT_LT(dist((g * u_embed(phi) * g.inverse()).matrix(), u_embed(z.act(phi)).matrix()), 1e-9);
  }
}

TEST(FlowTest, GroupElementValidation) {
  EXPECT_THROW(GroupElement::from_matrix(mat({{2, 0}, {0, 1}})), InvariantError);
  EXPECT_THROW(GroupElement::from_matrix(Matrix::Identity(3, 3)), InvariantError);
  EXPECT_NO_THROW(GroupElement::from_matrix(mat({{2, 0}, {0, 0.5}})));
}

TEST(FlowTest, RandomWordsStayUnimodular) {
  oracle::Lcg rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 2));
    GroupElement g = GroupElement::identity(n);
    const int len = static_cast<int>(rng.integer(1, 20));
    for (int k = 0; k < len; ++k) {
      switch (rng.integer(0, 3)) {
        case 0: g = g * u_embed(rng.matrix(n, n, 1.0), Side::upper); break;
        case 1: g = g * u_embed(rng.matrix(n, n, 1.0), Side::lower); break;
        case 2: g = g * a_diag(rng.symmetric(1.0), n); break;
        default: {
          Matrix B = Matrix::Identity(n, n) * std::exp(rng.symmetric(0.5));
          Matrix C = Matrix::Identity(n, n) / B(0, 0);
          g = g * z_embed(CentralizerElement(B, C));
        }
      }
    }
    EXPECT_NEAR(g.matrix().determinant(), 1.0, 1e-8);
  }
}

TEST(FlowTest, ConjugationByFlowScalesUnipotent) {
  oracle::Lcg rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix phi = rng.matrix(2, 2, 1.0);
    const double t = rng.symmetric(2.0);
    const Matrix lhs = (a_diag(t, 2) * u_embed(phi) * a_diag(-t, 2)).matrix();
    EXPECT_LT(dist(lhs, u_embed(std::exp(2 * t) * phi).matrix()), 1e-9);
  }
}

TEST(FlowTest, ExactConjugationByFlowScalesUnipotent) {
  RationalMatrix phi(2, 2);
  phi(0, 0) = Rational(1, 3);
  phi(0, 1) = Rational(-2, 7);
  phi(1, 0) = Rational(5, 11);
  phi(1, 1) = Rational(4);
  for (std::int64_t N : {2, 7, 50}) {
    const RationalMatrix a = exact::a_scale(N, 2);
    const RationalMatrix lhs = a * exact::u_embed(phi) * inverse(a);
    EXPECT_EQ(lhs, exact::u_embed(Rational(N * N) * phi));
  }
}

TEST(FlowTest, OrbitPoint) {
  const MatrixPolyCurve line({m1(0), m1(1)}, 0, 1);
  const LatticeBasis x = orbit_point(line, 0.5, std::log(10.0), LatticeBasis::identity(2), false);
  EXPECT_LT(dist(x.cols(), mat({{10, 5}, {0, 0.1}})), 1e-13);

  const MatrixPolyCurve zero({m1(0)}, 0, 1);
  EXPECT_EQ(orbit_point(zero, 0.3, 0, LatticeBasis::identity(2), false).cols(), Matrix::Identity(2, 2));

  oracle::Lcg rng(31);
  const MatrixPolyCurve cubic({rng.matrix(2, 2, 1), Matrix::Identity(2, 2), rng.matrix(2, 2, 0.3)}, 0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeBasis base = LatticeBasis::from_matrix(rng.unimodular(4));
    const double s = rng.uniform();
    if (cubic.derivative(s).determinant() <= 0.01) continue;
    const LatticeBasis y = orbit_point(cubic, s, rng.uniform() * 3, base, true);
    EXPECT_NEAR(std::abs(y.cols().determinant()), std::abs(base.cols().determinant()), 1e-8);
  }
}

TEST(FlowTest, DaniVector) {
  const IntVector p1 = IntVector::Constant(1, 1);
  const IntVector q0 = IntVector::Constant(1, 0);
  Vector v = dani_vector(m1(0.5), p1, q0, 10);
  EXPECT_NEAR(v(0), 5.0, 1e-15);
  EXPECT_NEAR(v(1), 0.1, 1e-15);
  EXPECT_TRUE(dani_vector(m1(0.5), q0, q0, 10).isZero());
  v = dani_vector(m1(0.5), IntVector::Constant(1, 2), IntVector::Constant(1, 1), 10);
  EXPECT_NEAR(v(0), 0.0, 1e-15);
  EXPECT_NEAR(v(1), 0.2, 1e-15);
  EXPECT_THROW(dani_vector(m1(0.5), p1, q0, 0), DomainError);
}

TEST(FlowTest, DaniVectorMatchesMatrixProduct) {
  oracle::Lcg rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 3));
    const Matrix phi = rng.matrix(n, n, 1.0);
    IntVector p(n), q(n);
    for (int i = 0; i < n; ++i) {
      p(i) = rng.integer(-9, 9);
      q(i) = rng.integer(-9, 9);
    }
    const std::int64_t N = rng.integer(1, 60);
    Vector mq(2 * n);
    mq.head(n) = -q.cast<double>();
    mq.tail(n) = p.cast<double>();
    const Vector direct = (a_diag(std::log(static_cast<double>(N)), n) * u_embed(phi)).apply(mq);
    EXPECT_LT(sup_norm(Vector(direct - dani_vector(phi, p, q, N))), 1e-12 * std::max(1.0, sup_norm(direct)));
  }
}

TEST(FlowTest, Sl2ImageGenerators) {
  const Sl2Copy copy(mat({{2, 1}, {0, 1}}));
  Eigen::Matrix2d u;
  u << 1, 0.7, 0, 1;
  EXPECT_LT(dist(sl2_image(copy, u).matrix(), u_embed(0.7 * copy.phi()).matrix()), 1e-15);
  Eigen::Matrix2d l;
  l << 1, 0, -0.3, 1;
  EXPECT_LT(dist(sl2_image(copy, l).matrix(), u_embed(-0.3 * copy.phi_inv(), Side::lower).matrix()), 1e-15);

  const Sl2Copy two(m1(2));
  EXPECT_LT(dist(sl2_image(two, weyl_element()).matrix(), mat({{0, 2}, {-0.5, 0}})), 1e-15);

  Eigen::Matrix2d m1m, m2m;
  m1m << 1, 1, 0, 1;
  m2m << 1, 0, 1, 1;
  const Sl2Copy c2(mat({{1, 2}, {3, 4}}));
  Matrix expected(4, 4);
  expected << 2 * Matrix::Identity(2, 2), c2.phi(), c2.phi_inv(), Matrix::Identity(2, 2);
  EXPECT_LT(dist((sl2_image(c2, m1m) * sl2_image(c2, m2m)).matrix(), expected), 1e-14);
  EXPECT_LT(dist(sl2_image(c2, m1m * m2m).matrix(), expected), 1e-14);

  Eigen::Matrix2d bad;
  bad << 2, 0, 0, 1;
  EXPECT_THROW(sl2_image(c2, bad), InvariantError);
  EXPECT_THROW(Sl2Copy(mat({{1, 2}, {2, 4}})), SingularityError);
}

TEST(FlowTest, Sl2ImageIsHomomorphism) {
  oracle::Lcg rng(41);
  auto random_sl2 = [&] {
    Eigen::Matrix2d m;
    do {
      m << rng.symmetric(2), rng.symmetric(2), rng.symmetric(2), rng.symmetric(2);
    } while (std::abs(m.determinant()) < 0.2);
    if (m.determinant() < 0) m.col(0) *= -1;
    return Eigen::Matrix2d(m / std::sqrt(m.determinant()));
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 3));
    const Sl2Copy copy(rng.invertible(n, 0.3));
    const Eigen::Matrix2d a = random_sl2();
    const Eigen::Matrix2d b = random_sl2();
    EXPECT_LT(dist((sl2_image(copy, a) * sl2_image(copy, b)).matrix(), sl2_image(copy, a * b).matrix()), 1e-8);
  }
}

TEST(FlowTest, ConjugationByWeylElement) {
  const auto id1 = CentralizerElement::identity(1);
  EXPECT_NEAR(conj_by_E(m1(2), id1, m1(3))(0, 0), -0.75, 1e-15);
  EXPECT_TRUE(conj_by_E(m1(2), id1, m1(0)).isZero());
  EXPECT_NEAR(conj_by_E(m1(1), id1, m1(1))(0, 0), -1.0, 1e-15);
}

TEST(FlowTest, ConjugationByWeylElementClosedForm) {
  oracle::Lcg rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 2));
    const Matrix phi = rng.invertible(n, 0.3);
    const double lambda = std::exp(rng.symmetric(0.5));
    const Matrix B = lambda * rng.invertible(n, 0.5);
    Matrix C = rng.invertible(n, 0.5);
    if (B.determinant() * C.determinant() < 0) C.col(0) *= -1;
    C *= std::pow(B.determinant() * C.determinant(), -1.0 / n);
    const CentralizerElement z(B, C);
    const Matrix D = rng.matrix(n, n, 2.0);
    const Matrix pinv = phi.inverse();
    const Matrix expected = -pinv * (B * D * C.inverse()) * pinv;
    EXPECT_LT(dist(conj_by_E(phi, z, D), expected), 1e-9 * std::max(1.0, sup_norm(expected)));
  }
}

}  // namespace
}  // namespace danilab
