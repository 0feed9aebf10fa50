#include "danilab/exact.hpp"

#include <gtest/gtest.h>

#include "danilab/errors.hpp"
#include "support/oracles.hpp"

namespace danilab {
namespace {

TEST(ExactTest, ParseRational) {
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational(" -3/37 "), Rational(-3, 37));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5/0.5"), Rational(5));
  EXPECT_THROW(parse_rational("1/0"), DomainError);
  EXPECT_THROW(parse_rational("abc"), DomainError);
  EXPECT_THROW(parse_rational(""), DomainError);
  EXPECT_EQ(to_string(Rational(-6, 4)), "-3/2");
  EXPECT_EQ(to_string(Rational(4)), "4");
}

TEST(ExactTest, FloorCeilAbs) {
  EXPECT_EQ(floor(Rational(7, 2)), 3);
  EXPECT_EQ(floor(Rational(-7, 2)), -4);
  EXPECT_EQ(floor(Rational(-4)), -4);
  EXPECT_EQ(ceil(Rational(7, 2)), 4);
  EXPECT_EQ(ceil(Rational(-7, 2)), -3);
  EXPECT_EQ(abs(Rational(-1, 3)), Rational(1, 3));
  EXPECT_EQ(rational_from_double(0.1) == Rational(1, 10), false);
  EXPECT_EQ(to_double(rational_from_double(0.1)), 0.1);
}

TEST(ExactTest, DeterminantMatchesLeibniz) {
  oracle::Lcg rng(401);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.integer(1, 5));
    RationalMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    Matrix d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto v = rng.integer(-5, 5);
        m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        d(i, j) = static_cast<double>(v);
      }
    EXPECT_EQ(to_double(determinant(m)), oracle::leibniz_det(d));
  }
}

TEST(ExactTest, InverseAndNullSpace) {
  RationalMatrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 7;
  a(1, 1) = 4;
  EXPECT_EQ(a * inverse(a), RationalMatrix::identity(2));

  RationalMatrix s(2, 3);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(0, 2) = 3;
  s(1, 0) = 2;
  s(1, 1) = 4;
  s(1, 2) = 6;
  EXPECT_EQ(rank(s), 1u);
  const RationalMatrix ns = null_space(s);
  EXPECT_EQ(ns.cols(), 2u);
  EXPECT_TRUE((s * ns).is_zero());
  EXPECT_THROW(inverse(s.block(0, 0, 2, 2)), SingularityError);
  EXPECT_THROW(determinant(s), DomainError);
}

TEST(ExactTest, ApplyIntegerVector) {
  RationalMatrix m(2, 2);
  m(0, 0) = Rational(1, 2);
  m(1, 1) = Rational(-1, 3);
  IntVector x(2);
  x << 4, 3;
  const auto y = apply(m, x);
  EXPECT_EQ(y[0], Rational(2));
  EXPECT_EQ(y[1], Rational(-1));
}

}  // namespace
}  // namespace danilab
