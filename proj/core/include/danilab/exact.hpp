#pragma once

// Exact rational linear algebra for the identity and correspondence checks
// that must not depend on floating-point rounding.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "danilab/types.hpp"

namespace danilab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "7", "-3/37" and finite decimals such as "0.25" or "1e-3".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
// Exact conversion of a binary double.
Rational rational_from_double(double value);
double to_double(const Rational& value);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);
Rational abs(const Rational& value);

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_double(const Matrix& m);
  static RationalMatrix from_int(const IntMatrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  RationalMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const RationalMatrix& b);
  RationalMatrix transpose() const;
  Matrix to_double() const;
  bool is_zero() const;

  friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalMatrix operator*(const Rational& s, const RationalMatrix& a);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Rational determinant(const RationalMatrix& m);
// Throws SingularityError when m is singular.
RationalMatrix inverse(const RationalMatrix& m);
std::size_t rank(const RationalMatrix& m);
// Columns form a basis of {x : m x = 0}, read off the reduced row echelon
// form (free variable set to one, the others to zero).
RationalMatrix null_space(const RationalMatrix& m);
// Product with an integer vector, exact.
std::vector<Rational> apply(const RationalMatrix& m, const IntVector& x);

}  // namespace danilab
