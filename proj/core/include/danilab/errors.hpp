#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace danilab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the operation's domain (s outside [a,b], mu
// outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double abs_det)
      : Error(what), abs_det_(abs_det) {}
  double abs_det() const { return abs_det_; }

 private:
  double abs_det_;
};

// The input admits no meaningful answer (no invertible punctured
// neighbourhood, all-zero samples, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A value type's construction invariant is violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

// det(phi'(s)) < 0: no centralizer element normalizes the derivative.
class OrientationError : public Error {
 public:
  using Error::Error;
};

// A matrix identity that holds by algebra failed numerically.  Never
// expected; signals a bug.
class InternalIdentityError : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& what, double qplus_residual)
      : Error(what), qplus_residual_(qplus_residual) {}
  double qplus_residual() const { return qplus_residual_; }

 private:
  double qplus_residual_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace danilab
