#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace torfan {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operands built over mismatched contexts (parameter ring, fan, truncation).
class StructuralError : public Error {
public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Valid input that the implementation deliberately does not cover.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

// Malformed file or selector string.
class ParseError : public Error {
public:
  using Error::Error;
};

// Section tuple rejected by gluing: carries the first incompatible pair of
// maximal cones and the first monomial where their restrictions differ.
class IncompatibleTupleError : public DomainError {
public:
  IncompatibleTupleError(std::size_t cone_a, std::size_t cone_b,
                         std::string monomial, const std::string& what)
      : DomainError(what),
        cone_a(cone_a),
        cone_b(cone_b),
        monomial(std::move(monomial)) {}

  std::size_t cone_a;
  std::size_t cone_b;
  std::string monomial;
};

// Push-forward recursion asked for a monomial its seed data cannot reach.
class UnderdeterminedError : public DomainError {
public:
  UnderdeterminedError(std::string monomial, const std::string& what)
      : DomainError(what), monomial(std::move(monomial)) {}

  std::string monomial;
};

}  // namespace torfan
