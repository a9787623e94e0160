#pragma once

#include <stdexcept>
#include <string>

namespace nrsense {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A numerical procedure failed: series non-convergence, quadrature budget
/// exhausted, or a value that cannot be represented.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Configuration or file problems surfaced by the scenario / CLI layer.
class InputError : public Error {
public:
  using Error::Error;
};

} // namespace nrsense
