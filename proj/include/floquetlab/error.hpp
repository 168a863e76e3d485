#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floquetlab {

// Root of the library's exception hierarchy. The command line tool maps the
// leaf types onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition: wrong dimensions, non-unitary input, bad indices.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Eigensolver/SVD failure or loss of numerical meaning.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Evaluation point coincides with a pole of a spectral sum.
class SingularPointError : public DomainError {
 public:
  SingularPointError(const std::string& what, std::size_t index)
      : DomainError(what), index_(index) {}

  // Basis index of the offending term.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ResourceGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace floquetlab
