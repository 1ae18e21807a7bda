#pragma once

#include <stdexcept>
#include <string>

namespace clonecover {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index sets or arities that do not line up.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A union of partial functions whose domains overlap.
class DomainCollision : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// An instance does not provide the finite witnesses a proof step needs.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace clonecover
