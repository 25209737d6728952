#pragma once

#include <stdexcept>
#include <string>

namespace formalis {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// A well-formed request the mathematics rejects (non-prime l, impure input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// Input that violates a structural contract (shapes, d*d != 0, schema).
class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid-input"; }
};

class NotPure : public DomainError {
 public:
  NotPure(const std::string& what, int internal, int cohom)
      : DomainError(what), internal_(internal), cohom_(cohom) {}
  const char* kind() const noexcept override { return "not-pure"; }
  int internal() const noexcept { return internal_; }
  int cohom() const noexcept { return cohom_; }

 private:
  int internal_;
  int cohom_;
};

class ResolutionNotFound : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "resolution-not-found"; }
};

}  // namespace formalis
