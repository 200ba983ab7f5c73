#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrfna {

/// Base for every data error raised by the library. `kind()` is a stable
/// identifier used by the CLI's machine-parsable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class NotCoprime : public Error {
 public:
  NotCoprime(std::size_t i, std::size_t j)
      : Error("NotCoprime", "moduli at positions " + std::to_string(i) + " and " +
                                std::to_string(j) + " share a factor"),
        i_(i), j_(j) {}

  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

class ModulusTooSmall : public Error {
 public:
  explicit ModulusTooSmall(const std::string& what) : Error("ModulusTooSmall", what) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error("OutOfRange", what) {}
};

class MismatchedSet : public Error {
 public:
  MismatchedSet() : Error("MismatchedSet", "residue vector belongs to a different modulus set") {}
};

class DegenerateResult : public Error {
 public:
  explicit DegenerateResult(const std::string& what) : Error("DegenerateResult", what) {}
};

class InvalidProgram : public Error {
 public:
  explicit InvalidProgram(const std::string& what) : Error("InvalidProgram", what) {}
};

class IncompleteTrace : public Error {
 public:
  explicit IncompleteTrace(const std::string& what) : Error("IncompleteTrace", what) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& what) : Error("LengthMismatch", what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string name, const std::string& what)
      : Error("InvariantViolation", name + ": " + what), name_(std::move(name)) {}

  /// Short name of the failed invariant, e.g. "pairwise-coprime".
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Raised when an internal consistency check fails (misconfigured bounds,
/// estimator miss in audit mode). Not a user data error.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hrfna
