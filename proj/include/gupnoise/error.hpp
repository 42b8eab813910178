#pragma once

#include <stdexcept>
#include <string>

namespace gupnoise {

// Error categories map one-to-one onto CLI exit statuses.
enum class ErrorKind { Domain, Regime, Input, Usage, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Violated mathematical precondition (e.g. overdamped eigenpair, D = 0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

// A closed-form regime formula evaluated outside its range of validity.
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error(ErrorKind::Regime, what) {}
};

enum class InputErrorKind { Missing, Empty, BadHeader, NonNumeric, NonPositive, Invalid };

// Bad user-supplied data (files, JSON documents, parameter values).
class InputError : public Error {
 public:
  InputError(InputErrorKind sub, const std::string& what) : Error(ErrorKind::Input, what), sub_(sub) {}
  InputErrorKind sub_kind() const noexcept { return sub_; }

 private:
  InputErrorKind sub_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace gupnoise
