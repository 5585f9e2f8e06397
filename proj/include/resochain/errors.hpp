#pragma once

#include <stdexcept>
#include <string>

namespace resochain {

/// Input that violates a documented invariant (bad config, invalid parameters).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation's precondition does not hold (e.g. a frequency outside a certified gap).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative procedure failed to converge or lost too much accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHyperbolicError : public DomainError {
 public:
  NotHyperbolicError(const std::string& what, std::size_t index)
      : DomainError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace resochain
