#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergolab {

// Precondition violated by the caller (bad parameter value).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index outside the range covered by a table (usually the sieve).
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// The requested variant or modulus is not handled by this library.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A computation needs more room than it was given. `suggestion` names what
// would suffice, e.g. a sieve limit.
class ResourceExhausted : public std::runtime_error {
 public:
  ResourceExhausted(const std::string& what, std::string suggestion)
      : std::runtime_error(what), suggestion_(std::move(suggestion)) {}
  const std::string& suggestion() const { return suggestion_; }

 private:
  std::string suggestion_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ergolab
