#ifndef FINITIST_ERRORS_HPP
#define FINITIST_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finitist {

// A caller broke a documented precondition (level mismatch, missing
// variable, malformed argument).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Text input could not be parsed. `position` is a byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Syntactically valid input outside the supported class.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured resource cap (number size, search nodes, iterations) was hit.
// Raised instead of returning an approximate answer.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Saturation did not reach a fixpoint within its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finitist

#endif  // FINITIST_ERRORS_HPP
