#ifndef FINITIST_RATE_HPP
#define FINITIST_RATE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace finitist {

using Natural = boost::multiprecision::cpp_int;

// Cap on the size of naturals produced by growth functions and sequence
// constructions. Exceeding it raises BudgetExceeded.
struct NumberBudget {
  std::size_t max_bits = 1u << 16;
};

void check_budget(const Natural& value, const NumberBudget& budget);

// Converts to uint64_t, raising BudgetExceeded when the value does not fit.
std::uint64_t to_u64(const Natural& value);

// A monotone growth function drawn from a small catalog of named
// combinators. Identifiers:
//
//   affine:c          c*(x+1)
//   pow:d             x^d
//   exp:b             b^x
//   id                x
//   compose(F,G)      F(G(x))
//   max(F,G)          pointwise maximum
//   shift(k,F)        F(x+k)
//   iterate(n,F)      F applied n times
//   add(k,F)          F(x)+k
//
// Every combinator only consults its argument, which keeps the
// "f(A)(n) depends on a finite segment" locality requirement trivially true
// when rates are applied pointwise to sequences.
class RateFunction {
 public:
  struct Node;

  // Parses a catalog identifier; throws ParseError on unknown names.
  static RateFunction parse(std::string_view id);

  static RateFunction affine(std::uint64_t c);
  static RateFunction power(std::uint64_t d);
  static RateFunction exponential(std::uint64_t base);
  static RateFunction pointwise_max(const RateFunction& f, const RateFunction& g);

  Natural operator()(const Natural& x, const NumberBudget& budget = {}) const;

  // Evaluation in 64-bit arithmetic; raises BudgetExceeded on overflow.
  std::uint64_t at(std::uint64_t x) const;

  // Canonical identifier; parse(id()) reproduces an equivalent function.
  const std::string& id() const { return id_; }

  friend bool operator==(const RateFunction& a, const RateFunction& b) {
    return a.id_ == b.id_;
  }

 private:
  RateFunction(std::shared_ptr<const Node> node, std::string id)
      : node_(std::move(node)), id_(std::move(id)) {}

  std::shared_ptr<const Node> node_;
  std::string id_;
};

}  // namespace finitist

#endif  // FINITIST_RATE_HPP
