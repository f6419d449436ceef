#ifndef FINITIST_FASTGROW_HPP
#define FINITIST_FASTGROW_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "finitist/rate.hpp"

namespace finitist::fastgrow {

// plain:    s[0] > f(0),  s[i+1] > f(s[i])
// strict:   s[0] >= f(0), s[i+1] >= f(s[i])
// monotone: strictly increasing
enum class Variant { kPlain, kStrict, kMonotone };

std::string variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct FastSeq {
  std::vector<Natural> values;
  RateFunction rate = RateFunction::parse("id");
  Variant variant = Variant::kPlain;

  std::size_t size() const { return values.size(); }
  const Natural& operator[](std::size_t i) const { return values[i]; }
  // Last element for i past the end.
  const Natural& clamped(std::size_t i) const;
};

// Minimal sequence sitting `margin` above each bound: for plain,
// s[0] = f(0) + margin and s[i+1] = f(s[i]) + margin; strict uses
// margin - 1; monotone is margin - 1, margin, margin + 1, ...
FastSeq make_fastseq(const RateFunction& f, std::size_t length, Variant variant = Variant::kPlain,
                     std::uint64_t margin = 1, const NumberBudget& budget = {});

// The same recurrence, continued until the first value exceeds `floor`;
// returns `length` values starting there.
FastSeq make_fastseq_above(const RateFunction& f, std::size_t length, const Natural& floor,
                           Variant variant = Variant::kPlain, std::uint64_t margin = 1,
                           const NumberBudget& budget = {});

struct CheckResult {
  bool valid = true;
  std::optional<std::size_t> first_violation;  // index of the offending value
};

CheckResult check_fastseq(const std::vector<Natural>& s, const RateFunction& f, Variant variant,
                          const NumberBudget& budget = {});

// One number per line.
std::string to_lines(const std::vector<Natural>& values);
std::vector<Natural> from_lines(std::string_view text);

// Lengths of a nested sequence. A level-1 shape has `length` numbers; a
// level-i shape (i >= 2) has one level-(i-1) shape per block.
struct Shape {
  std::size_t length = 0;
  std::vector<Shape> blocks;

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::uint32_t shape_level(const Shape& s);

// Level-1 nodes hold numbers, higher nodes hold children.
struct LevelKNode {
  std::vector<Natural> numbers;
  std::vector<LevelKNode> children;

  friend bool operator==(const LevelKNode&, const LevelKNode&) = default;
};

struct LevelKSeq {
  std::uint32_t k = 1;
  LevelKNode root;
  std::vector<Natural> flat;
};

// Validates depth k, non-empty nodes and strictly increasing numbers; fills
// `flat`.
LevelKSeq from_tree(std::uint32_t k, LevelKNode root);
Shape shape_of(const LevelKSeq& s);

// Nested sequence whose flat expansion is the plain minimal sequence for f,
// cut into blocks according to `shape`. Throws ContractViolation on a
// zero-length block or a shape whose depth is not k.
LevelKSeq make_levelk(const RateFunction& f, std::uint32_t k, const Shape& shape,
                      std::uint64_t margin = 1, const NumberBudget& budget = {});

// Growth check on the flat expansion.
CheckResult check_levelk(const LevelKSeq& s, const RateFunction& f,
                         const NumberBudget& budget = {});

// Closing value of the last number: k + 1 (default), or k for the
// extension-friendly convention where the end of the list closes level k.
enum class Terminal { kKPlusOne, kK };

// g over positions 0..max: 0 off the sequence, otherwise 1 + the number of
// levels the position closes. Length is max + 1. Throws BudgetExceeded when
// max + 1 exceeds max_positions.
std::vector<std::uint32_t> encode_levelk(const LevelKSeq& s, Terminal terminal = Terminal::kKPlusOne,
                                         std::size_t max_positions = std::size_t{1} << 22);
// Throws ParseError (position = index into `code`) on malformed input.
LevelKSeq decode_levelk(const std::vector<std::uint32_t>& code, std::uint32_t k,
                        Terminal terminal = Terminal::kKPlusOne);

// Nested tuple text such as `((1,2,3),(4,5,6,7)),((10,11),(12,13,14))`; the
// outermost parentheses may be omitted. k is the nesting depth.
LevelKSeq parse_levelk(std::string_view text);
std::string render_levelk(const LevelKSeq& s);

// Random shape of level k with between 1 and max_width entries per node.
Shape random_shape(std::mt19937_64& rng, std::uint32_t k, std::size_t max_width = 4);

}  // namespace finitist::fastgrow

#endif  // FINITIST_FASTGROW_HPP
