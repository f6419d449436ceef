#ifndef FINITIST_FORMULAS_HPP
#define FINITIST_FORMULAS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace finitist::formulas {

// Boolean combination of window atoms X_i(j) and eventually periodic tail
// atoms over the tail variable y.
struct Expr {
  enum class Op { kTrue, kFalse, kBit, kGe, kMod, kNot, kAnd, kOr, kImplies, kIff };

  Op op = Op::kFalse;
  std::uint32_t var = 0;  // kBit: index into the sentence prefix
  std::uint64_t a = 0;    // kBit: bit position; kGe: threshold; kMod: modulus
  std::uint64_t b = 0;    // kMod: residue
  std::vector<Expr> args;

  static Expr constant(bool value);
  static Expr bit(std::uint32_t var, std::uint64_t position);
  static Expr at_least(std::uint64_t threshold);
  static Expr residue(std::uint64_t modulus, std::uint64_t r);
  static Expr negation(Expr e);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// Values of X_i(0..w-1) for each bound set variable, indexed by prefix
// position. Bit j of patterns[i] is X_i(j).
struct WitnessAssignment {
  std::uint32_t width = 0;
  std::vector<std::uint32_t> patterns;
};

// The matrix P of a normal-form sentence. Caches the window width w, the
// tail threshold t (largest `y>=t` constant) and the period m (lcm of all
// moduli), so P(y, X) depends on y only through (y >= t', y mod m) for
// every threshold t' <= t.
class Matrix {
 public:
  Matrix() : Matrix(Expr::constant(false)) {}
  explicit Matrix(Expr root);

  const Expr& root() const { return root_; }
  std::uint32_t window() const { return window_; }
  std::uint64_t threshold() const { return threshold_; }
  std::uint64_t period() const { return period_; }
  // One past the largest variable index referenced, 0 when none.
  std::uint32_t arity() const { return arity_; }

  friend bool operator==(const Matrix& a, const Matrix& b) { return a.root_ == b.root_; }

 private:
  Expr root_;
  std::uint32_t window_ = 0;
  std::uint64_t threshold_ = 0;
  std::uint64_t period_ = 1;
  std::uint32_t arity_ = 0;
};

enum class Quantifier { kExists, kForall };

struct Binder {
  Quantifier quantifier = Quantifier::kExists;
  std::string name;

  friend bool operator==(const Binder&, const Binder&) = default;
};

// Q X_1 ... Q X_n  forall x exists y > x  P.  The tail block is implicit.
struct Sentence {
  std::vector<Binder> prefix;
  Matrix matrix;
  std::string source;

  std::size_t depth() const { return prefix.size(); }
};

// Structural equality: prefix and matrix; source text is ignored.
bool same_sentence(const Sentence& a, const Sentence& b);

struct ParseOptions {
  // Largest admissible window; X(j) with j >= max_window is rejected.
  std::uint32_t max_window = 16;
  std::uint64_t max_modulus = 64;
};

Sentence parse_sentence(std::string_view text, const ParseOptions& options = {});
std::string render_sentence(const Sentence& s);
std::string render_matrix(const Sentence& s);

// Value of P at (y, a). Throws ContractViolation when `a` does not cover a
// variable occurring in `m` or has the wrong width.
bool eval_matrix(const Matrix& m, std::uint64_t y, const WitnessAssignment& a);

// Whether P(y, a) holds for arbitrarily large y. Exact: checks one
// representative y >= t of every residue class mod m.
bool tail_truth(const Matrix& m, const WitnessAssignment& a);

struct TruthBudget {
  // Maximum n * w; the search visits 2^(n*w) assignments.
  std::uint32_t max_assignment_bits = 24;
};

// Exact truth by exhaustive search over all window patterns of every set
// quantifier. Throws BudgetExceeded instead of approximating.
bool brute_truth(const Sentence& s, const TruthBudget& budget = {});

// Truth of the suffix starting at prefix position `from`, with the outer
// variables fixed by `a` (patterns for positions < from must be set).
bool brute_truth_suffix(const Sentence& s, std::size_t from, WitnessAssignment a);

// The negation in normal form: dual prefix, and the tail
// "not infinitely often P" rewritten as "infinitely often, P fails on a
// full period", i.e. AND_{i<m} !P[y := y+i].
Sentence negate(const Sentence& s);

// P[y := y + offset], expressed again with >= and % atoms.
Expr shift_tail(const Expr& e, std::uint64_t offset);

// Prefix length plus number of matrix nodes plus the largest tail constant.
std::uint64_t sentence_size(const Sentence& s);

// Renames prefix variables; names must be distinct.
Sentence rename_variables(const Sentence& s, const std::vector<std::string>& names);

}  // namespace finitist::formulas

#endif  // FINITIST_FORMULAS_HPP
