#include "finitist/formulas.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "finitist/errors.hpp"

namespace finitist::formulas {

Expr Expr::constant(bool value) {
  Expr e;
  e.op = value ? Op::kTrue : Op::kFalse;
  return e;
}

Expr Expr::bit(std::uint32_t var, std::uint64_t position) {
  Expr e;
  e.op = Op::kBit;
  e.var = var;
  e.a = position;
  return e;
}

Expr Expr::at_least(std::uint64_t threshold) {
  Expr e;
  e.op = Op::kGe;
  e.a = threshold;
  return e;
}

Expr Expr::residue(std::uint64_t modulus, std::uint64_t r) {
  Expr e;
  e.op = Op::kMod;
  e.a = modulus;
  e.b = r;
  return e;
}

Expr Expr::negation(Expr inner) {
  Expr e;
  e.op = Op::kNot;
  e.args.push_back(std::move(inner));
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  Expr e;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

namespace {

void scan(const Expr& e, std::uint32_t& window, std::uint64_t& threshold, std::uint64_t& period,
          std::uint32_t& arity) {
  switch (e.op) {
    case Expr::Op::kBit:
      window = std::max<std::uint32_t>(window, static_cast<std::uint32_t>(e.a + 1));
      arity = std::max(arity, e.var + 1);
      break;
    case Expr::Op::kGe:
      threshold = std::max(threshold, e.a);
      break;
    case Expr::Op::kMod:
      period = std::lcm(period, e.a);
      break;
    default:
      break;
  }
  for (const Expr& c : e.args) scan(c, window, threshold, period, arity);
}

bool eval(const Expr& e, std::uint64_t y, const WitnessAssignment& a) {
  switch (e.op) {
    case Expr::Op::kTrue:
      return true;
    case Expr::Op::kFalse:
      return false;
    case Expr::Op::kBit:
      return (a.patterns[e.var] >> e.a) & 1u;
    case Expr::Op::kGe:
      return y >= e.a;
    case Expr::Op::kMod:
      return y % e.a == e.b;
    case Expr::Op::kNot:
      return !eval(e.args[0], y, a);
    case Expr::Op::kAnd:
      return eval(e.args[0], y, a) && eval(e.args[1], y, a);
    case Expr::Op::kOr:
      return eval(e.args[0], y, a) || eval(e.args[1], y, a);
    case Expr::Op::kImplies:
      return !eval(e.args[0], y, a) || eval(e.args[1], y, a);
    case Expr::Op::kIff:
      return eval(e.args[0], y, a) == eval(e.args[1], y, a);
  }
  return false;
}

}  // namespace

Matrix::Matrix(Expr root) : root_(std::move(root)) {
  scan(root_, window_, threshold_, period_, arity_);
}

bool same_sentence(const Sentence& a, const Sentence& b) {
  return a.prefix == b.prefix && a.matrix == b.matrix;
}

bool eval_matrix(const Matrix& m, std::uint64_t y, const WitnessAssignment& a) {
  if (a.patterns.size() < m.arity()) {
    throw ContractViolation("assignment covers " + std::to_string(a.patterns.size()) +
                            " variables, matrix uses " + std::to_string(m.arity()));
  }
  if (a.width != m.window()) {
    throw ContractViolation("assignment width " + std::to_string(a.width) +
                            " differs from matrix window " + std::to_string(m.window()));
  }
  return eval(m.root(), y, a);
}

bool tail_truth(const Matrix& m, const WitnessAssignment& a) {
  for (std::uint64_t r = 0; r < m.period(); ++r) {
    if (eval_matrix(m, m.threshold() + r, a)) return true;
  }
  return false;
}

bool brute_truth_suffix(const Sentence& s, std::size_t from, WitnessAssignment a) {
  a.width = s.matrix.window();
  if (a.patterns.size() < s.depth()) a.patterns.resize(s.depth(), 0);
  if (from == s.depth()) return tail_truth(s.matrix, a);
  const bool exists = s.prefix[from].quantifier == Quantifier::kExists;
  const std::uint32_t count = 1u << a.width;
  for (std::uint32_t p = 0; p < count; ++p) {
    a.patterns[from] = p;
    bool v = brute_truth_suffix(s, from + 1, a);
    if (exists && v) return true;
    if (!exists && !v) return false;
  }
  return !exists;
}

bool brute_truth(const Sentence& s, const TruthBudget& budget) {
  const std::uint64_t bits = static_cast<std::uint64_t>(s.depth()) * s.matrix.window();
  if (bits > budget.max_assignment_bits) {
    throw BudgetExceeded("brute force needs 2^" + std::to_string(bits) +
                         " assignments, budget allows 2^" +
                         std::to_string(budget.max_assignment_bits));
  }
  return brute_truth_suffix(s, 0, WitnessAssignment{});
}

Expr shift_tail(const Expr& e, std::uint64_t offset) {
  switch (e.op) {
    case Expr::Op::kGe:
      // y + offset >= t  <=>  y >= t - offset
      return e.a <= offset ? Expr::constant(true) : Expr::at_least(e.a - offset);
    case Expr::Op::kMod:
      return Expr::residue(e.a, (e.b + e.a - offset % e.a) % e.a);
    default: {
      Expr out = e;
      for (Expr& c : out.args) c = shift_tail(c, offset);
      return out;
    }
  }
}

Sentence negate(const Sentence& s) {
  Sentence out;
  for (const Binder& b : s.prefix) {
    out.prefix.push_back({b.quantifier == Quantifier::kExists ? Quantifier::kForall
                                                              : Quantifier::kExists,
                          b.name});
  }
  const std::uint64_t m = s.matrix.period();
  Expr body = Expr::negation(s.matrix.root());
  for (std::uint64_t i = 1; i < m; ++i) {
    body = Expr::binary(Expr::Op::kAnd, std::move(body),
                        Expr::negation(shift_tail(s.matrix.root(), i)));
  }
  out.matrix = Matrix(std::move(body));
  out.source = render_sentence(out);
  return out;
}

std::uint64_t sentence_size(const Sentence& s) {
  std::uint64_t nodes = 0;
  std::uint64_t largest = 0;
  auto count = [&](auto&& self, const Expr& e) -> void {
    ++nodes;
    if (e.op == Expr::Op::kGe || e.op == Expr::Op::kMod) largest = std::max(largest, e.a);
    for (const Expr& c : e.args) self(self, c);
  };
  count(count, s.matrix.root());
  return s.depth() + nodes + largest;
}

Sentence rename_variables(const Sentence& s, const std::vector<std::string>& names) {
  if (names.size() != s.depth()) throw ContractViolation("rename: wrong number of names");
  std::set<std::string> distinct(names.begin(), names.end());
  if (distinct.size() != names.size()) throw ContractViolation("rename: names must be distinct");
  Sentence out = s;
  for (std::size_t i = 0; i < names.size(); ++i) out.prefix[i].name = names[i];
  out.source = render_sentence(out);
  return out;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

int precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::kIff:
      return 1;
    case Expr::Op::kImplies:
      return 2;
    case Expr::Op::kOr:
      return 3;
    case Expr::Op::kAnd:
      return 4;
    case Expr::Op::kNot:
      return 5;
    default:
      return 6;
  }
}

const char* symbol(Expr::Op op) {
  switch (op) {
    case Expr::Op::kIff:
      return " <-> ";
    case Expr::Op::kImplies:
      return " -> ";
    case Expr::Op::kOr:
      return " | ";
    default:
      return " & ";
  }
}

void render(const Expr& e, const std::vector<Binder>& prefix, std::string& out) {
  auto child = [&](const Expr& c, bool parens) {
    if (parens) out += '(';
    render(c, prefix, out);
    if (parens) out += ')';
  };
  switch (e.op) {
    case Expr::Op::kTrue:
      out += "true";
      return;
    case Expr::Op::kFalse:
      out += "false";
      return;
    case Expr::Op::kBit:
      out += prefix.at(e.var).name + "(" + std::to_string(e.a) + ")";
      return;
    case Expr::Op::kGe:
      out += "y>=" + std::to_string(e.a);
      return;
    case Expr::Op::kMod:
      out += "y%" + std::to_string(e.a) + "=" + std::to_string(e.b);
      return;
    case Expr::Op::kNot:
      out += '!';
      child(e.args[0], precedence(e.args[0].op) < precedence(Expr::Op::kNot));
      return;
    default:
      break;
  }
  const int p = precedence(e.op);
  const int lp = precedence(e.args[0].op);
  const int rp = precedence(e.args[1].op);
  // & | <-> associate to the left, -> to the right.
  const bool right_assoc = e.op == Expr::Op::kImplies;
  child(e.args[0], right_assoc ? lp <= p : lp < p);
  out += symbol(e.op);
  child(e.args[1], right_assoc ? rp < p : rp <= p);
}

class SentenceParser {
 public:
  SentenceParser(std::string_view text, const ParseOptions& options)
      : text_(text), options_(options) {}

  Sentence parse() {
    Sentence s;
    s.source = std::string(text_);
    while (true) {
      skip_ws();
      std::size_t at = pos_;
      if (accept("EX") || accept("AA")) {
        bool exists = text_.substr(at, 2) == "EX";
        skip_ws();
        if (!exists && peek_tail_var()) {
          ++pos_;
          expect('.');
          break;
        }
        std::size_t name_at = pos_;
        std::string name = ident();
        if (name.empty()) throw ParseError("expected set variable name", name_at);
        for (const Binder& b : s.prefix) {
          if (b.name == name) throw ValidationError("variable " + name + " bound twice");
        }
        expect('.');
        s.prefix.push_back({exists ? Quantifier::kExists : Quantifier::kForall, name});
        continue;
      }
      throw ParseError("expected EX, AA or the tail block 'AA y.'", pos_);
    }
    prefix_ = &s.prefix;
    Expr root = formula();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    s.matrix = Matrix(std::move(root));
    return s;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  bool peek_tail_var() const {
    if (pos_ >= text_.size() || text_[pos_] != 'y') return false;
    std::size_t next = pos_ + 1;
    return next >= text_.size() ||
           !(std::isalnum(static_cast<unsigned char>(text_[next])) || text_[next] == '_');
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && std::isupper(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v > (UINT64_MAX - 9) / 10) throw ParseError("number too large", start);
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected number", pos_);
    return v;
  }

  Expr formula() {
    Expr lhs = implication();
    while (accept("<->")) lhs = Expr::binary(Expr::Op::kIff, std::move(lhs), implication());
    return lhs;
  }

  Expr implication() {
    Expr lhs = disjunction();
    if (accept("->")) return Expr::binary(Expr::Op::kImplies, std::move(lhs), implication());
    return lhs;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (accept("|")) lhs = Expr::binary(Expr::Op::kOr, std::move(lhs), conjunction());
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = unary();
    while (accept("&")) lhs = Expr::binary(Expr::Op::kAnd, std::move(lhs), unary());
    return lhs;
  }

  Expr unary() {
    if (accept("!")) return Expr::negation(unary());
    return atom();
  }

  Expr atom() {
    skip_ws();
    std::size_t at = pos_;
    if (accept("(")) {
      Expr e = formula();
      expect(')');
      return e;
    }
    if (accept("true")) return Expr::constant(true);
    if (accept("false")) return Expr::constant(false);
    if (peek_tail_var()) {
      ++pos_;
      if (accept(">=")) return Expr::at_least(number());
      if (accept("%")) {
        std::size_t mod_at = pos_;
        std::uint64_t m = number();
        expect('=');
        std::uint64_t r = number();
        if (m == 0) throw ValidationError("zero period in y%0 at position " + std::to_string(mod_at));
        if (m > options_.max_modulus) {
          throw ValidationError("modulus " + std::to_string(m) + " exceeds limit " +
                                std::to_string(options_.max_modulus));
        }
        if (r >= m) {
          throw ValidationError("residue " + std::to_string(r) + " not below modulus " +
                                std::to_string(m));
        }
        return Expr::residue(m, r);
      }
      throw ParseError("expected '>=' or '%' after y", pos_);
    }
    std::string name = ident();
    if (name.empty()) throw ParseError("expected atom", at);
    auto it = std::find_if(prefix_->begin(), prefix_->end(),
                           [&](const Binder& b) { return b.name == name; });
    if (it == prefix_->end()) throw ValidationError("unbound set variable " + name);
    expect('(');
    std::size_t idx_at = pos_;
    std::uint64_t j = number();
    expect(')');
    if (j >= options_.max_window) {
      throw ValidationError("bit " + name + "(" + std::to_string(j) + ") outside window of " +
                            std::to_string(options_.max_window) + " at position " +
                            std::to_string(idx_at));
    }
    return Expr::bit(static_cast<std::uint32_t>(it - prefix_->begin()), j);
  }

  std::string_view text_;
  ParseOptions options_;
  std::size_t pos_ = 0;
  const std::vector<Binder>* prefix_ = nullptr;
};

}  // namespace

Sentence parse_sentence(std::string_view text, const ParseOptions& options) {
  return SentenceParser(text, options).parse();
}

std::string render_matrix(const Sentence& s) {
  std::string out;
  render(s.matrix.root(), s.prefix, out);
  return out;
}

std::string render_sentence(const Sentence& s) {
  std::string out;
  for (const Binder& b : s.prefix) {
    out += b.quantifier == Quantifier::kExists ? "EX " : "AA ";
    out += b.name;
    out += ". ";
  }
  out += "AA y. ";
  render(s.matrix.root(), s.prefix, out);
  return out;
}

}  // namespace finitist::formulas
