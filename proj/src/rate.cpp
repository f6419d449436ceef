#include "finitist/rate.hpp"

#include <cctype>
#include <limits>
#include <variant>

#include "finitist/errors.hpp"

namespace finitist {

namespace {

enum class Kind { kIdentity, kAffine, kPower, kExp, kCompose, kMax, kShift, kIterate, kAdd };

}  // namespace

struct RateFunction::Node {
  Kind kind = Kind::kIdentity;
  std::uint64_t param = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

void check_budget(const Natural& value, const NumberBudget& budget) {
  if (value > 0 && boost::multiprecision::msb(value) + 1 > budget.max_bits) {
    throw BudgetExceeded("natural number exceeds " +
                         std::to_string(budget.max_bits) + "-bit budget");
  }
}

std::uint64_t to_u64(const Natural& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) {
    throw BudgetExceeded("natural number does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(value);
}

namespace {

using NodePtr = std::shared_ptr<const RateFunction::Node>;

Natural eval(const RateFunction::Node& n, const Natural& x, const NumberBudget& budget) {
  Natural r;
  switch (n.kind) {
    case Kind::kIdentity:
      r = x;
      break;
    case Kind::kAffine:
      r = Natural(n.param) * (x + 1);
      break;
    case Kind::kPower: {
      // bits(x^d) <= d * bits(x)
      std::size_t bits = x > 0 ? boost::multiprecision::msb(x) + 1 : 0;
      if (bits > 0 && (bits - 1) * n.param + 1 > budget.max_bits) {
        throw BudgetExceeded("pow result exceeds budget");
      }
      r = boost::multiprecision::pow(x, static_cast<unsigned>(n.param));
      break;
    }
    case Kind::kExp: {
      if (n.param <= 1) {
        r = n.param;
        break;
      }
      std::size_t base_bits = boost::multiprecision::msb(Natural(n.param));
      if (x > Natural(budget.max_bits) ||
          static_cast<std::size_t>(x) * base_bits > budget.max_bits) {
        throw BudgetExceeded("exp result exceeds budget");
      }
      r = boost::multiprecision::pow(Natural(n.param), static_cast<unsigned>(x));
      break;
    }
    case Kind::kCompose:
      r = eval(*n.lhs, eval(*n.rhs, x, budget), budget);
      break;
    case Kind::kMax: {
      Natural a = eval(*n.lhs, x, budget);
      Natural b = eval(*n.rhs, x, budget);
      r = a > b ? a : b;
      break;
    }
    case Kind::kShift:
      r = eval(*n.lhs, x + n.param, budget);
      break;
    case Kind::kAdd:
      r = eval(*n.lhs, x, budget) + n.param;
      break;
    case Kind::kIterate:
      r = x;
      for (std::uint64_t i = 0; i < n.param; ++i) r = eval(*n.lhs, r, budget);
      break;
  }
  check_budget(r, budget);
  return r;
}

class IdParser {
 public:
  explicit IdParser(std::string_view text) : text_(text) {}

  std::pair<NodePtr, std::string> parse_all() {
    auto result = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters in rate id", pos_);
    return result;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected number in rate id", pos_);
    return v;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "' in rate id", pos_);
    }
    ++pos_;
  }

  std::pair<NodePtr, std::string> parse() {
    std::size_t at = pos_;
    std::string name = word();
    auto node = std::make_shared<RateFunction::Node>();
    if (name == "id") {
      node->kind = Kind::kIdentity;
      return {node, "id"};
    }
    if (name == "affine" || name == "pow" || name == "exp") {
      expect(':');
      node->param = number();
      node->kind = name == "affine" ? Kind::kAffine : name == "pow" ? Kind::kPower : Kind::kExp;
      return {node, name + ":" + std::to_string(node->param)};
    }
    if (name == "compose" || name == "max") {
      expect('(');
      auto [a, ida] = parse();
      expect(',');
      auto [b, idb] = parse();
      expect(')');
      node->kind = name == "compose" ? Kind::kCompose : Kind::kMax;
      node->lhs = a;
      node->rhs = b;
      return {node, name + "(" + ida + "," + idb + ")"};
    }
    if (name == "shift" || name == "iterate" || name == "add") {
      expect('(');
      node->param = number();
      expect(',');
      auto [a, ida] = parse();
      expect(')');
      node->kind = name == "shift"     ? Kind::kShift
                   : name == "iterate" ? Kind::kIterate
                                       : Kind::kAdd;
      node->lhs = a;
      return {node, name + "(" + std::to_string(node->param) + "," + ida + ")"};
    }
    throw ParseError("unknown rate function '" + name + "'", at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RateFunction RateFunction::parse(std::string_view id) {
  auto [node, canonical] = IdParser(id).parse_all();
  return RateFunction(node, canonical);
}

RateFunction RateFunction::affine(std::uint64_t c) { return parse("affine:" + std::to_string(c)); }
RateFunction RateFunction::power(std::uint64_t d) { return parse("pow:" + std::to_string(d)); }
RateFunction RateFunction::exponential(std::uint64_t base) {
  return parse("exp:" + std::to_string(base));
}

RateFunction RateFunction::pointwise_max(const RateFunction& f, const RateFunction& g) {
  if (f == g) return f;
  auto node = std::make_shared<Node>();
  node->kind = Kind::kMax;
  node->lhs = f.node_;
  node->rhs = g.node_;
  return RateFunction(node, "max(" + f.id_ + "," + g.id_ + ")");
}

Natural RateFunction::operator()(const Natural& x, const NumberBudget& budget) const {
  return eval(*node_, x, budget);
}

std::uint64_t RateFunction::at(std::uint64_t x) const {
  return to_u64(eval(*node_, Natural(x), NumberBudget{64}));
}

}  // namespace finitist
