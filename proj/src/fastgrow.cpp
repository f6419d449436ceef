#include "finitist/fastgrow.hpp"

#include <cctype>
#include <sstream>

#include "finitist/errors.hpp"

namespace finitist::fastgrow {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kPlain:
      return "plain";
    case Variant::kStrict:
      return "strict";
    case Variant::kMonotone:
      return "monotone";
  }
  return "plain";
}

Variant parse_variant(std::string_view name) {
  if (name == "plain") return Variant::kPlain;
  if (name == "strict") return Variant::kStrict;
  if (name == "monotone") return Variant::kMonotone;
  throw ValidationError("unknown sequence variant '" + std::string(name) + "'");
}

const Natural& FastSeq::clamped(std::size_t i) const {
  if (values.empty()) throw ContractViolation("empty sequence");
  return i < values.size() ? values[i] : values.back();
}

namespace {

// Next value of the minimal recurrence; `prev` is empty for the first value.
Natural next_value(const RateFunction& f, const Natural* prev, Variant variant,
                   std::uint64_t margin, std::size_t index, const NumberBudget& budget) {
  Natural v;
  switch (variant) {
    case Variant::kPlain:
      v = f(prev ? *prev : Natural(0), budget) + margin;
      break;
    case Variant::kStrict:
      v = f(prev ? *prev : Natural(0), budget) + (margin - 1);
      break;
    case Variant::kMonotone:
      v = Natural(margin - 1) + index;
      break;
  }
  check_budget(v, budget);
  return v;
}

}  // namespace

FastSeq make_fastseq(const RateFunction& f, std::size_t length, Variant variant,
                     std::uint64_t margin, const NumberBudget& budget) {
  return make_fastseq_above(f, length, Natural(-1), variant, margin, budget);
}

FastSeq make_fastseq_above(const RateFunction& f, std::size_t length, const Natural& floor,
                           Variant variant, std::uint64_t margin, const NumberBudget& budget) {
  if (length == 0) throw ContractViolation("sequence length must be at least 1");
  if (margin == 0) throw ContractViolation("margin must be at least 1");
  FastSeq out;
  out.rate = f;
  out.variant = variant;
  Natural prev;
  bool have_prev = false;
  std::size_t index = 0;
  // Skip values up to the floor; the recurrence itself is unchanged.
  for (;;) {
    Natural v = next_value(f, have_prev ? &prev : nullptr, variant, margin, index++, budget);
    if (have_prev && v <= prev) {
      throw ContractViolation("rate " + f.id() + " does not grow under variant " +
                              variant_name(variant));
    }
    prev = v;
    have_prev = true;
    if (v > floor) break;
  }
  out.values.push_back(prev);
  while (out.values.size() < length) {
    Natural v = next_value(f, &prev, variant, margin, index++, budget);
    if (v <= prev) {
      throw ContractViolation("rate " + f.id() + " does not grow under variant " +
                              variant_name(variant));
    }
    out.values.push_back(v);
    prev = v;
  }
  return out;
}

CheckResult check_fastseq(const std::vector<Natural>& s, const RateFunction& f, Variant variant,
                          const NumberBudget& budget) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    bool ok;
    if (variant == Variant::kMonotone) {
      ok = i == 0 || s[i] > s[i - 1];
    } else {
      Natural bound = f(i == 0 ? Natural(0) : s[i - 1], budget);
      ok = variant == Variant::kPlain ? s[i] > bound : s[i] >= bound;
    }
    if (!ok) return {false, i};
  }
  return {true, std::nullopt};
}

std::string to_lines(const std::vector<Natural>& values) {
  std::string out;
  for (const auto& v : values) out += v.str() + "\n";
  return out;
}

std::vector<Natural> from_lines(std::string_view text) {
  std::vector<Natural> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    std::size_t line_start = pos;
    pos = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    if (line.empty()) continue;
    for (char c : line) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ParseError("expected a natural number per line", line_start);
      }
    }
    out.emplace_back(std::string(line));
  }
  return out;
}

// ---- level-k ----------------------------------------------------------------

std::uint32_t shape_level(const Shape& s) {
  return s.blocks.empty() ? 1 : 1 + shape_level(s.blocks.front());
}

namespace {

void collect(const LevelKNode& node, std::uint32_t level, std::vector<Natural>& flat) {
  if (level == 1) {
    if (node.numbers.empty() || !node.children.empty()) {
      throw ContractViolation("level-1 block must hold at least one number and no children");
    }
    flat.insert(flat.end(), node.numbers.begin(), node.numbers.end());
    return;
  }
  if (node.children.empty() || !node.numbers.empty()) {
    throw ContractViolation("level-" + std::to_string(level) +
                            " block must hold at least one sub-block and no numbers");
  }
  for (const auto& c : node.children) collect(c, level - 1, flat);
}

Shape node_shape(const LevelKNode& node, std::uint32_t level) {
  Shape s;
  if (level == 1) {
    s.length = node.numbers.size();
    return s;
  }
  for (const auto& c : node.children) s.blocks.push_back(node_shape(c, level - 1));
  s.length = s.blocks.size();
  return s;
}

void fill(const Shape& shape, std::uint32_t level, const std::vector<Natural>& flat,
          std::size_t& next, LevelKNode& node) {
  if (level == 1) {
    if (!shape.blocks.empty()) throw ContractViolation("shape is deeper than k");
    if (shape.length == 0) throw ContractViolation("zero-length block in shape");
    for (std::size_t i = 0; i < shape.length; ++i) node.numbers.push_back(flat[next++]);
    return;
  }
  if (shape.blocks.empty()) throw ContractViolation("zero-length block in shape");
  for (const auto& b : shape.blocks) {
    node.children.emplace_back();
    fill(b, level - 1, flat, next, node.children.back());
  }
}

std::size_t shape_count(const Shape& s) {
  if (s.blocks.empty()) return s.length;
  std::size_t n = 0;
  for (const auto& b : s.blocks) n += shape_count(b);
  return n;
}

}  // namespace

LevelKSeq from_tree(std::uint32_t k, LevelKNode root) {
  if (k == 0) throw ContractViolation("level must be at least 1");
  LevelKSeq s;
  s.k = k;
  collect(root, k, s.flat);
  for (std::size_t i = 1; i < s.flat.size(); ++i) {
    if (s.flat[i] <= s.flat[i - 1]) {
      throw ContractViolation("numbers of a level-k sequence must strictly increase");
    }
  }
  s.root = std::move(root);
  return s;
}

Shape shape_of(const LevelKSeq& s) { return node_shape(s.root, s.k); }

LevelKSeq make_levelk(const RateFunction& f, std::uint32_t k, const Shape& shape,
                      std::uint64_t margin, const NumberBudget& budget) {
  if (k == 0) throw ContractViolation("level must be at least 1");
  // Shape depth is checked by fill(); count first so zero blocks surface
  // before any large arithmetic.
  const std::size_t n = shape_count(shape);
  if (n == 0) throw ContractViolation("zero-length block in shape");
  FastSeq seq = make_fastseq(f, n, Variant::kPlain, margin, budget);
  LevelKNode root;
  std::size_t next = 0;
  fill(shape, k, seq.values, next, root);
  return from_tree(k, std::move(root));
}

CheckResult check_levelk(const LevelKSeq& s, const RateFunction& f, const NumberBudget& budget) {
  return check_fastseq(s.flat, f, Variant::kPlain, budget);
}

namespace {

// Number of levels closed by each flat element, in order.
void closings(const LevelKNode& node, std::uint32_t level, std::vector<std::uint32_t>& out) {
  if (level == 1) {
    for (std::size_t i = 0; i < node.numbers.size(); ++i) out.push_back(0);
  } else {
    for (const auto& c : node.children) closings(c, level - 1, out);
  }
  out.back() += 1;
}

}  // namespace

std::vector<std::uint32_t> encode_levelk(const LevelKSeq& s, Terminal terminal,
                                         std::size_t max_positions) {
  if (s.flat.empty()) throw ContractViolation("empty level-k sequence");
  const Natural& top = s.flat.back();
  if (top + 1 > Natural(max_positions)) {
    throw BudgetExceeded("encoding needs " + Natural(top + 1).str() + " positions");
  }
  std::vector<std::uint32_t> closed;
  closings(s.root, s.k, closed);
  std::vector<std::uint32_t> code(static_cast<std::size_t>(top) + 1, 0);
  for (std::size_t i = 0; i < s.flat.size(); ++i) {
    code[static_cast<std::size_t>(s.flat[i])] = 1 + closed[i];
  }
  if (terminal == Terminal::kK) code.back() = s.k;
  return code;
}

LevelKSeq decode_levelk(const std::vector<std::uint32_t>& code, std::uint32_t k,
                        Terminal terminal) {
  if (k == 0) throw ContractViolation("level must be at least 1");
  // open[i] is the level-(i+1) block under construction.
  std::vector<LevelKNode> open(k);
  std::optional<LevelKNode> done;
  std::size_t last = code.size();
  for (std::size_t x = 0; x < code.size(); ++x) {
    const std::uint32_t g = code[x];
    if (g == 0) continue;
    if (done) throw ParseError("value after the terminal position", x);
    if (g > k + 1) throw ParseError("code value exceeds k+1", x);
    if (terminal == Terminal::kK && g == k + 1) throw ParseError("code value exceeds k", x);
    open[0].numbers.emplace_back(x);
    last = x;
    const std::uint32_t closes = g - 1;
    for (std::uint32_t i = 0; i < closes; ++i) {
      if (i + 1 < k) {
        open[i + 1].children.push_back(std::move(open[i]));
        open[i] = LevelKNode{};
      } else {
        done = std::move(open[i]);
        open[i] = LevelKNode{};
      }
    }
  }
  if (terminal == Terminal::kK && !done && last < code.size() && code[last] == k) {
    // The end of the list closes the top level.
    done = std::move(open[k - 1]);
    open[k - 1] = LevelKNode{};
  }
  if (!done) {
    throw ParseError(terminal == Terminal::kKPlusOne ? "missing terminal value k+1"
                                                     : "missing terminal value k",
                     code.size());
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    if (!open[i].numbers.empty() || !open[i].children.empty()) {
      throw ParseError("unterminated block", code.size());
    }
  }
  return from_tree(k, std::move(*done));
}

// ---- tuple text -------------------------------------------------------------

namespace {

struct Item {
  bool is_number = false;
  Natural number;
  LevelKNode node;
  std::uint32_t level = 0;  // level of `node`
};

class TupleParser {
 public:
  explicit TupleParser(std::string_view text) : text_(text) {}

  std::optional<Item> parse_whole() {
    skip_ws();
    Item it = item();
    skip_ws();
    if (pos_ != text_.size()) return std::nullopt;
    return it;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Item item() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const std::size_t at = pos_++;
      std::vector<Item> items;
      for (;;) {
        items.push_back(item());
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < text_.size() && text_[pos_] == ')') {
          ++pos_;
          break;
        }
        throw ParseError("expected ',' or ')'", pos_);
      }
      Item out;
      if (items.front().is_number) {
        for (auto& i : items) {
          if (!i.is_number) throw ParseError("mixed numbers and blocks", at);
          out.node.numbers.push_back(i.number);
        }
        out.level = 1;
      } else {
        out.level = items.front().level + 1;
        for (auto& i : items) {
          if (i.is_number || i.level + 1 != out.level) {
            throw ParseError("blocks of different depth", at);
          }
          out.node.children.push_back(std::move(i.node));
        }
      }
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected number or '('", pos_);
    Item out;
    out.is_number = true;
    out.number = Natural(std::string(text_.substr(start, pos_ - start)));
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void render_node(const LevelKNode& node, std::uint32_t level, std::string& out) {
  out += '(';
  if (level == 1) {
    for (std::size_t i = 0; i < node.numbers.size(); ++i) {
      if (i) out += ',';
      out += node.numbers[i].str();
    }
  } else {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i) out += ',';
      render_node(node.children[i], level - 1, out);
    }
  }
  out += ')';
}

}  // namespace

LevelKSeq parse_levelk(std::string_view text) {
  if (auto it = TupleParser(text).parse_whole(); it && !it->is_number) {
    return from_tree(it->level, std::move(it->node));
  }
  const std::string wrapped = "(" + std::string(text) + ")";
  auto it = TupleParser(wrapped).parse_whole();
  if (!it) throw ParseError("trailing characters after nested sequence", text.size());
  try {
    return from_tree(it->level, std::move(it->node));
  } catch (const ContractViolation& ex) {
    throw ValidationError(ex.what());
  }
}

std::string render_levelk(const LevelKSeq& s) {
  std::string out;
  render_node(s.root, s.k, out);
  return out;
}

Shape random_shape(std::mt19937_64& rng, std::uint32_t k, std::size_t max_width) {
  if (k == 0 || max_width == 0) throw ContractViolation("random_shape needs k, width >= 1");
  Shape s;
  s.length = 1 + rng() % max_width;
  if (k == 1) return s;
  for (std::size_t i = 0; i < s.length; ++i) s.blocks.push_back(random_shape(rng, k - 1, max_width));
  return s;
}

}  // namespace finitist::fastgrow
