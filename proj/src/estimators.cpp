#include "finitist/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "finitist/errors.hpp"

namespace finitist::estimators {

using formulas::Quantifier;

Estimator Estimator::pair(std::uint64_t a, std::uint64_t b) {
  if (a >= b) {
    throw ContractViolation("level-0 estimator needs a < b, got (" + std::to_string(a) + "," +
                            std::to_string(b) + ")");
  }
  Estimator e;
  e.a_ = a;
  e.b_ = b;
  return e;
}

Estimator Estimator::set(std::uint32_t level, std::vector<Estimator> elements) {
  if (level == 0) throw ContractViolation("a set estimator has level >= 1");
  for (const auto& x : elements) {
    if (x.level() + 1 != level) {
      throw ContractViolation("level-" + std::to_string(level) +
                              " estimator cannot contain a level-" + std::to_string(x.level()) +
                              " element");
    }
  }
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  Estimator e;
  e.level_ = level;
  e.elements_ = std::move(elements);
  return e;
}

std::uint64_t Estimator::a() const {
  if (!is_pair()) throw ContractViolation("a() on a set estimator");
  return a_;
}

std::uint64_t Estimator::b() const {
  if (!is_pair()) throw ContractViolation("b() on a set estimator");
  return b_;
}

const std::vector<Estimator>& Estimator::elements() const {
  if (is_pair()) throw ContractViolation("elements() on a level-0 estimator");
  return elements_;
}

std::size_t Estimator::size() const {
  std::size_t n = 1;
  for (const auto& x : elements_) n += x.size();
  return n;
}

std::strong_ordering operator<=>(const Estimator& x, const Estimator& y) {
  if (auto c = x.level_ <=> y.level_; c != 0) return c;
  if (x.level_ == 0) {
    if (auto c = x.a_ <=> y.a_; c != 0) return c;
    return x.b_ <=> y.b_;
  }
  return std::lexicographical_compare_three_way(x.elements_.begin(), x.elements_.end(),
                                                y.elements_.begin(), y.elements_.end());
}

Estimator add_element(const Estimator& e, const Estimator& x) {
  if (e.is_pair()) throw ContractViolation("cannot add an element to a level-0 estimator");
  std::vector<Estimator> elems = e.elements();
  elems.push_back(x);
  return Estimator::set(e.level(), std::move(elems));
}

// ---- text and json ----------------------------------------------------------

namespace {

void write_text(const Estimator& e, std::string& out) {
  if (e.is_pair()) {
    out += "L0(" + std::to_string(e.a()) + "," + std::to_string(e.b()) + ")";
    return;
  }
  if (e.elements().empty()) {
    out += "L" + std::to_string(e.level()) + "{}";
    return;
  }
  out += '{';
  bool first = true;
  for (const auto& x : e.elements()) {
    if (!first) out += ',';
    first = false;
    write_text(x, out);
  }
  out += '}';
}

class TextParser {
 public:
  explicit TextParser(std::string_view text) : text_(text) {}

  Estimator parse_all() {
    Estimator e = parse();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing characters after estimator", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (start == pos_) throw ParseError("expected number", pos_);
    return v;
  }

  Estimator parse() {
    skip_ws();
    std::size_t at = pos_;
    if (accept('L')) {
      std::uint64_t level = number();
      if (level == 0) {
        expect('(');
        std::uint64_t a = number();
        expect(',');
        std::uint64_t b = number();
        expect(')');
        if (a >= b) throw ParseError("level-0 estimator needs a < b", at);
        return Estimator::pair(a, b);
      }
      expect('{');
      expect('}');
      return Estimator::set(static_cast<std::uint32_t>(level), {});
    }
    expect('{');
    std::vector<Estimator> elems;
    do {
      elems.push_back(parse());
    } while (accept(','));
    expect('}');
    std::uint32_t level = elems.front().level() + 1;
    for (const auto& x : elems) {
      if (x.level() + 1 != level) throw ParseError("mixed element levels in estimator", at);
    }
    return Estimator::set(level, std::move(elems));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_text(const Estimator& e) {
  std::string out;
  write_text(e, out);
  return out;
}

Estimator from_text(std::string_view text) { return TextParser(text).parse_all(); }

nlohmann::json to_json(const Estimator& e) {
  if (e.is_pair()) return {{"a", e.a()}, {"b", e.b()}};
  nlohmann::json elems = nlohmann::json::array();
  for (const auto& x : e.elements()) elems.push_back(to_json(x));
  return {{"level", e.level()}, {"elements", elems}};
}

Estimator from_json(const nlohmann::json& j) {
  try {
    if (j.contains("a")) return Estimator::pair(j.at("a").get<std::uint64_t>(),
                                                j.at("b").get<std::uint64_t>());
    std::vector<Estimator> elems;
    for (const auto& x : j.at("elements")) elems.push_back(from_json(x));
    return Estimator::set(j.at("level").get<std::uint32_t>(), std::move(elems));
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("bad estimator json: ") + ex.what());
  } catch (const ContractViolation& ex) {
    throw ValidationError(std::string("bad estimator json: ") + ex.what());
  }
}

// ---- notions ----------------------------------------------------------------

std::uint32_t NotionParams::cover(std::uint32_t level) const {
  if (level < cover_schedule.size() && cover_schedule[level] > 0) return cover_schedule[level];
  return 1;
}

std::string NotionParams::describe() const {
  std::ostringstream out;
  out << "a_min=" << a_min << " rate=" << rate.id();
  if (!cover_schedule.empty()) {
    out << " cover=";
    for (std::size_t i = 0; i < cover_schedule.size(); ++i) {
      out << (i ? "," : "") << cover_schedule[i];
    }
  }
  return out.str();
}

void validate_params(const NotionParams& p) {
  std::uint64_t prev = 0;
  for (std::uint64_t x = p.a_min; x < p.a_min + 32; ++x) {
    std::uint64_t v;
    try {
      v = p.rate.at(x);
    } catch (const BudgetExceeded&) {
      return;  // grows past 64 bits; certainly increasing
    }
    if (v <= x && x >= 2) {
      throw ContractViolation("rate " + p.rate.id() + " has f(" + std::to_string(x) +
                              ") <= " + std::to_string(x));
    }
    if (x > p.a_min && v < prev) throw ContractViolation("rate " + p.rate.id() + " decreases");
    prev = v;
  }
}

bool is_valid_level0(const Estimator& e, const NotionParams& p) {
  if (!e.is_pair() || e.a() < p.a_min) return false;
  try {
    return e.b() >= p.rate.at(e.a());
  } catch (const BudgetExceeded&) {
    return false;
  }
}

bool is_valid(const Estimator& e, const NotionParams& p) {
  if (e.is_pair()) return is_valid_level0(e, p);
  if (e.elements().empty() && !p.allow_empty) return false;
  return std::all_of(e.elements().begin(), e.elements().end(),
                     [&](const Estimator& x) { return is_valid(x, p); });
}

NotionParams intersect_params(const NotionParams& p, const NotionParams& q) {
  NotionParams r;
  r.a_min = std::max(p.a_min, q.a_min);
  r.rate = RateFunction::pointwise_max(p.rate, q.rate);
  r.cover_schedule.resize(std::max(p.cover_schedule.size(), q.cover_schedule.size()), 0);
  for (std::size_t i = 0; i < r.cover_schedule.size(); ++i) {
    std::uint32_t a = i < p.cover_schedule.size() ? p.cover_schedule[i] : 0;
    std::uint32_t b = i < q.cover_schedule.size() ? q.cover_schedule[i] : 0;
    r.cover_schedule[i] = std::max(a, b);
  }
  r.allow_empty = p.allow_empty && q.allow_empty;
  return r;
}

bool membership_contained(const NotionParams& stricter, const NotionParams& laxer,
                          std::uint64_t limit) {
  if (stricter.a_min < laxer.a_min && stricter.a_min < limit) return false;
  for (std::uint64_t a = stricter.a_min; a < limit; ++a) {
    std::uint64_t fs, fl;
    try {
      fs = stricter.rate.at(a);
    } catch (const BudgetExceeded&) {
      continue;  // no stricter pair with this a fits in 64 bits
    }
    try {
      fl = laxer.rate.at(a);
    } catch (const BudgetExceeded&) {
      return false;
    }
    if (fs < fl) return false;
  }
  return true;
}

// ---- acceptance -------------------------------------------------------------

namespace {

bool pair_passes(const formulas::Matrix& m, const Estimator& e, const WitnessAssignment& a) {
  // Past max(a, t) the matrix repeats with period m, so one period suffices.
  const std::uint64_t start = e.a();
  const std::uint64_t cutoff = std::max(start, m.threshold()) + m.period();
  const std::uint64_t stop = std::min(e.b(), cutoff);
  for (std::uint64_t y = start; y < stop; ++y) {
    if (formulas::eval_matrix(m, y, a)) return true;
  }
  return false;
}

bool passes_rec(const Sentence& s, std::size_t from, const Estimator& e, WitnessAssignment& a) {
  if (from == s.depth()) return pair_passes(s.matrix, e, a);
  const bool exists = s.prefix[from].quantifier == Quantifier::kExists;
  const std::uint32_t count = 1u << a.width;
  for (std::uint32_t p = 0; p < count; ++p) {
    a.patterns[from] = p;
    bool v;
    if (exists) {
      v = std::all_of(e.elements().begin(), e.elements().end(),
                      [&](const Estimator& x) { return passes_rec(s, from + 1, x, a); });
    } else {
      v = std::any_of(e.elements().begin(), e.elements().end(),
                      [&](const Estimator& x) { return passes_rec(s, from + 1, x, a); });
    }
    if (exists && v) return true;
    if (!exists && !v) return false;
  }
  return !exists;
}

WitnessAssignment normalized(const Sentence& s, WitnessAssignment a) {
  a.width = s.matrix.window();
  if (a.patterns.size() < s.depth()) a.patterns.resize(s.depth(), 0);
  return a;
}

void check_level(const Sentence& s, std::size_t from, const Estimator& e) {
  if (from > s.depth() || e.level() != s.depth() - from) {
    throw ContractViolation("estimator level " + std::to_string(e.level()) + " does not match " +
                            std::to_string(s.depth() - std::min(from, s.depth())) +
                            " remaining quantifiers");
  }
}

}  // namespace

bool passes(const Sentence& s, std::size_t from, const Estimator& e,
            const WitnessAssignment& partial) {
  check_level(s, from, e);
  WitnessAssignment a = normalized(s, partial);
  return passes_rec(s, from, e, a);
}

bool truth_by_estimator(const Sentence& s, const Estimator& e) {
  return passes(s, 0, e, WitnessAssignment{});
}

Estimator decisive_pair(const Sentence& s, const NotionParams& p, std::uint64_t variant) {
  const std::uint64_t a = std::max(p.a_min, s.matrix.threshold()) + variant;
  const std::uint64_t b = std::max(p.rate.at(a), a + s.matrix.period());
  return Estimator::pair(a, b);
}

Estimator decisive_estimator(const Sentence& s, const NotionParams& p, std::uint32_t level,
                             std::uint64_t variant) {
  if (level == 0) return decisive_pair(s, p, variant);
  std::vector<Estimator> elems;
  for (std::uint32_t i = 0; i < p.cover(level); ++i) {
    elems.push_back(decisive_estimator(s, p, level - 1, variant + i));
  }
  return Estimator::set(level, std::move(elems));
}

Estimator minimal_estimator(const NotionParams& p, std::uint32_t level) {
  if (level == 0) return Estimator::pair(p.a_min, std::max(p.rate.at(p.a_min), p.a_min + 1));
  return Estimator::set(level, {minimal_estimator(p, level - 1)});
}

// ---- saturation -------------------------------------------------------------

namespace {

struct Saturator {
  const Sentence& s;
  const NotionParams& p;
  SaturationStats stats;
  bool stuck = false;

  Estimator reference(std::size_t from) const {
    return decisive_estimator(s, p, static_cast<std::uint32_t>(s.depth() - from));
  }

  // Replacement for e at node (from, a) when its verdict disagrees with the
  // decisive reference; nullopt when they agree or no repair exists (then
  // `stuck` is set).
  std::optional<Estimator> repair(std::size_t from, const Estimator& e, WitnessAssignment& a) {
    const bool cur = passes_rec(s, from, e, a);
    const Estimator ref = reference(from);
    const bool want = passes_rec(s, from, ref, a);
    if (cur == want) return std::nullopt;
    if (from == s.depth()) {
      stuck = true;
      return std::nullopt;
    }
    const bool exists = s.prefix[from].quantifier == Quantifier::kExists;
    const Estimator child_ref = reference(from + 1);
    // Existential accepting falsely, or universal rejecting falsely: a
    // decisive child settles every pattern correctly.
    if (exists == cur) {
      ++stats.repairs;
      return add_element(e, child_ref);
    }
    // Otherwise some pattern whose true value is `want` is judged wrongly
    // because of one particular element; repair that element.
    const std::uint32_t count = 1u << a.width;
    const std::uint32_t saved = a.patterns[from];
    for (std::uint32_t pat = 0; pat < count; ++pat) {
      a.patterns[from] = pat;
      if (passes_rec(s, from + 1, child_ref, a) != want) continue;
      for (const auto& x : e.elements()) {
        if (passes_rec(s, from + 1, x, a) == want) continue;
        auto fixed = repair(from + 1, x, a);
        if (fixed) {
          a.patterns[from] = saved;
          std::vector<Estimator> elems;
          for (const auto& y : e.elements()) {
            if (!(y == x)) elems.push_back(y);
          }
          elems.push_back(*fixed);
          return Estimator::set(e.level(), std::move(elems));
        }
      }
    }
    a.patterns[from] = saved;
    stuck = true;
    return std::nullopt;
  }

  // Pads every set node up to its cover width with decisive elements.
  Estimator pad(const Estimator& e, std::size_t from) {
    if (e.is_pair()) return e;
    std::vector<Estimator> elems;
    for (const auto& x : e.elements()) elems.push_back(pad(x, from + 1));
    const std::uint32_t want = p.cover(e.level());
    std::uint64_t variant = 0;
    Estimator out = Estimator::set(e.level(), elems);
    while (out.elements().size() < want) {
      Estimator extra = decisive_estimator(s, p, e.level() - 1, variant++);
      Estimator next = add_element(out, extra);
      if (next.elements().size() > out.elements().size()) ++stats.padded;
      out = std::move(next);
    }
    return out;
  }
};

}  // namespace

Estimator saturate(const Sentence& s, const NotionParams& p, const std::optional<Estimator>& seed,
                   const SaturationOptions& options, SaturationStats* stats) {
  validate_params(p);
  const auto n = static_cast<std::uint32_t>(s.depth());
  if (seed) check_level(s, 0, *seed);
  if (n == 0) {
    // A pair cannot be extended; the decisive pair is the only safe answer.
    if (stats) *stats = {};
    return decisive_pair(s, p);
  }
  Saturator sat{s, p, {}};
  Estimator e = seed ? sat.pad(*seed, 0) : Estimator::set(n, {});
  WitnessAssignment a = normalized(s, WitnessAssignment{});
  std::size_t iterations = 0;
  for (;;) {
    while (auto fixed = sat.repair(0, e, a)) {
      e = std::move(*fixed);
      if (++iterations > options.max_iterations) {
        throw NonConvergence("saturation exceeded " + std::to_string(options.max_iterations) +
                             " repairs");
      }
    }
    if (sat.stuck) {
      throw NonConvergence("seed contains a level-0 estimator that cannot be repaired by adding");
    }
    Estimator padded = sat.pad(e, 0);
    if (padded == e) break;
    e = std::move(padded);
  }
  if (stats) *stats = sat.stats;
  return e;
}

std::size_t stabilization_index(const std::vector<bool>& values) {
  if (values.empty()) return 0;
  std::size_t i = values.size() - 1;
  while (i > 0 && values[i - 1] == values.back()) --i;
  return i;
}

SweepResult stabilization_sweep(const Sentence& s, const std::vector<NotionParams>& schedule,
                                const SaturationOptions& options) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!membership_contained(schedule[i], schedule[i - 1])) {
      throw ContractViolation("schedule entry " + std::to_string(i) +
                              " is not stricter than its predecessor");
    }
  }
  SweepResult r;
  const auto n = static_cast<std::uint32_t>(s.depth());
  for (const auto& p : schedule) {
    r.verdicts.push_back(truth_by_estimator(s, saturate(s, p, std::nullopt, options)));
    r.minimal_verdicts.push_back(truth_by_estimator(s, minimal_estimator(p, n)));
  }
  r.stabilization_index = stabilization_index(r.verdicts);
  r.minimal_stabilization_index = stabilization_index(r.minimal_verdicts);
  return r;
}

Estimator random_sufficient_element(const Sentence& s, const NotionParams& p,
                                    std::uint32_t level, std::mt19937_64& rng) {
  if (level == 0) {
    Estimator d = decisive_pair(s, p, rng() % 8);
    return Estimator::pair(d.a(), d.b() + rng() % 16);
  }
  std::vector<Estimator> elems;
  const std::uint64_t count = 1 + rng() % 3;
  for (std::uint64_t i = 0; i < count; ++i) {
    elems.push_back(random_sufficient_element(s, p, level - 1, rng));
  }
  return Estimator::set(level, std::move(elems));
}

}  // namespace finitist::estimators
