#include "finitist/corpus.hpp"

#include <set>
#include <sstream>

#include "finitist/errors.hpp"

namespace finitist::cli {

using formulas::Expr;
using formulas::Quantifier;
using formulas::Sentence;

namespace {

struct Generator {
  std::mt19937_64& rng;
  const CorpusLimits& limits;
  std::uint32_t vars;
  std::uint32_t window;
  std::uint64_t base_period;

  std::uint64_t pick(std::uint64_t n) { return rng() % n; }

  Expr atom() {
    const std::uint64_t roll = pick(10);
    if (vars > 0 && roll < 5) {
      return Expr::bit(static_cast<std::uint32_t>(pick(vars)), pick(window));
    }
    if (roll < 7) return Expr::at_least(pick(limits.max_threshold + 1));
    if (roll < 9) {
      std::vector<std::uint64_t> divisors;
      for (std::uint64_t d = 1; d <= base_period; ++d) {
        if (base_period % d == 0) divisors.push_back(d);
      }
      const std::uint64_t m = divisors[pick(divisors.size())];
      return Expr::residue(m, pick(m));
    }
    return Expr::constant(pick(2) == 0);
  }

  Expr expr(std::uint32_t depth) {
    if (depth == 0 || pick(3) == 0) return atom();
    const std::uint64_t roll = pick(9);
    if (roll < 2) return Expr::negation(expr(depth - 1));
    static constexpr Expr::Op kOps[] = {Expr::Op::kAnd, Expr::Op::kAnd, Expr::Op::kOr,
                                        Expr::Op::kOr, Expr::Op::kImplies, Expr::Op::kIff,
                                        Expr::Op::kIff};
    Expr lhs = expr(depth - 1);
    Expr rhs = expr(depth - 1);
    return Expr::binary(kOps[roll - 2], std::move(lhs), std::move(rhs));
  }
};

}  // namespace

Sentence random_sentence(std::mt19937_64& rng, const CorpusLimits& limits) {
  Generator gen{rng, limits, 0, 1, 1};
  gen.vars = static_cast<std::uint32_t>(gen.pick(limits.max_quantifiers + 1));
  gen.window = 1 + static_cast<std::uint32_t>(gen.pick(limits.max_window));
  gen.base_period = 1 + gen.pick(limits.max_period);
  Sentence s;
  for (std::uint32_t i = 0; i < gen.vars; ++i) {
    s.prefix.push_back({gen.pick(2) ? Quantifier::kExists : Quantifier::kForall,
                        "X" + std::to_string(i + 1)});
  }
  s.matrix = formulas::Matrix(gen.expr(limits.max_depth));
  s.source = formulas::render_sentence(s);
  return s;
}

std::vector<CorpusEntry> hand_written_corpus() {
  static const std::pair<const char*, bool> kCases[] = {
      {"AA y. true", true},
      {"AA y. false", false},
      {"AA X. AA y. X(0) | !X(0)", true},
      {"EX X. AA y. X(0) & !X(0)", false},
      {"AA y. y>=8", true},
      {"AA y. !(y>=8)", false},
      {"AA y. y%6=5", true},
      {"AA y. y%2=0 & y%2=1", false},
      {"AA y. !(y%2=0)", true},
      {"EX X. AA y. X(0) & y%2=0", true},
      {"AA X. AA y. X(0) & y%2=0", false},
      {"AA X. EX Y. AA y. (X(0) <-> Y(0)) & y>=0", true},
      {"EX Y. AA X. AA y. X(0) <-> Y(0)", false},
      {"EX X. AA Y. AA y. X(1) -> Y(0)", true},
      {"AA X. EX Y. EX Z. AA y. (X(2) <-> !Y(2)) & (Z(0) | y>=7)", true},
      {"AA X. AA y. (y%3=0 <-> X(0)) & y%3=1", false},
  };
  std::vector<CorpusEntry> out;
  std::size_t i = 0;
  for (const auto& [text, truth] : kCases) {
    CorpusEntry e;
    e.id = "hand-" + std::to_string(i++);
    e.sentence = formulas::parse_sentence(text);
    e.truth = truth;
    e.hand_written = true;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, std::size_t count,
                                    const CorpusLimits& limits) {
  std::vector<CorpusEntry> out = hand_written_corpus();
  std::set<std::string> seen;
  for (const auto& e : out) seen.insert(formulas::render_sentence(e.sentence));
  std::mt19937_64 rng(seed);
  std::size_t made = 0;
  std::size_t attempts = 0;
  while (made < count && attempts < count * 100 + 100) {
    ++attempts;
    Sentence s = random_sentence(rng, limits);
    if (!seen.insert(s.source).second) continue;
    CorpusEntry e;
    e.id = "gen-" + std::to_string(made++);
    e.truth = formulas::brute_truth(s);
    e.sentence = std::move(s);
    out.push_back(std::move(e));
  }
  return out;
}

std::string write_corpus(const std::vector<CorpusEntry>& entries) {
  std::ostringstream out;
  out << "# truth<TAB>sentence\n";
  for (const auto& e : entries) {
    out << (e.truth ? 1 : 0) << '\t' << formulas::render_sentence(e.sentence) << '\n';
  }
  return out.str();
}

std::vector<CorpusEntry> read_corpus(std::string_view text) {
  std::vector<CorpusEntry> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "corpus line " + std::to_string(line_no);
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || (line.substr(0, tab) != "0" && line.substr(0, tab) != "1")) {
      throw ParseError(where + ": expected `<0|1>\\t<sentence>`", 0);
    }
    CorpusEntry e;
    e.id = "line-" + std::to_string(line_no);
    e.truth = line.substr(0, tab) == "1";
    try {
      e.sentence = formulas::parse_sentence(line.substr(tab + 1));
    } catch (const ParseError& ex) {
      throw ParseError(where + ": " + ex.what(), ex.position());
    } catch (const ValidationError& ex) {
      throw ValidationError(where + ": " + ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace finitist::cli
