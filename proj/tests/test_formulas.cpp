#include <doctest.h>

#include <random>

#include "finitist/corpus.hpp"
#include "finitist/errors.hpp"
#include "finitist/formulas.hpp"

using namespace finitist;
using namespace finitist::formulas;

namespace {

WitnessAssignment assignment(const Sentence& s, std::vector<std::uint32_t> patterns) {
  return WitnessAssignment{s.matrix.window(), std::move(patterns)};
}

// Holds infinitely often iff it holds somewhere far past every threshold,
// over a stretch longer than any period the generator produces.
bool scan_infinitely_often(const Matrix& m, const WitnessAssignment& a) {
  for (std::uint64_t y = 1000; y < 1000 + 720; ++y) {
    if (eval_matrix(m, y, a)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parse a one-quantifier sentence") {
  Sentence s = parse_sentence("EX X. AA y. X(0) & y%2=0");
  REQUIRE(s.depth() == 1);
  CHECK(s.prefix[0].quantifier == Quantifier::kExists);
  CHECK(s.prefix[0].name == "X");
  CHECK(s.matrix.window() == 1);
  CHECK(s.matrix.period() == 2);
  CHECK(s.matrix.threshold() == 0);
}

TEST_CASE("period zero and bad residues are rejected") {
  CHECK_THROWS_AS(parse_sentence("EX X. AA y. y%0=0"), ValidationError);
  CHECK_THROWS_AS(parse_sentence("AA y. y%3=3"), ValidationError);
  CHECK_THROWS_AS(parse_sentence("AA y. X(0)"), ValidationError);
  CHECK_THROWS_AS(parse_sentence("EX X. EX X. AA y. X(0)"), ValidationError);
  CHECK_THROWS_AS(parse_sentence("EX X. AA y. X(0) &"), ParseError);
  CHECK_THROWS_AS(parse_sentence("EX X AA y. true"), ParseError);
}

TEST_CASE("window bound") {
  ParseOptions opts;
  opts.max_window = 2;
  CHECK_NOTHROW(parse_sentence("EX X. AA y. X(1)", opts));
  CHECK_THROWS_AS(parse_sentence("EX X. AA y. X(2)", opts), ValidationError);
}

TEST_CASE("tail truth of simple tails") {
  Sentence even = parse_sentence("EX X. AA y. X(0) & y%2=0");
  CHECK(tail_truth(even.matrix, assignment(even, {1})));
  CHECK_FALSE(tail_truth(even.matrix, assignment(even, {0})));

  Sentence bounded = parse_sentence("AA y. !(y>=5)");
  CHECK_FALSE(tail_truth(bounded.matrix, assignment(bounded, {})));
  Sentence threshold = parse_sentence("AA y. y>=5 & y%3=1");
  CHECK(tail_truth(threshold.matrix, assignment(threshold, {})));
}

TEST_CASE("eval_matrix contract") {
  Sentence s = parse_sentence("EX X. EX Z. AA y. X(0) & Z(1)");
  CHECK_THROWS_AS(eval_matrix(s.matrix, 0, assignment(s, {1})), ContractViolation);
  CHECK_THROWS_AS(eval_matrix(s.matrix, 0, WitnessAssignment{5, {1, 1}}), ContractViolation);
  CHECK(eval_matrix(s.matrix, 0, assignment(s, {1, 2})));
}

TEST_CASE("brute truth of the identity-copy sentence") {
  CHECK(brute_truth(parse_sentence("AA X. EX Y. AA y. (X(0) <-> Y(0)) & y>=0")));
  CHECK_FALSE(brute_truth(parse_sentence("EX Y. AA X. AA y. X(0) <-> Y(0)")));
}

TEST_CASE("brute truth respects its budget") {
  TruthBudget tight;
  tight.max_assignment_bits = 2;
  CHECK_THROWS_AS(brute_truth(parse_sentence("EX X. EX Z. AA y. X(1) & Z(0)"), tight),
                  BudgetExceeded);
}

TEST_CASE("hand-written cases carry the right truth values") {
  for (const auto& e : cli::hand_written_corpus()) {
    INFO(e.sentence.source);
    CHECK(brute_truth(e.sentence) == e.truth);
  }
}

TEST_CASE("render and parse round trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Sentence s = cli::random_sentence(rng);
    Sentence back = parse_sentence(render_sentence(s));
    INFO(render_sentence(s));
    CHECK(same_sentence(s, back));
    CHECK(render_sentence(back) == render_sentence(s));
  }
}

TEST_CASE("tail truth agrees with a long direct scan") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Sentence s = cli::random_sentence(rng);
    const std::uint32_t count = 1u << s.matrix.window();
    WitnessAssignment a = assignment(s, std::vector<std::uint32_t>(s.depth()));
    for (auto& p : a.patterns) p = static_cast<std::uint32_t>(rng() % count);
    INFO(render_sentence(s));
    CHECK(tail_truth(s.matrix, a) == scan_infinitely_often(s.matrix, a));
  }
}

TEST_CASE("negation flips truth") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 150; ++i) {
    Sentence s = cli::random_sentence(rng);
    INFO(render_sentence(s));
    CHECK(brute_truth(negate(s)) == !brute_truth(s));
  }
  // Both y%2=0 and its plain negation hold infinitely often.
  Sentence even = parse_sentence("AA y. y%2=0");
  CHECK(brute_truth(even));
  CHECK_FALSE(brute_truth(negate(even)));
}

TEST_CASE("shifted tails agree with shifted evaluation") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    Sentence s = cli::random_sentence(rng);
    WitnessAssignment a = assignment(s, std::vector<std::uint32_t>(s.depth(), 1));
    for (std::uint64_t off = 0; off < 7; ++off) {
      Matrix shifted(shift_tail(s.matrix.root(), off));
      for (std::uint64_t y = 0; y < 30; ++y) {
        CHECK(eval_matrix(shifted, y, a) == eval_matrix(s.matrix, y + off, a));
      }
    }
  }
}

TEST_CASE("renaming preserves truth") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    Sentence s = cli::random_sentence(rng);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < s.depth(); ++k) names.push_back("V" + std::to_string(9 - k));
    Sentence r = rename_variables(s, names);
    CHECK(brute_truth(r) == brute_truth(s));
    CHECK(same_sentence(parse_sentence(render_sentence(r)), r));
  }
}

TEST_CASE("sentence size bounds the threshold") {
  Sentence s = parse_sentence("EX X. AA y. X(0) & y>=7");
  CHECK(sentence_size(s) == 1 + 3 + 7);
  CHECK(sentence_size(s) >= s.matrix.threshold());
}
