#include <doctest.h>

#include <map>
#include <random>

#include "finitist/errors.hpp"
#include "finitist/wellfounded.hpp"

using namespace finitist;
using namespace finitist::wellfounded;
using fastgrow::make_fastseq;
using fastgrow::make_fastseq_above;

namespace {

FastSeq seq(std::initializer_list<int> xs) {
  FastSeq s;
  for (int x : xs) s.values.emplace_back(x);
  return s;
}

// Longest bounded lexicographic descent through every pair (a, b), not just
// the greedy successor: step j lands on a code below A(j).
std::size_t omega2_longest(std::uint64_t a, std::uint64_t b, const FastSeq& A, std::size_t j,
                           std::map<std::tuple<std::uint64_t, std::uint64_t, std::size_t>, std::size_t>& memo) {
  if (j + 1 >= A.size()) return 0;
  auto key = std::tuple{a, b, j};
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const Natural bound = A[j + 1];
  std::size_t best = 0;
  Natural p3 = 1;
  for (std::uint64_t a2 = 0; a2 <= a; ++a2, p3 *= 3) {
    Natural code = p3;
    for (std::uint64_t b2 = 0; code < bound; ++b2, code *= 2) {
      if (a2 == a && b2 >= b) break;
      best = std::max(best, 1 + omega2_longest(a2, b2, A, j + 1, memo));
    }
  }
  return memo[key] = best;
}

// Longest path in a DAG from u, ignoring bounds (graph nodes sit below A(0)).
std::size_t dag_longest(const RelationSpec& r, std::uint32_t u, std::vector<int>& memo) {
  if (memo[u] >= 0) return static_cast<std::size_t>(memo[u]);
  std::size_t best = 0;
  for (auto v : r.adjacency()[u]) best = std::max(best, 1 + dag_longest(r, v, memo));
  memo[u] = static_cast<int>(best);
  return best;
}

}  // namespace

TEST_CASE("succ always yields evidence") {
  WfVerdict v = bounded_wf_search(RelationSpec::succ(), 0, seq({10, 100, 1000}));
  CHECK(v.verdict == Truth::kIllFounded);
  CHECK(v.path == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("pred from 5") {
  auto A7 = make_fastseq(RateFunction::affine(2), 7);
  CHECK(bounded_wf_search(RelationSpec::pred(), 5, A7).verdict == Truth::kWellFounded);
  CHECK(bounded_wf_search(RelationSpec::pred(), 5, A7).longest == 5);
  auto A6 = make_fastseq(RateFunction::affine(2), 6);
  CHECK(bounded_wf_search(RelationSpec::pred(), 5, A6).verdict == Truth::kIllFounded);
}

TEST_CASE("omega2 codes") {
  CHECK(omega2_code(2, 3) == 72);
  CHECK(omega2_decode(72) == std::pair<std::uint64_t, std::uint64_t>{2, 3});
  CHECK_FALSE(omega2_decode(10).has_value());
  CHECK_FALSE(omega2_decode(0).has_value());
  auto r = RelationSpec::omega2();
  CHECK(r.start() == 72);
  // Greatest successor below 100: same a = 2, b = 2 -> 36.
  CHECK(r.successors(72, 100) == std::vector<std::uint64_t>{36});
  // Below 30 no a = 2 code other than 9, 18 exist; 18 is greatest with a = 2.
  CHECK(r.successors(72, 30) == std::vector<std::uint64_t>{18});
  // From (2,0) = 9 the greatest successor below 20 is (1, b) with 3*2^b < 20 -> 12.
  CHECK(r.successors(9, 20) == std::vector<std::uint64_t>{12});
  CHECK(r.rank(72) == "w*2+3");
}

TEST_CASE("omega2 search matches exhaustive descent") {
  for (const char* id : {"affine:2", "affine:3", "pow:2"}) {
    for (std::size_t len = 4; len <= 26; len += 2) {
      FastSeq A;
      try {
        A = make_fastseq_above(RateFunction::parse(id), len, Natural(72));
      } catch (const BudgetExceeded&) {
        continue;
      }
      std::map<std::tuple<std::uint64_t, std::uint64_t, std::size_t>, std::size_t> memo;
      const std::size_t exact = std::min(omega2_longest(2, 3, A, 0, memo), len - 1);
      WfVerdict v = bounded_wf_search(RelationSpec::omega2(), 72, A);
      INFO(id << " length " << len);
      CHECK(v.longest == exact);
    }
  }
}

TEST_CASE("omega2 stabilizes under 2(x+1)") {
  auto f = RateFunction::affine(2);
  auto r = RelationSpec::omega2();
  CHECK(input_size(r, 72) == 7);
  auto A = make_fastseq_above(f, 21, Natural(input_size(r, 72)));
  CHECK(A[0] == 9);
  CHECK(A[1] == 21);
  WfVerdict v = bounded_wf_search(r, 72, A);
  CHECK(v.verdict == Truth::kWellFounded);
  CHECK(v.longest == 19);
  auto shorter = make_fastseq_above(f, 20, Natural(7));
  CHECK(bounded_wf_search(r, 72, shorter).verdict == Truth::kIllFounded);
  for (std::size_t len = 21; len <= 32; ++len) {
    CHECK(bounded_wf_search(r, 72, make_fastseq_above(f, len, Natural(7))).verdict ==
          Truth::kWellFounded);
  }
  // Minimal sequences without a floor: short says ill-founded, long says
  // well-founded.
  CHECK(bounded_wf_search(r, 72, make_fastseq(f, 6)).verdict == Truth::kIllFounded);
  CHECK(bounded_wf_search(r, 72, make_fastseq(f, 30)).verdict == Truth::kWellFounded);
}

TEST_CASE("definition length shifts the bounds") {
  auto A = make_fastseq(RateFunction::affine(2), 9);
  WfVerdict v = bounded_wf_search(RelationSpec::pred(), 5, A, 2);
  CHECK(v.target == 6);
  CHECK(v.verdict == Truth::kWellFounded);
  CHECK(bounded_wf_search(RelationSpec::pred(), 5, A, 3).verdict == Truth::kIllFounded);
}

TEST_CASE("relation names") {
  CHECK(RelationSpec::parse("pred@9").start() == 9);
  CHECK(RelationSpec::parse("omega2").start() == 72);
  CHECK(RelationSpec::parse("dag:3:12:0.3").nodes() == 12);
  CHECK(RelationSpec::parse("graph:3:2-1,1-0").adjacency()[2] == std::vector<std::uint32_t>{1});
  CHECK_THROWS_AS(RelationSpec::parse("omega2@10"), ValidationError);
  CHECK_THROWS_AS(RelationSpec::parse("dag:3:12:1.5"), ValidationError);
  CHECK_THROWS_AS(RelationSpec::parse("zeta"), ValidationError);
  CHECK(RelationSpec::parse("cyclic:4:10:0.2").ground_truth() == Truth::kIllFounded);
  CHECK(RelationSpec::parse("dag:4:10:0.2").ground_truth() == Truth::kWellFounded);
}

TEST_CASE("path acceptance") {
  auto A = make_fastseq_above(RateFunction::affine(2), 8, Natural(10));
  CHECK(path_acceptance(RelationSpec::succ(), A, 10) == Acceptance::kRejected);
  // pred from inputs up to 5 needs |A| >= 5 + 2.
  auto A7 = make_fastseq_above(RateFunction::affine(2), 7, Natural(5));
  CHECK(path_acceptance(RelationSpec::pred(), A7, 5) == Acceptance::kAccepted);
  auto A6 = make_fastseq_above(RateFunction::affine(2), 6, Natural(5));
  CHECK(path_acceptance(RelationSpec::pred(), A6, 5) == Acceptance::kRejected);
  // Chain 4 > 3 > 2 > 1 > 0 has 4 steps.
  auto chain = RelationSpec::graph(5, {{4, 3}, {3, 2}, {2, 1}, {1, 0}});
  auto A10 = make_fastseq_above(RateFunction::affine(2), 10, Natural(5));
  CHECK(path_acceptance(chain, A10, 5) == Acceptance::kAccepted);
  CHECK_THROWS_AS(path_acceptance(chain, seq({3, 100}), 5), ContractViolation);
}

TEST_CASE("path acceptance agrees with longest-path oracle on DAGs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto r = RelationSpec::parse("dag:" + std::to_string(seed) + ":12:0.3");
    std::vector<int> memo(r.nodes(), -1);
    std::size_t longest = 0;
    for (std::uint32_t u = 0; u < r.nodes(); ++u) longest = std::max(longest, dag_longest(r, u, memo));
    for (std::size_t len = 2; len <= 14; ++len) {
      auto A = make_fastseq_above(RateFunction::affine(2), len, Natural(12));
      const bool rejected = path_acceptance(r, A, 11) == Acceptance::kRejected;
      CHECK(rejected == (longest >= len - 1));
    }
  }
}

TEST_CASE("cyclic graphs are never reported well-founded") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto r = RelationSpec::parse("cyclic:" + std::to_string(seed) + ":10:0.2");
    for (std::size_t len = 1; len <= 20; ++len) {
      auto A = make_fastseq_above(RateFunction::affine(2), len, Natural(10));
      for (std::uint32_t start = 0; start < r.nodes(); ++start) {
        if (r.ground_truth(start) == Truth::kIllFounded) {
          CHECK(bounded_wf_search(r, start, A).verdict == Truth::kIllFounded);
        }
      }
    }
  }
}

TEST_CASE("partial hyperjump") {
  auto A = make_fastseq_above(RateFunction::affine(2), 12, Natural(10));
  CHECK(partial_hyperjump({RelationSpec::pred(), RelationSpec::succ()}, A) ==
        std::vector<bool>{true, false});
  CHECK(partial_hyperjump({}, A).empty());
}

TEST_CASE("machines") {
  CHECK(halts(parse_machine("regs=1 cap=7; INC 0; INC 0; HALT"), {}));
  CHECK_FALSE(halts(parse_machine("JMP 0"), {}));
  CHECK_FALSE(halts(parse_machine("regs=1 cap=3; INC 0; JMP 0"), {}));
  auto q = parse_machine("regs=1 cap=7; INC 0; QUERY 0 3; JMP 1; HALT");
  CHECK_FALSE(halts(q, {}));
  CHECK(halts(q, {false, true}));
  auto m = parse_machine("regs=2 cap=19; INC 1; JZ 0 3; DEC 1; QUERY 1 0; HALT");
  CHECK(render_machine(parse_machine(render_machine(m))) == render_machine(m));
  CHECK_THROWS_AS(parse_machine("FOO 1"), ParseError);
  CHECK_THROWS_AS(parse_machine("regs=1; INC 3"), ValidationError);
  CHECK(machine_catalog().size() == 20);
}

namespace {

// Full-knowledge evaluation: every query sees the complete lower level.
std::vector<bool> direct_level(const std::vector<MachineSpec>& ms, std::uint32_t level) {
  std::vector<bool> bits;
  std::vector<bool> below = level == 0 ? std::vector<bool>{} : direct_level(ms, level - 1);
  for (const auto& m : ms) bits.push_back(halts(m, below));
  return bits;
}

}  // namespace

TEST_CASE("jump tower matches direct evaluation") {
  auto ms = machine_catalog();
  auto A = make_fastseq_above(RateFunction::affine(2), 16, Natural(ms.size()));
  for (std::uint32_t level = 0; level <= 3; ++level) {
    auto direct = direct_level(ms, level);
    for (std::size_t n = 0; n < ms.size(); ++n) {
      CHECK(jump_tower_eval(level, ms, n, A) == direct[n]);
    }
  }
  CHECK(jump_tower_eval(0, ms, 0, A));
  CHECK_THROWS_AS(jump_tower_eval(1, ms, 20, A), ContractViolation);
}

TEST_CASE("jump tower verdicts agree across margins") {
  auto ms = machine_catalog();
  auto f = RateFunction::affine(2);
  auto A1 = make_fastseq_above(f, 16, Natural(ms.size()), fastgrow::Variant::kPlain, 1);
  auto A8 = make_fastseq_above(f, 16, Natural(ms.size()), fastgrow::Variant::kPlain, 8);
  for (std::size_t n = 0; n < ms.size(); ++n) {
    CHECK(jump_tower_eval(2, ms, n, A1) == jump_tower_eval(2, ms, n, A8));
  }
}

TEST_CASE("a query into a two-step machine") {
  std::vector<MachineSpec> ms = {parse_machine("regs=1 cap=7; INC 0; HALT"),
                                 parse_machine("regs=1 cap=7; QUERY 0 2; JMP 0; HALT")};
  auto A = make_fastseq_above(RateFunction::affine(2), 4, Natural(2));
  CHECK(jump_tower_eval(0, ms, 0, A));
  CHECK_FALSE(jump_tower_eval(0, ms, 1, A));
  CHECK(jump_tower_eval(1, ms, 1, A) == halts(ms[1], {true, false}));
  CHECK(jump_tower_eval(1, ms, 1, A));
}
