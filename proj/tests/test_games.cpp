#include <doctest.h>

#include <random>

#include "finitist/errors.hpp"
#include "finitist/games.hpp"
#include "finitist/oracles.hpp"
#include "finitist/game_families.hpp"

using namespace finitist;
using namespace finitist::games;

namespace {

GameSpec one_ply_pick_one() {
  GameSpec g;
  g.horizon = 1;
  g.num_moves = [](const Play&) { return 2u; };
  g.payoff = [](const Play& p) { return p[0] == 1 ? Outcome::kIWins : Outcome::kIIWins; };
  return g;
}

Arena single_loop(std::uint32_t priority, std::uint32_t max_priority) {
  Arena a;
  a.owner = {Player::kI};
  a.edges = {{{0, priority}}};
  a.max_priority = max_priority;
  a.first_player_parity = 1;
  return a;
}

PriorityGameSpec with_timeouts(const Arena& a, std::uint64_t margin, std::size_t horizon) {
  return {a, horizon, make_timeouts(RateFunction::affine(1), a.max_priority, horizon, margin)};
}

}  // namespace

TEST_CASE("trivial games") {
  const GameSpec g = one_ply_pick_one();
  const Solution s = solve(g);
  CHECK(s.value == Outcome::kIWins);
  CHECK(s.strategy_owner == Player::kI);
  CHECK(s.strategy.at(g.position_key({})) == 1);

  GameSpec empty;
  empty.horizon = 0;
  empty.num_moves = [](const Play&) { return 1u; };
  empty.payoff = [](const Play&) { return Outcome::kIWins; };
  CHECK(solve(empty).value == Outcome::kIWins);
}

TEST_CASE("lowest index tie-break and budget") {
  GameSpec g;
  g.horizon = 1;
  g.num_moves = [](const Play&) { return 3u; };
  g.payoff = [](const Play& p) { return p[0] == 0 ? Outcome::kDraw : Outcome::kIWins; };
  CHECK(solve(g).strategy.at(g.position_key({})) == 1);

  GameSpec big;
  big.horizon = 20;
  big.num_moves = [](const Play&) { return 2u; };
  big.payoff = [](const Play&) { return Outcome::kDraw; };
  CHECK_THROWS_AS(solve(big, SolveBudget{1000}), BudgetExceeded);

  GameSpec stuck = g;
  stuck.num_moves = [](const Play&) { return 0u; };
  CHECK_THROWS_AS(solve(stuck), ContractViolation);
}

TEST_CASE("solve agrees with strategy enumeration on every family") {
  std::mt19937_64 rng(2024);
  for (const auto& fam : families::all_families()) {
    for (int i = 0; i < 50; ++i) {
      const GameSpec g = fam.make(rng);
      const Solution s = solve(g);
      INFO(fam.name << " instance " << i);
      CHECK(s.value == oracles::enumerate_value(g));
      CHECK(play_out(g, s) == s.value);
    }
  }
}

TEST_CASE("sigma20 catalog") {
  const auto g = families::sigma20_g(1);
  CHECK(solve(build_sigma20_game(phi_catalog("true"), g, 2)).value == Outcome::kIWins);
  CHECK(solve(build_sigma20_game(phi_catalog("false"), g, 2)).value == Outcome::kIIWins);
  CHECK_THROWS_AS(phi_catalog("nope"), ValidationError);
  CHECK_THROWS_AS(build_sigma20_game(phi_catalog("true"), families::sigma20_g(1, 3), 2), ValidationError);
  // Move bound at the root is g(0).
  const GameSpec game = build_sigma20_game(phi_catalog("echo"), g, 2);
  CHECK(game.num_moves({}) == 2);
  CHECK(game.num_moves({1}) == to_u64(g[2 * 2]));
}

TEST_CASE("sigma20 winners stabilize across margins 1 and 8") {
  for (const std::string& name : phi_names()) {
    INFO(name);
    std::optional<Outcome> first;
    for (std::uint64_t margin : {1, 2, 4, 8}) {
      for (std::size_t horizon : {2, 3}) {
        const Solution s = solve(build_sigma20_game(phi_catalog(name), families::sigma20_g(margin, 512), horizon));
        if (horizon == 3 && !first) first = s.value;
        if (horizon == 3) CHECK(s.value == *first);
      }
    }
  }
}

TEST_CASE("priority games: trivial arenas") {
  // I wants odd; a priority-1 self loop keeps level 1 alive forever.
  CHECK(solve(build_priority_game(with_timeouts(single_loop(1, 1), 2, 20))).value == Outcome::kIWins);
  // No priority-1 edge: level 1 times out at A_1(0) and I loses.
  const auto p = with_timeouts(single_loop(0, 1), 2, 20);
  const GameSpec g = build_priority_game(p);
  CHECK(solve(g).value == Outcome::kIIWins);
  Play play;
  while (play.size() + 1 < p.timeouts[0][0]) {
    play.push_back(0);
    CHECK_FALSE(g.early_outcome(play).has_value());
  }
  play.push_back(0);
  CHECK(g.early_outcome(play) == Outcome::kIIWins);
  CHECK_THROWS_AS(build_priority_game(with_timeouts(single_loop(1, 1), 2, 2)), ValidationError);
}

TEST_CASE("timeouts compose") {
  const RateFunction f = RateFunction::affine(1);
  CHECK(timeout_at(f, 1, 0, 2) == 3);
  CHECK(timeout_at(f, 2, 0, 2) == f.at(timeout_at(f, 1, 3, 2)) + 2);
  const auto t = make_timeouts(f, 3, 10, 2);
  for (std::size_t n = 0; n <= 10; ++n) {
    CHECK(t[0][n] > n);
    CHECK(t[1][n] > t[0][t[0][n] <= 10 ? t[0][n] : 10]);
  }
}

TEST_CASE("zielonka on hand arenas") {
  // Two states; I at 0 chooses between a priority-2 loop and moving to 1,
  // which loops on priority 1. I wants odd, so 1 is winning.
  Arena a;
  a.owner = {Player::kI, Player::kII};
  a.edges = {{{0, 2}, {1, 0}}, {{1, 1}}};
  a.max_priority = 2;
  a.first_player_parity = 1;
  CHECK(oracles::parity_winner(a) == Player::kI);
  a.owner[0] = Player::kII;
  a.edges[0] = {{0, 2}, {1, 0}};
  CHECK(oracles::parity_winner(a) == Player::kII);
  a.edges[1] = {};
  CHECK_THROWS_AS(oracles::parity_winner(a), ValidationError);
}

TEST_CASE("priority games agree with the parity solver once margins reach |V|") {
  std::mt19937_64 rng(99);
  const RateFunction f = RateFunction::affine(1);
  for (int i = 0; i < 60; ++i) {
    const std::size_t states = 2 + rng() % 7;
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 3);
    const Arena a = random_arena(rng, states, k, 3);
    const std::size_t horizon = 3 * timeout_at(f, k, 0, states);
    const Solution s = solve(build_priority_game(with_timeouts(a, states, horizon)));
    INFO("arena " << i);
    CHECK((s.value == Outcome::kIWins) == (oracles::parity_winner(a) == Player::kI));
  }
}

TEST_CASE("estimator games: trivial predicates") {
  std::mt19937_64 rng(5);
  const auto s = families::random_level2(rng);
  const EstimatorPredicate always = [](const Estimator&, std::uint32_t, std::uint32_t) { return true; };
  const GameSpec g = build_estimator_game(always, s, 2);
  CHECK(g.horizon == 4);
  CHECK(oracles::enumerate_value(g) == Outcome::kIWins);
  CHECK(check_well_behaved(always, s, 2));

  const EstimatorPredicate x0 = [](const Estimator&, std::uint32_t x, std::uint32_t) { return (x & 1) != 0; };
  const Solution sol = solve(build_estimator_game(x0, s, 2));
  CHECK(sol.value == Outcome::kIWins);
  CHECK(sol.strategy.at("") == 1);
}

TEST_CASE("estimator games: well-behaved corpus never draws") {
  for (const auto& c : families::well_behaved_corpus(17, 12)) {
    REQUIRE(c.s.level() == 3);
    const EstimatorPredicate P = tail_predicate(c.sentence.matrix);
    CHECK(check_well_behaved(P, c.s, c.bitlen));
    const GameSpec g = build_estimator_game(P, c.s, c.bitlen);
    const Solution sol = solve(g);
    CHECK(sol.value != Outcome::kDraw);
    CHECK(sol.value == oracles::enumerate_value(g));
  }
}

TEST_CASE("estimator games: negative control draws") {
  const auto s = families::mixed_parity_level3();
  const EstimatorPredicate P = families::min_a_even();
  CHECK_FALSE(check_well_behaved(P, s, 2));
  CHECK(solve(build_estimator_game(P, s, 2)).value == Outcome::kDraw);
}
