#ifndef FINITIST_GAMES_HPP
#define FINITIST_GAMES_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "finitist/estimators.hpp"
#include "finitist/fastgrow.hpp"
#include "finitist/formulas.hpp"

namespace finitist::games {

using Play = std::vector<std::uint32_t>;

enum class Player { kI, kII };
// Ordered by player I's preference.
enum class Outcome { kIIWins = 0, kDraw = 1, kIWins = 2 };

std::string outcome_name(Outcome o);

// Finite two-player game in extensive form. Moves at a position are
// 0..num_moves(play)-1. The play ends at `horizon` plies, or earlier when
// early_outcome returns a value.
struct GameSpec {
  std::string name;
  std::size_t horizon = 0;
  std::function<std::uint32_t(const Play&)> num_moves;
  std::function<Outcome(const Play&)> payoff;
  // Defaults to alternation starting with player I.
  std::function<Player(const Play&)> to_move;
  std::function<std::optional<Outcome>(const Play&)> early_outcome;
  // Positions with equal keys must have equal continuations. Defaults to the
  // play itself. Built games may cache replay state, so a GameSpec should be
  // solved by one thread at a time.
  std::function<std::string(const Play&)> key;

  Player mover(const Play& play) const;
  std::string position_key(const Play& play) const;
};

struct SolveBudget {
  std::size_t max_nodes = 20'000'000;
};

struct Solution {
  Outcome value = Outcome::kDraw;
  // Positional strategy (position key -> move) of the player securing
  // `value`: the winner, or player I for a draw.
  Player strategy_owner = Player::kI;
  std::unordered_map<std::string, std::uint32_t> strategy;
  std::size_t nodes = 0;
};

// Backward induction with memoization on position keys. Ties go to the
// lowest move index. Throws BudgetExceeded past max_nodes and
// ContractViolation when a non-terminal position has no moves.
Solution solve(const GameSpec& g, const SolveBudget& budget = {});

// Plays the strategy for its owner against every response of the opponent
// and returns the worst outcome for the owner.
Outcome play_out(const GameSpec& g, const Solution& s);

// ---- bounded Sigma^0_2 games ------------------------------------------------

// phi(m, n, play) from a fixed catalog:
//   true, false
//   avoid   m is a move of I that II never repeats: n odd -> play[n] != play[m]
//   evens   every move from position m on is even
//   echo    m is a move of I that II repeats later in the play
struct Phi {
  std::string name;
  std::function<bool(std::size_t m, std::size_t n, const Play& play)> eval;
};

Phi phi_catalog(std::string_view name);
std::vector<std::string> phi_names();

// Moves at a position are bounded by g(2 * size(play)), where
// size(play) = plies + sum of moves so far. I wins iff
// exists m < horizon, forall n < min(g(2m+1), |play|): phi(m, n, play).
// Throws ValidationError when g is too short for the horizon; a position
// needing g beyond its end raises ContractViolation during the solve.
GameSpec build_sigma20_game(const Phi& phi, const fastgrow::FastSeq& g, std::size_t horizon);

// ---- priority games ---------------------------------------------------------

struct Edge {
  std::uint32_t target = 0;
  std::uint32_t priority = 0;
};

struct Arena {
  std::vector<Player> owner;
  std::vector<std::vector<Edge>> edges;
  std::uint32_t max_priority = 0;
  // Player I wins iff the largest priority seen infinitely often has this
  // parity.
  std::uint32_t first_player_parity = 1;
  std::uint32_t start = 0;

  std::size_t size() const { return owner.size(); }
};

// Throws ValidationError for dead ends, bad targets or priorities.
void validate_arena(const Arena& a);

struct PriorityGameSpec {
  Arena arena;
  std::size_t horizon = 0;
  // timeouts[i-1][n] = A_i(n) for levels i = 1..max_priority, n <= horizon.
  std::vector<std::vector<std::uint64_t>> timeouts;
};

// A_1(n) = f(n) + margin, A_{i+1}(n) = f(A_i(A_i(n))) + margin. The inner
// A_i absorbs the time an opponent can stall before level i is last reset.
std::uint64_t timeout_at(const RateFunction& f, std::uint32_t level, std::uint64_t n, std::uint64_t margin);
std::vector<std::vector<std::uint64_t>> make_timeouts(const RateFunction& f, std::uint32_t levels,
                                                      std::size_t horizon, std::uint64_t margin);

// Move i at a position takes edge i of the current state. L_i is the last
// time an event of priority >= i occurred (0 at the start). Level i times
// out at time A_i(L_i) if no such event happened since; the earliest timeout
// ends the play, ties going to the lowest level, and the player wanting
// parity i loses. If nothing times out by the horizon, the player wanting
// the top priority wins. Throws ValidationError when the horizon is below
// A_1(0).
GameSpec build_priority_game(const PriorityGameSpec& p);

// Random arena with `states` states, out-degree 1..max_degree and
// priorities 0..max_priority.
Arena random_arena(std::mt19937_64& rng, std::size_t states, std::uint32_t max_priority,
                   std::size_t max_degree = 3);

// ---- estimator games --------------------------------------------------------

using estimators::Estimator;

// P(e, X, Y) for a level-k element e and window patterns X, Y.
using EstimatorPredicate = std::function<bool(const Estimator&, std::uint32_t, std::uint32_t)>;

// Players alternate bits X(0), Y(0), X(1), Y(1), ...; bitlen bits each.
// I-condition: every s2 in s has some e in s2 with P(e, X, Y).
// II-condition: every s2 in s has some e in s2 with !P(e, X, Y).
// Exactly one condition gives that player the win; otherwise a draw.
GameSpec build_estimator_game(const EstimatorPredicate& P, const Estimator& s, std::uint32_t bitlen);

// forall X, Y exists s2 in s: P takes a single value on s2's elements.
bool check_well_behaved(const EstimatorPredicate& P, const Estimator& s, std::uint32_t bitlen);

// P(e, X, Y): every pair of e passes the tail matrix under X = var 0,
// Y = var 1.
EstimatorPredicate tail_predicate(const formulas::Matrix& m);

}  // namespace finitist::games

#endif  // FINITIST_GAMES_HPP
