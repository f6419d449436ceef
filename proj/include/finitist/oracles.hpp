#ifndef FINITIST_ORACLES_HPP
#define FINITIST_ORACLES_HPP

#include <cstddef>
#include <vector>

#include "finitist/games.hpp"
#include "finitist/wellfounded.hpp"

namespace finitist::oracles {

using games::Arena;
using games::GameSpec;
using games::Outcome;
using games::Player;

// Game value by brute force: every reduced strategy of player I is
// enumerated and scored by the worst play consistent with it. No memo, no
// pruning. Throws BudgetExceeded past max_strategies.
Outcome enumerate_value(const GameSpec& g, std::size_t max_strategies = 5'000'000);

// Untruncated parity game on the arena (priorities on edges, largest
// priority seen infinitely often decides). Recursive Zielonka solver on the
// graph with one extra vertex per edge. Winner per state.
std::vector<Player> parity_regions(const Arena& a);
Player parity_winner(const Arena& a);

// Jump levels computed bottom-up with complete oracles: bit j of level 0 is
// halting of machine j on the empty oracle, bit j of level i+1 is halting of
// machine j against all level-i bits.
std::vector<bool> jump_direct(const std::vector<wellfounded::MachineSpec>& machines, std::uint32_t level);

}  // namespace finitist::oracles

#endif  // FINITIST_ORACLES_HPP
