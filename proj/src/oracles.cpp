#include "finitist/oracles.hpp"

#include <algorithm>
#include <string>

#include "finitist/errors.hpp"

namespace finitist::oracles {

namespace {

using games::Play;

struct Enumerator {
  const GameSpec& g;
  std::size_t max_strategies;
  std::size_t strategies = 0;
  bool any = false;
  Outcome best = Outcome::kIIWins;

  Outcome terminal(const Play& p, bool& done) const {
    done = true;
    if (g.early_outcome) {
      if (auto o = g.early_outcome(p)) return *o;
    }
    if (p.size() >= g.horizon) return g.payoff(p);
    done = false;
    return Outcome::kDraw;
  }

  // `pending` holds positions still to expand under the strategy being built;
  // `worst` is the worst outcome for I among plays already completed.
  void run(std::vector<Play> pending, Outcome worst) {
    while (!pending.empty()) {
      Play p = std::move(pending.back());
      pending.pop_back();
      bool done = false;
      const Outcome o = terminal(p, done);
      if (done) {
        worst = std::min(worst, o);
        continue;
      }
      const std::uint32_t n = g.num_moves(p);
      if (n == 0) throw ContractViolation("no moves before the horizon");
      if (g.mover(p) == Player::kII) {
        for (std::uint32_t m = 0; m < n; ++m) {
          Play q = p;
          q.push_back(m);
          pending.push_back(std::move(q));
        }
        continue;
      }
      // Player I: branch over the choice made at p.
      for (std::uint32_t m = 0; m < n; ++m) {
        std::vector<Play> next = pending;
        Play q = p;
        q.push_back(m);
        next.push_back(std::move(q));
        run(std::move(next), worst);
      }
      return;
    }
    if (++strategies > max_strategies) throw BudgetExceeded("strategy enumeration cap reached");
    if (!any || worst > best) best = worst;
    any = true;
  }
};

}  // namespace

Outcome enumerate_value(const GameSpec& g, std::size_t max_strategies) {
  Enumerator e{g, max_strategies};
  e.run({Play{}}, Outcome::kIWins);
  return e.best;
}

namespace {

struct Graph {
  std::vector<std::uint32_t> priority;
  std::vector<Player> owner;
  std::vector<std::vector<std::size_t>> succ;
  std::uint32_t parity = 1;

  Player wants(std::uint32_t p) const { return p % 2 == parity % 2 ? Player::kI : Player::kII; }
};

Player other(Player p) { return p == Player::kI ? Player::kII : Player::kI; }

std::vector<bool> attractor(const Graph& g, const std::vector<bool>& in, const std::vector<bool>& target,
                            Player q) {
  std::vector<bool> attr = target;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < g.succ.size(); ++v) {
      if (!in[v] || attr[v]) continue;
      bool any = false;
      bool all = true;
      for (std::size_t w : g.succ[v]) {
        if (!in[w]) continue;
        if (attr[w]) {
          any = true;
        } else {
          all = false;
        }
      }
      if (g.owner[v] == q ? any : all) {
        attr[v] = true;
        changed = true;
      }
    }
  }
  return attr;
}

// Returns the winning region of player I inside `in`; the rest belongs to II.
std::vector<bool> zielonka(const Graph& g, const std::vector<bool>& in) {
  const std::size_t n = g.succ.size();
  std::vector<bool> none(n, false);
  if (std::none_of(in.begin(), in.end(), [](bool b) { return b; })) return none;
  std::uint32_t d = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (in[v]) d = std::max(d, g.priority[v]);
  }
  const Player q = g.wants(d);
  std::vector<bool> top(n, false);
  for (std::size_t v = 0; v < n; ++v) top[v] = in[v] && g.priority[v] == d;
  const std::vector<bool> a = attractor(g, in, top, q);
  std::vector<bool> rest(n, false);
  for (std::size_t v = 0; v < n; ++v) rest[v] = in[v] && !a[v];
  const std::vector<bool> w_i = zielonka(g, rest);
  std::vector<bool> opp(n, false);
  bool opp_empty = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (!rest[v]) continue;
    const bool wins_i = w_i[v];
    opp[v] = (q == Player::kI) ? !wins_i : wins_i;
    if (opp[v]) opp_empty = false;
  }
  if (opp_empty) {
    std::vector<bool> out(n, false);
    for (std::size_t v = 0; v < n; ++v) out[v] = in[v] && q == Player::kI;
    return out;
  }
  const std::vector<bool> b = attractor(g, in, opp, other(q));
  std::vector<bool> rest2(n, false);
  for (std::size_t v = 0; v < n; ++v) rest2[v] = in[v] && !b[v];
  std::vector<bool> out = zielonka(g, rest2);
  for (std::size_t v = 0; v < n; ++v) {
    if (b[v]) out[v] = other(q) == Player::kI;
  }
  return out;
}

}  // namespace

std::vector<Player> parity_regions(const Arena& a) {
  games::validate_arena(a);
  Graph g;
  g.parity = a.first_player_parity;
  const std::size_t n = a.size();
  g.priority.assign(n, 0);
  g.owner = a.owner;
  g.succ.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (const games::Edge& e : a.edges[v]) {
      const std::size_t mid = g.succ.size();
      g.priority.push_back(e.priority);
      g.owner.push_back(Player::kI);
      g.succ.push_back({e.target});
      g.succ[v].push_back(mid);
    }
  }
  const std::vector<bool> w = zielonka(g, std::vector<bool>(g.succ.size(), true));
  std::vector<Player> out(n);
  for (std::size_t v = 0; v < n; ++v) out[v] = w[v] ? Player::kI : Player::kII;
  return out;
}

Player parity_winner(const Arena& a) { return parity_regions(a)[a.start]; }

std::vector<bool> jump_direct(const std::vector<wellfounded::MachineSpec>& machines, std::uint32_t level) {
  std::vector<bool> bits;
  for (std::uint32_t i = 0; i <= level; ++i) {
    std::vector<bool> next(machines.size());
    for (std::size_t j = 0; j < machines.size(); ++j) next[j] = wellfounded::halts(machines[j], bits);
    bits = std::move(next);
  }
  return bits;
}

}  // namespace finitist::oracles
