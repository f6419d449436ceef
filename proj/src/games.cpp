#include "finitist/games.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "finitist/errors.hpp"

namespace finitist::games {

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kIWins: return "I";
    case Outcome::kIIWins: return "II";
    case Outcome::kDraw: return "draw";
  }
  return "?";
}

Player GameSpec::mover(const Play& play) const {
  if (to_move) return to_move(play);
  return play.size() % 2 == 0 ? Player::kI : Player::kII;
}

std::string GameSpec::position_key(const Play& play) const {
  if (key) return key(play);
  std::string k;
  for (std::uint32_t m : play) {
    k += std::to_string(m);
    k += ',';
  }
  return k;
}

namespace {

bool prefers(Player p, Outcome a, Outcome b) {
  return p == Player::kI ? a > b : a < b;
}

struct Entry {
  Outcome value;
  std::uint32_t move;
  Player mover;
};

class Solver {
 public:
  Solver(const GameSpec& g, const SolveBudget& budget) : g_(g), budget_(budget) {}

  Outcome run(Play& play) {
    if (++nodes_ > budget_.max_nodes) {
      throw BudgetExceeded("game '" + g_.name + "' exceeded " + std::to_string(budget_.max_nodes) +
                           " nodes");
    }
    if (g_.early_outcome) {
      if (auto o = g_.early_outcome(play)) return *o;
    }
    if (play.size() >= g_.horizon) return g_.payoff(play);
    std::string key = g_.position_key(play);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;
    const std::uint32_t n = g_.num_moves(play);
    if (n == 0) throw ContractViolation("game '" + g_.name + "' has no moves before the horizon");
    const Player p = g_.mover(play);
    Outcome best{};
    std::uint32_t best_move = 0;
    for (std::uint32_t m = 0; m < n; ++m) {
      play.push_back(m);
      const Outcome v = run(play);
      play.pop_back();
      if (m == 0 || prefers(p, v, best)) {
        best = v;
        best_move = m;
      }
      // Nothing beats an outright win; later moves cannot change the choice.
      if ((p == Player::kI && best == Outcome::kIWins) ||
          (p == Player::kII && best == Outcome::kIIWins)) {
        break;
      }
    }
    memo_.emplace(std::move(key), Entry{best, best_move, p});
    return best;
  }

  std::size_t nodes() const { return nodes_; }
  const std::unordered_map<std::string, Entry>& memo() const { return memo_; }

 private:
  const GameSpec& g_;
  SolveBudget budget_;
  std::size_t nodes_ = 0;
  std::unordered_map<std::string, Entry> memo_;
};

}  // namespace

Solution solve(const GameSpec& g, const SolveBudget& budget) {
  if (!g.num_moves || !g.payoff) throw ContractViolation("game '" + g.name + "' is incomplete");
  Solver solver(g, budget);
  Play play;
  Solution sol;
  sol.value = solver.run(play);
  sol.nodes = solver.nodes();
  sol.strategy_owner = sol.value == Outcome::kIIWins ? Player::kII : Player::kI;
  for (const auto& [key, e] : solver.memo()) {
    if (e.mover == sol.strategy_owner) sol.strategy.emplace(key, e.move);
  }
  return sol;
}

namespace {

Outcome play_out_rec(const GameSpec& g, const Solution& s, Play& play) {
  if (g.early_outcome) {
    if (auto o = g.early_outcome(play)) return *o;
  }
  if (play.size() >= g.horizon) return g.payoff(play);
  const Player p = g.mover(play);
  if (p == s.strategy_owner) {
    auto it = s.strategy.find(g.position_key(play));
    if (it == s.strategy.end()) throw ContractViolation("strategy undefined at a reachable position");
    play.push_back(it->second);
    const Outcome v = play_out_rec(g, s, play);
    play.pop_back();
    return v;
  }
  const std::uint32_t n = g.num_moves(play);
  std::optional<Outcome> worst;
  for (std::uint32_t m = 0; m < n; ++m) {
    play.push_back(m);
    const Outcome v = play_out_rec(g, s, play);
    play.pop_back();
    if (!worst || prefers(p, v, *worst)) worst = v;
  }
  return *worst;
}

}  // namespace

Outcome play_out(const GameSpec& g, const Solution& s) {
  Play play;
  return play_out_rec(g, s, play);
}

// ---- bounded Sigma^0_2 games ------------------------------------------------

std::vector<std::string> phi_names() { return {"true", "false", "avoid", "evens", "echo"}; }

Phi phi_catalog(std::string_view name) {
  if (name == "true") return {"true", [](std::size_t, std::size_t, const Play&) { return true; }};
  if (name == "false") return {"false", [](std::size_t, std::size_t, const Play&) { return false; }};
  if (name == "avoid") {
    return {"avoid", [](std::size_t m, std::size_t n, const Play& play) {
              if (m >= play.size() || m % 2 != 0) return false;
              return n % 2 == 0 || play[n] != play[m];
            }};
  }
  if (name == "evens") {
    return {"evens", [](std::size_t m, std::size_t n, const Play& play) {
              return n < m || play[n] % 2 == 0;
            }};
  }
  if (name == "echo") {
    return {"echo", [](std::size_t m, std::size_t, const Play& play) {
              if (m >= play.size() || m % 2 != 0) return false;
              for (std::size_t j = m + 1; j < play.size(); j += 2) {
                if (play[j] == play[m]) return true;
              }
              return false;
            }};
  }
  throw ValidationError("unknown phi '" + std::string(name) + "'");
}

GameSpec build_sigma20_game(const Phi& phi, const fastgrow::FastSeq& g, std::size_t horizon) {
  if (horizon > 0 && 2 * horizon - 1 >= g.size()) {
    throw ValidationError("g of length " + std::to_string(g.size()) + " is too short for horizon " +
                          std::to_string(horizon));
  }
  if (g.size() == 0) throw ValidationError("g is empty");
  auto values = std::make_shared<std::vector<std::uint64_t>>();
  values->reserve(g.size());
  for (const Natural& v : g.values) values->push_back(v > Natural(UINT64_MAX) ? UINT64_MAX : to_u64(v));

  GameSpec spec;
  spec.name = "sigma20:" + phi.name;
  spec.horizon = horizon;
  spec.num_moves = [values](const Play& play) -> std::uint32_t {
    std::uint64_t size = play.size();
    for (std::uint32_t m : play) size += m;
    const std::uint64_t index = 2 * size;
    if (index >= values->size()) {
      throw ContractViolation("g too short: move bound needs g(" + std::to_string(index) + ")");
    }
    const std::uint64_t bound = (*values)[index];
    if (bound > UINT32_MAX) throw BudgetExceeded("move bound g(" + std::to_string(index) + ") too large");
    return static_cast<std::uint32_t>(bound);
  };
  spec.payoff = [values, phi, horizon](const Play& play) {
    for (std::size_t m = 0; m < horizon; ++m) {
      const std::uint64_t limit = std::min<std::uint64_t>((*values)[2 * m + 1], play.size());
      bool all = true;
      for (std::uint64_t n = 0; n < limit && all; ++n) all = phi.eval(m, n, play);
      if (all) return Outcome::kIWins;
    }
    return Outcome::kIIWins;
  };
  return spec;
}

// ---- priority games ---------------------------------------------------------

void validate_arena(const Arena& a) {
  if (a.owner.empty()) throw ValidationError("arena has no states");
  if (a.edges.size() != a.owner.size()) throw ValidationError("arena edge lists do not match states");
  if (a.start >= a.size()) throw ValidationError("arena start out of range");
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a.edges[v].empty()) throw ValidationError("state " + std::to_string(v) + " is a dead end");
    for (const Edge& e : a.edges[v]) {
      if (e.target >= a.size()) throw ValidationError("edge target out of range");
      if (e.priority > a.max_priority) throw ValidationError("edge priority above max_priority");
    }
  }
}

std::uint64_t timeout_at(const RateFunction& f, std::uint32_t level, std::uint64_t n, std::uint64_t margin) {
  if (level == 0) throw ContractViolation("timeout levels start at 1");
  if (level == 1) return f.at(n) + margin;
  const std::uint64_t inner = timeout_at(f, level - 1, n, margin);
  return f.at(timeout_at(f, level - 1, inner, margin)) + margin;
}

std::vector<std::vector<std::uint64_t>> make_timeouts(const RateFunction& f, std::uint32_t levels,
                                                      std::size_t horizon, std::uint64_t margin) {
  std::vector<std::vector<std::uint64_t>> out(levels, std::vector<std::uint64_t>(horizon + 1));
  for (std::uint32_t i = 0; i < levels; ++i) {
    for (std::size_t n = 0; n <= horizon; ++n) out[i][n] = timeout_at(f, i + 1, n, margin);
  }
  return out;
}

namespace {

Player wants(std::uint32_t priority, std::uint32_t first_player_parity) {
  return priority % 2 == first_player_parity % 2 ? Player::kI : Player::kII;
}

Outcome loss_for(Player p) { return p == Player::kI ? Outcome::kIIWins : Outcome::kIWins; }

struct Snapshot {
  std::uint32_t state = 0;
  std::vector<std::uint64_t> last;  // last[i-1] = L_i
  std::optional<Outcome> fired;
};

// Replays plays incrementally: solve and play_out extend and shrink the play
// one move at a time, so only the changed suffix is recomputed.
class PriorityTracker {
 public:
  explicit PriorityTracker(PriorityGameSpec p) : p_(std::move(p)) {
    Snapshot s;
    s.state = p_.arena.start;
    s.last.assign(p_.arena.max_priority, 0);
    snaps_.push_back(std::move(s));
  }

  const Snapshot& at(const Play& play) {
    std::size_t common = 0;
    const std::size_t limit = std::min(play.size(), play_.size());
    while (common < limit && play[common] == play_[common]) ++common;
    play_.resize(common);
    snaps_.resize(common + 1);
    for (std::size_t t = common; t < play.size(); ++t) {
      const Snapshot& prev = snaps_.back();
      if (prev.fired) throw ContractViolation("play continues past a timeout");
      const auto& out = p_.arena.edges[prev.state];
      if (play[t] >= out.size()) throw ContractViolation("move out of range");
      const Edge& e = out[play[t]];
      Snapshot next = prev;
      next.state = e.target;
      const std::uint64_t now = t + 1;
      for (std::uint32_t i = 1; i <= e.priority; ++i) next.last[i - 1] = now;
      for (std::uint32_t i = 1; i <= p_.arena.max_priority; ++i) {
        const std::uint64_t L = next.last[i - 1];
        const auto& A = p_.timeouts[i - 1];
        const std::uint64_t deadline = L < A.size() ? A[L] : A.back();
        if (deadline <= now) {
          next.fired = loss_for(wants(i, p_.arena.first_player_parity));
          break;
        }
      }
      play_.push_back(play[t]);
      snaps_.push_back(std::move(next));
    }
    return snaps_.back();
  }

  const PriorityGameSpec& spec() const { return p_; }

 private:
  PriorityGameSpec p_;
  Play play_;
  std::vector<Snapshot> snaps_;
};

}  // namespace

GameSpec build_priority_game(const PriorityGameSpec& p) {
  validate_arena(p.arena);
  const std::uint32_t k = p.arena.max_priority;
  if (k == 0) throw ValidationError("priority game needs max_priority >= 1");
  if (p.timeouts.size() != k) throw ValidationError("need one timeout sequence per level 1..k");
  for (std::uint32_t i = 0; i < k; ++i) {
    if (p.timeouts[i].empty()) throw ValidationError("empty timeout sequence");
    for (std::size_t n = 0; n < p.timeouts[i].size(); ++n) {
      if (p.timeouts[i][n] <= n) throw ValidationError("timeout A_i(n) must exceed n");
      if (i > 0 && p.timeouts[i][n] <= p.timeouts[i - 1][n]) {
        throw ValidationError("timeout levels must increase");
      }
    }
  }
  if (p.horizon < p.timeouts[0][0]) {
    throw ValidationError("horizon " + std::to_string(p.horizon) + " ends before the first timeout " +
                          std::to_string(p.timeouts[0][0]));
  }
  auto tracker = std::make_shared<PriorityTracker>(p);
  const Player top = wants(k, p.arena.first_player_parity);

  GameSpec g;
  g.name = "priority";
  g.horizon = p.horizon;
  g.num_moves = [tracker](const Play& play) {
    return static_cast<std::uint32_t>(tracker->spec().arena.edges[tracker->at(play).state].size());
  };
  g.to_move = [tracker](const Play& play) { return tracker->spec().arena.owner[tracker->at(play).state]; };
  g.early_outcome = [tracker](const Play& play) { return tracker->at(play).fired; };
  g.payoff = [tracker, top](const Play& play) {
    const Snapshot& s = tracker->at(play);
    return s.fired ? *s.fired : loss_for(top == Player::kI ? Player::kII : Player::kI);
  };
  g.key = [tracker](const Play& play) {
    const Snapshot& s = tracker->at(play);
    std::string key = std::to_string(play.size()) + ":" + std::to_string(s.state);
    for (std::uint64_t L : s.last) key += ":" + std::to_string(L);
    return key;
  };
  return g;
}

Arena random_arena(std::mt19937_64& rng, std::size_t states, std::uint32_t max_priority,
                   std::size_t max_degree) {
  if (states == 0 || max_degree == 0) throw ContractViolation("arena needs states and edges");
  Arena a;
  a.max_priority = max_priority;
  a.first_player_parity = max_priority % 2;
  std::uniform_int_distribution<std::size_t> degree(1, max_degree);
  std::uniform_int_distribution<std::uint32_t> target(0, static_cast<std::uint32_t>(states - 1));
  std::uniform_int_distribution<std::uint32_t> priority(0, max_priority);
  std::bernoulli_distribution coin(0.5);
  a.owner.resize(states);
  a.edges.resize(states);
  for (std::size_t v = 0; v < states; ++v) {
    a.owner[v] = coin(rng) ? Player::kI : Player::kII;
    const std::size_t d = degree(rng);
    for (std::size_t j = 0; j < d; ++j) a.edges[v].push_back({target(rng), priority(rng)});
  }
  return a;
}

// ---- estimator games --------------------------------------------------------

namespace {

std::pair<std::uint32_t, std::uint32_t> split_bits(const Play& play) {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  for (std::size_t i = 0; i < play.size(); ++i) {
    const std::uint32_t bit = play[i] & 1u;
    if (i % 2 == 0) {
      x |= bit << (i / 2);
    } else {
      y |= bit << (i / 2);
    }
  }
  return {x, y};
}

bool some_element(const Estimator& s2, const EstimatorPredicate& P, std::uint32_t x, std::uint32_t y,
                  bool want) {
  return std::any_of(s2.elements().begin(), s2.elements().end(),
                     [&](const Estimator& e) { return P(e, x, y) == want; });
}

}  // namespace

GameSpec build_estimator_game(const EstimatorPredicate& P, const Estimator& s, std::uint32_t bitlen) {
  if (s.level() < 2) throw ContractViolation("estimator game needs a level >= 2 estimator");
  if (bitlen > 16) throw ContractViolation("bit length above 16");
  GameSpec g;
  g.name = "estimator";
  g.horizon = 2 * static_cast<std::size_t>(bitlen);
  g.num_moves = [](const Play&) { return 2u; };
  g.payoff = [P, s](const Play& play) {
    const auto [x, y] = split_bits(play);
    const bool i_cond = std::all_of(s.elements().begin(), s.elements().end(),
                                    [&](const Estimator& s2) { return some_element(s2, P, x, y, true); });
    const bool ii_cond = std::all_of(s.elements().begin(), s.elements().end(),
                                     [&](const Estimator& s2) { return some_element(s2, P, x, y, false); });
    if (i_cond && !ii_cond) return Outcome::kIWins;
    if (ii_cond && !i_cond) return Outcome::kIIWins;
    return Outcome::kDraw;
  };
  return g;
}

bool check_well_behaved(const EstimatorPredicate& P, const Estimator& s, std::uint32_t bitlen) {
  if (s.level() < 2) throw ContractViolation("well-behavedness needs a level >= 2 estimator");
  if (bitlen > 16) throw ContractViolation("bit length above 16");
  const std::uint32_t count = 1u << bitlen;
  for (std::uint32_t x = 0; x < count; ++x) {
    for (std::uint32_t y = 0; y < count; ++y) {
      const bool ok = std::any_of(s.elements().begin(), s.elements().end(), [&](const Estimator& s2) {
        const auto& el = s2.elements();
        if (el.empty()) return true;
        const bool first = P(el.front(), x, y);
        return std::all_of(el.begin(), el.end(), [&](const Estimator& e) { return P(e, x, y) == first; });
      });
      if (!ok) return false;
    }
  }
  return true;
}

namespace {

bool leaves_pass(const formulas::Matrix& m, const Estimator& e, const formulas::WitnessAssignment& a) {
  if (e.is_pair()) {
    const std::uint64_t stop = std::min(e.b(), std::max(e.a(), m.threshold()) + m.period());
    for (std::uint64_t y = e.a(); y < stop; ++y) {
      if (formulas::eval_matrix(m, y, a)) return true;
    }
    return false;
  }
  return std::all_of(e.elements().begin(), e.elements().end(),
                     [&](const Estimator& x) { return leaves_pass(m, x, a); });
}

}  // namespace

EstimatorPredicate tail_predicate(const formulas::Matrix& m) {
  return [m](const Estimator& e, std::uint32_t x, std::uint32_t y) {
    formulas::WitnessAssignment a;
    a.width = m.window();
    const std::uint32_t mask = a.width >= 32 ? ~0u : (1u << a.width) - 1;
    a.patterns = {x & mask, y & mask};
    return leaves_pass(m, e, a);
  };
}

}  // namespace finitist::games
