#ifndef FINITIST_GAME_FAMILIES_HPP
#define FINITIST_GAME_FAMILIES_HPP

// Random game families for oracle comparisons. The enumerable families stay
// within 6 plies so strategy enumeration is feasible.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "finitist/corpus.hpp"
#include "finitist/estimators.hpp"
#include "finitist/fastgrow.hpp"
#include "finitist/games.hpp"

namespace finitist::families {

using namespace finitist::games;

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

inline std::uint64_t hash_play(std::uint64_t seed, const Play& p) {
  std::uint64_t h = mix(seed, p.size());
  for (std::uint32_t m : p) h = mix(h, m);
  return h;
}

// Arbitrary tree game: branching 1..3, movers and payoffs from a hash of the
// play, horizon 0..6.
inline GameSpec random_tree_game(std::mt19937_64& rng) {
  const std::uint64_t seed = rng();
  GameSpec g;
  g.name = "tree";
  g.horizon = rng() % 7;
  g.num_moves = [seed](const Play& p) { return 1 + static_cast<std::uint32_t>(hash_play(seed, p) % 3); };
  g.to_move = [seed](const Play& p) {
    return (hash_play(seed ^ 0x55, p) >> 7) % 2 == 0 ? Player::kI : Player::kII;
  };
  g.payoff = [seed](const Play& p) { return static_cast<Outcome>(hash_play(seed ^ 0xaa, p) % 3); };
  return g;
}

inline fastgrow::FastSeq sigma20_g(std::uint64_t margin, std::size_t length = 64) {
  return fastgrow::make_fastseq(RateFunction::affine(1), length, fastgrow::Variant::kPlain, margin);
}

// Bounded Sigma^0_2 game with a catalog phi and horizon 1..2.
inline GameSpec random_sigma20_game(std::mt19937_64& rng) {
  const auto names = phi_names();
  const Phi phi = phi_catalog(names[rng() % names.size()]);
  return build_sigma20_game(phi, sigma20_g(1), 1 + rng() % 2);
}

// Priority game on a small arena, horizon 2..4 so that enumeration stays
// feasible.
inline GameSpec random_priority_game(std::mt19937_64& rng) {
  const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 2);
  const std::size_t states = 2 + rng() % 3;
  Arena a = random_arena(rng, states, k, 2);
  const std::size_t horizon = 2 + rng() % 3;
  PriorityGameSpec p{a, horizon, make_timeouts(RateFunction::affine(1), k, horizon, 1)};
  return build_priority_game(p);
}

// Level-2 estimator with 1..3 level-1 nodes of 1..3 pairs each.
inline estimators::Estimator random_level2(std::mt19937_64& rng) {
  using estimators::Estimator;
  std::vector<Estimator> outer;
  const std::size_t width = 1 + rng() % 3;
  for (std::size_t i = 0; i < width; ++i) {
    std::vector<Estimator> pairs;
    const std::size_t w = 1 + rng() % 3;
    for (std::size_t j = 0; j < w; ++j) {
      const std::uint64_t a = rng() % 8;
      pairs.push_back(Estimator::pair(a, a + 1 + rng() % 8));
    }
    outer.push_back(Estimator::set(1, pairs));
  }
  return Estimator::set(2, outer);
}

// Estimator game with a hash-valued predicate on (element, X, Y), bitlen
// 1..3.
inline GameSpec random_estimator_game(std::mt19937_64& rng) {
  const std::uint64_t seed = rng();
  const estimators::Estimator s = random_level2(rng);
  const std::uint32_t bitlen = 1 + static_cast<std::uint32_t>(rng() % 3);
  EstimatorPredicate P = [seed](const estimators::Estimator& e, std::uint32_t x, std::uint32_t y) {
    return mix(mix(mix(seed, e.a() * 131 + e.b()), x), y) % 2 == 0;
  };
  return build_estimator_game(P, s, bitlen);
}

struct Family {
  std::string name;
  std::function<GameSpec(std::mt19937_64&)> make;
};

inline std::vector<Family> all_families() {
  return {{"tree", random_tree_game},
          {"sigma20", random_sigma20_game},
          {"priority", random_priority_game},
          {"estimator", random_estimator_game}};
}

// ---- well-behaved estimator-game corpus -------------------------------------

struct WellBehavedCase {
  formulas::Sentence sentence;  // EX X. AA Y. EX Z. <M(X, Y)>
  estimators::Estimator s = estimators::Estimator::set(3, {});  // saturated
  std::uint32_t bitlen = 1;
};

// Random tail matrices over X and Y; s saturates the three-quantifier
// sentence built on each.
inline std::vector<WellBehavedCase> well_behaved_corpus(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  cli::CorpusLimits limits;
  limits.max_quantifiers = 2;
  limits.max_window = 2;
  std::vector<WellBehavedCase> out;
  estimators::NotionParams p;
  p.cover_schedule = {1, 2, 2, 1};
  while (out.size() < count) {
    const formulas::Sentence base = cli::random_sentence(rng, limits);
    if (base.matrix.arity() != 2) continue;
    WellBehavedCase c;
    c.sentence.prefix = {{formulas::Quantifier::kExists, "X"},
                         {formulas::Quantifier::kForall, "Y"},
                         {formulas::Quantifier::kExists, "Z"}};
    c.sentence.matrix = base.matrix;
    p.a_min = formulas::sentence_size(c.sentence);
    c.s = estimators::saturate(c.sentence, p);
    c.bitlen = std::max<std::uint32_t>(1, base.matrix.window());
    out.push_back(std::move(c));
  }
  return out;
}

// P(e) = "the least a in e is even": ignores X and Y and splits any s2
// holding both parities.
inline EstimatorPredicate min_a_even() {
  return [](const estimators::Estimator& e, std::uint32_t, std::uint32_t) {
    std::uint64_t least = UINT64_MAX;
    for (const auto& x : e.elements()) least = std::min(least, x.a());
    return least % 2 == 0;
  };
}

// Level-3 estimator whose level-2 nodes each hold one even-min and one
// odd-min level-1 element (cover width 2).
inline estimators::Estimator mixed_parity_level3(std::size_t width = 2) {
  using estimators::Estimator;
  auto l1 = [](std::uint64_t a) { return Estimator::set(1, {Estimator::pair(a, a + 5)}); };
  std::vector<Estimator> nodes;
  for (std::size_t i = 0; i < width; ++i) nodes.push_back(Estimator::set(2, {l1(10 + 2 * i), l1(11 + 2 * i)}));
  return Estimator::set(3, nodes);
}

}  // namespace finitist::families

#endif  // FINITIST_GAME_FAMILIES_HPP
