#ifndef FINITIST_ESTIMATORS_HPP
#define FINITIST_ESTIMATORS_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "finitist/formulas.hpp"
#include "finitist/rate.hpp"

namespace finitist::estimators {

using formulas::Sentence;
using formulas::WitnessAssignment;

// A level-0 estimator is a pair (a, b) with a < b; a level-n estimator is a
// finite set of level-(n-1) estimators. Sets are kept sorted and
// duplicate-free, so equality is set equality.
class Estimator {
 public:
  static Estimator pair(std::uint64_t a, std::uint64_t b);
  static Estimator set(std::uint32_t level, std::vector<Estimator> elements);

  std::uint32_t level() const { return level_; }
  bool is_pair() const { return level_ == 0; }
  std::uint64_t a() const;
  std::uint64_t b() const;
  const std::vector<Estimator>& elements() const;
  // Total number of nodes, pairs included.
  std::size_t size() const;

  friend bool operator==(const Estimator&, const Estimator&) = default;
  friend std::strong_ordering operator<=>(const Estimator& x, const Estimator& y);

 private:
  Estimator() = default;

  std::uint32_t level_ = 0;
  std::uint64_t a_ = 0;
  std::uint64_t b_ = 0;
  std::vector<Estimator> elements_;
};

// e with x inserted. Idempotent; throws ContractViolation unless
// x.level() + 1 == e.level().
Estimator add_element(const Estimator& e, const Estimator& x);

// Nested bracket text: `L0(a,b)` for pairs, `{e1,e2,...}` for sets and
// `L<k>{}` for an empty level-k set.
std::string to_text(const Estimator& e);
Estimator from_text(std::string_view text);
nlohmann::json to_json(const Estimator& e);
Estimator from_json(const nlohmann::json& j);

// A constructive valid notion: level-0 membership is
// a >= a_min && b >= rate(a). cover_schedule[k] (k >= 1) is the minimum
// number of elements saturation gives a level-k node; missing entries mean 1.
struct NotionParams {
  std::uint64_t a_min = 0;
  RateFunction rate = RateFunction::affine(2);
  std::vector<std::uint32_t> cover_schedule;
  bool allow_empty = false;

  std::uint32_t cover(std::uint32_t level) const;
  std::string describe() const;
};

// Throws ContractViolation when the rate is not increasing with rate(x) > x
// on the sampled range starting at a_min.
void validate_params(const NotionParams& p);

bool is_valid_level0(const Estimator& e, const NotionParams& p);
// Every pair valid, every set non-empty (unless allowed).
bool is_valid(const Estimator& e, const NotionParams& p);

// Pointwise-stricter merge. Level-0 membership of the result is the
// intersection of both memberships.
NotionParams intersect_params(const NotionParams& p, const NotionParams& q);

// Whether every level-0 membership of `stricter` is one of `laxer`,
// checked for a, b below `limit`.
bool membership_contained(const NotionParams& stricter, const NotionParams& laxer,
                          std::uint64_t limit = 256);

// The acceptance relation for the suffix of `s` starting at prefix position
// `from`, with outer variables fixed by `partial`. e.level() must equal the
// number of remaining set quantifiers.
bool passes(const Sentence& s, std::size_t from, const Estimator& e,
            const WitnessAssignment& partial);

// passes(s, 0, e, {}); for a quantifier-free sentence e must be a pair.
bool truth_by_estimator(const Sentence& s, const Estimator& e);

// Smallest level-0 estimator that is decisive for `s` under p: it starts at or
// above the tail threshold and spans a full period, so it reports the exact
// tail truth for every assignment. `variant` shifts a upward, giving distinct
// decisive pairs.
Estimator decisive_pair(const Sentence& s, const NotionParams& p, std::uint64_t variant = 0);

// Nested estimator of the given level built only from decisive pairs, with
// cover_schedule elements per level.
Estimator decisive_estimator(const Sentence& s, const NotionParams& p, std::uint32_t level,
                             std::uint64_t variant = 0);

// The least p-valid estimator: single element at each level, leaf
// (a_min, rate(a_min)). Not decisive in general.
Estimator minimal_estimator(const NotionParams& p, std::uint32_t level);

struct SaturationOptions {
  std::size_t max_iterations = 10000;
};

struct SaturationStats {
  std::size_t repairs = 0;
  std::size_t padded = 0;
};

// Completes `seed` (or an empty estimator) into one whose verdict can no
// longer be defeated. Repeatedly compares each node's verdict with the
// verdict of a decisive reference at the same node; a false existential
// admitting a passing pattern, or a universal with a pattern passing no
// element, gets a decisive sub-estimator added. Disagreements caused by an
// element are pushed down into that element. Patterns are tried in
// increasing order and elements in sorted order.
//
// Throws NonConvergence when the cap is hit or a seeded level-0 pair is the
// only thing standing in the way (pairs cannot be extended by adding).
Estimator saturate(const Sentence& s, const NotionParams& p,
                   const std::optional<Estimator>& seed = std::nullopt,
                   const SaturationOptions& options = {}, SaturationStats* stats = nullptr);

struct SweepResult {
  std::vector<bool> verdicts;          // saturated verdict per schedule entry
  std::vector<bool> minimal_verdicts;  // verdict of minimal_estimator per entry
  std::size_t stabilization_index = 0;
  std::size_t minimal_stabilization_index = 0;
};

// Index of the first position after which all values are equal.
std::size_t stabilization_index(const std::vector<bool>& values);

// Saturates under each params in order and records verdicts. The schedule
// must be monotone in strictness (ContractViolation otherwise).
SweepResult stabilization_sweep(const Sentence& s, const std::vector<NotionParams>& schedule,
                                const SaturationOptions& options = {});

// Random element from the sufficient sub-notion (decisive leaves with random
// extra slack), of the given level. Used to probe closure robustness.
Estimator random_sufficient_element(const Sentence& s, const NotionParams& p,
                                    std::uint32_t level, std::mt19937_64& rng);

}  // namespace finitist::estimators

#endif  // FINITIST_ESTIMATORS_HPP
