#ifndef FINITIST_CORPUS_HPP
#define FINITIST_CORPUS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "finitist/formulas.hpp"

namespace finitist::cli {

struct CorpusLimits {
  std::uint32_t max_quantifiers = 3;
  std::uint32_t max_window = 3;
  std::uint64_t max_period = 6;
  std::uint64_t max_threshold = 8;
  std::uint32_t max_depth = 3;  // nesting depth of generated matrices
};

struct CorpusEntry {
  std::string id;
  formulas::Sentence sentence;
  bool truth = false;  // brute_truth, or the stated value for hand-written cases
  bool hand_written = false;
};

// Random sentence within the limits. Every modulus divides one base period
// <= max_period, so the lcm stays inside the limit.
formulas::Sentence random_sentence(std::mt19937_64& rng, const CorpusLimits& limits = {});

// Edge cases with their intended truth values: tautology, contradiction,
// boundary thresholds, periodic tails whose plain negation is not the
// negation.
std::vector<CorpusEntry> hand_written_corpus();

// Hand-written cases followed by `count` deduplicated random sentences with
// brute_truth attached. Deterministic in the seed.
std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, std::size_t count,
                                    const CorpusLimits& limits = {});

// One case per line: `<0|1>\t<sentence>`; `#` starts a comment line.
std::string write_corpus(const std::vector<CorpusEntry>& entries);
// Throws ParseError/ValidationError whose message names the failing line.
std::vector<CorpusEntry> read_corpus(std::string_view text);

}  // namespace finitist::cli

#endif  // FINITIST_CORPUS_HPP
