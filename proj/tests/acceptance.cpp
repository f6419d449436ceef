// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finitist/corpus.hpp"
#include "finitist/errors.hpp"
#include "finitist/estimators.hpp"
#include "finitist/experiments.hpp"
#include "finitist/fastgrow.hpp"
#include "finitist/formulas.hpp"

using namespace finitist;
using namespace finitist::estimators;
using cli::parse_config;
using cli::Report;

namespace {

// Seed shared by every criterion.
constexpr std::uint64_t kSeed = 1;
// Generated sentences on top of the hand-written ones.
constexpr std::size_t kCorpusCount = 60;
constexpr double kTruthSeconds = 60;
constexpr double kSweepSeconds = 120;
constexpr double kWfSeconds = 120;
constexpr double kGamesSeconds = 60;
constexpr int kClosureAdds = 20;
constexpr std::uint64_t kMembershipLimit = 64;
constexpr std::size_t kShapes = 100;
constexpr std::size_t kGamesPerFamily = 50;
constexpr std::size_t kRandomGraphs = 100;
constexpr std::size_t kMinWellBehaved = 10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NotionParams params(std::uint64_t a_min, const std::string& rate) {
  NotionParams p;
  p.a_min = a_min;
  p.rate = RateFunction::parse(rate);
  return p;
}

std::size_t disagreements(const Report& r) { return r.cases.size() - r.agreed(); }

std::string first_failure(const Report& r) {
  for (const auto& c : r.cases) {
    if (!c.agree) return " first " + c.id + " [" + c.input + "] " + c.verdict + " vs " + c.oracle + " " + c.detail;
  }
  return "";
}

std::vector<cli::CorpusEntry> corpus() { return cli::gen_corpus(kSeed, kCorpusCount); }

Outcome estimator_truth() {
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = cli::run(parse_config({{"kind", "estimator_truth"}, {"seed", kSeed}, {"corpus", {{"count", kCorpusCount}}}}));
  const double s = seconds_since(t0);
  std::size_t hand_ok = 0;
  for (const auto& e : cli::hand_written_corpus()) hand_ok += formulas::brute_truth(e.sentence) == e.truth;
  const std::size_t hand = cli::hand_written_corpus().size();
  std::ostringstream os;
  os << r.agreed() << "/" << r.cases.size() << " agree (" << kCorpusCount << " generated, " << hand
     << " hand-written, stated truths " << hand_ok << "/" << hand << "), " << s << " s" << first_failure(r);
  return {disagreements(r) == 0 && hand >= 10 && hand_ok == hand && r.cases.size() >= kCorpusCount + 10 &&
              s < kTruthSeconds,
          os.str()};
}

// Verdict rows look like "a0=0011111 a7=1111111".
bool suffix_constant(const std::string& verdict, std::size_t from, char want) {
  std::istringstream in(verdict);
  std::string tok;
  while (in >> tok) {
    const std::string row = tok.substr(tok.find('=') + 1);
    if (row.empty()) return false;
    for (std::size_t i = from; i < row.size(); ++i) {
      if (row[i] != want) return false;
    }
  }
  return true;
}

Outcome stabilization() {
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = cli::run(
      parse_config({{"kind", "stabilization_sweep"}, {"seed", kSeed}, {"corpus", {{"count", kCorpusCount}}}}));
  const double s = seconds_since(t0);
  std::size_t flips = 0;
  for (const auto& c : r.cases) {
    const char want = c.oracle == "true" ? '1' : '0';
    if (!c.stabilization_index || !suffix_constant(c.verdict, *c.stabilization_index, want)) ++flips;
  }
  std::ostringstream os;
  os << r.agreed() << "/" << r.cases.size() << " end at brute truth, " << flips << " post-threshold flips, " << s
     << " s" << first_failure(r);
  return {disagreements(r) == 0 && flips == 0 && s < kSweepSeconds, os.str()};
}

Outcome closure() {
  std::mt19937_64 rng(kSeed);
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t errors = 0;
  for (const auto& entry : corpus()) {
    const auto& s = entry.sentence;
    if (s.depth() == 0) continue;
    try {
      const NotionParams p = params(formulas::sentence_size(s), "affine:2");
      Estimator e = saturate(s, p);
      const bool verdict = truth_by_estimator(s, e);
      for (int i = 0; i < kClosureAdds; ++i) {
        e = add_element(e, random_sufficient_element(s, p, e.level() - 1, rng));
        ++checked;
        violations += truth_by_estimator(s, e) != verdict;
      }
    } catch (const std::exception&) {
      ++errors;
    }
  }
  std::ostringstream os;
  os << violations << " verdict changes over " << checked << " additions, " << errors << " errors";
  return {violations == 0 && errors == 0 && checked > 0, os.str()};
}

Outcome intersection() {
  std::size_t mismatches = 0;
  std::size_t errors = 0;
  std::size_t sentences = 0;
  for (const auto& entry : corpus()) {
    const auto& s = entry.sentence;
    const std::uint64_t size = formulas::sentence_size(s);
    const NotionParams p = params(size, "affine:2");
    const NotionParams q = params(size + 3, "add(1,pow:2)");
    const NotionParams pq = intersect_params(p, q);
    try {
      const bool vp = truth_by_estimator(s, saturate(s, p));
      const bool vq = truth_by_estimator(s, saturate(s, q));
      const bool v = truth_by_estimator(s, saturate(s, pq));
      ++sentences;
      mismatches += !(vp == vq && v == vp);
    } catch (const std::exception&) {
      ++errors;
    }
  }
  const NotionParams p = params(3, "affine:2");
  const NotionParams q = params(5, "add(1,pow:2)");
  const NotionParams pq = intersect_params(p, q);
  std::size_t membership = 0;
  for (std::uint64_t a = 0; a <= kMembershipLimit; ++a) {
    for (std::uint64_t b = a + 1; b <= kMembershipLimit; ++b) {
      const Estimator e = Estimator::pair(a, b);
      membership += is_valid_level0(e, pq) != (is_valid_level0(e, p) && is_valid_level0(e, q));
    }
  }
  std::ostringstream os;
  os << mismatches << " verdict mismatches over " << sentences << " sentences, " << errors << " errors, "
     << membership << " membership mismatches for a<b<=" << kMembershipLimit;
  return {mismatches == 0 && errors == 0 && membership == 0, os.str()};
}

Outcome well_foundedness() {
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = cli::run(
      parse_config({{"kind", "wf_sweep"}, {"seed", kSeed}, {"dags", kRandomGraphs}, {"cyclic", kRandomGraphs}}));
  const double s = seconds_since(t0);
  std::size_t unsound = 0;
  std::size_t unstable = 0;
  std::size_t flips = 0;
  for (const auto& c : r.cases) {
    unsound += c.detail.find("unsound") != std::string::npos;
    unstable += c.detail.find("unstable") != std::string::npos || c.status != "ok";
    flips += c.detail.find("flip") != std::string::npos;
  }
  std::ostringstream os;
  os << r.cases.size() << " relations: " << unsound << " unsound, " << unstable << " unstable, " << flips
     << " flips, " << s << " s" << first_failure(r);
  return {r.cases.size() == 3 + 2 * kRandomGraphs && unsound == 0 && unstable == 0 && flips == 0 &&
              disagreements(r) == 0 && s < kWfSeconds,
          os.str()};
}

Outcome encoding() {
  using namespace finitist::fastgrow;
  const std::vector<std::uint32_t> expected = {0, 1, 1, 2, 1, 1, 1, 3, 0, 0, 1, 2, 1, 1, 4};
  const LevelKSeq worked = parse_levelk("((1,2,3),(4,5,6,7)),((10,11),(12,13,14))");
  const bool example = encode_levelk(worked) == expected;
  std::mt19937_64 rng(kSeed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < kShapes; ++i) {
    const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 4);
    const Shape shape = random_shape(rng, k, 3);
    const LevelKSeq s = make_levelk(RateFunction::parse("id"), k, shape, 1 + rng() % 3);
    for (Terminal t : {Terminal::kKPlusOne, Terminal::kK}) {
      const LevelKSeq back = decode_levelk(encode_levelk(s, t), k, t);
      failures += !(shape_of(back) == shape && back.flat == s.flat && back.root == s.root);
    }
  }
  std::ostringstream os;
  os << "worked example " << (example ? "matches" : "differs") << ", " << failures << " round-trip failures over "
     << kShapes << " shapes";
  return {example && failures == 0, os.str()};
}

Outcome solver_soundness() {
  const Report r = cli::run(parse_config({{"kind", "game_family"},
                                          {"seed", kSeed},
                                          {"families", {"tree", "sigma20", "priority", "estimator"}},
                                          {"games_per_family", kGamesPerFamily}}));
  std::ostringstream os;
  os << r.agreed() << "/" << r.cases.size() << " agree with strategy enumeration" << first_failure(r);
  return {disagreements(r) == 0 && r.cases.size() == 4 * kGamesPerFamily, os.str()};
}

Outcome determinacy() {
  const Report r = cli::run(parse_config({{"kind", "game_family"},
                                          {"seed", kSeed},
                                          {"families", {"estimator_wb", "estimator_control"}},
                                          {"games_per_family", kGamesPerFamily}}));
  std::size_t behaved = 0;
  std::size_t draws = 0;
  std::size_t control_draws = 0;
  for (const auto& c : r.cases) {
    if (c.id.rfind("estimator_wb", 0) == 0) {
      ++behaved;
      draws += c.verdict == "draw";
    } else {
      control_draws += c.verdict == "draw";
    }
  }
  std::ostringstream os;
  os << behaved << " well-behaved instances, " << draws << " draws; negative control draws " << control_draws
     << first_failure(r);
  return {disagreements(r) == 0 && behaved >= kMinWellBehaved && draws == 0 && control_draws >= 1, os.str()};
}

Outcome bounded_games() {
  const auto t0 = std::chrono::steady_clock::now();
  const Report r = cli::run(parse_config({{"kind", "game_family"},
                                          {"seed", kSeed},
                                          {"families", {"sigma20_margins", "priority_parity"}},
                                          {"margins", {1, 2, 8}},
                                          {"games_per_family", kGamesPerFamily}}));
  const double s = seconds_since(t0);
  std::ostringstream os;
  os << r.agreed() << "/" << r.cases.size() << " stable across margins and matching the parity solver, " << s
     << " s" << first_failure(r);
  return {disagreements(r) == 0 && s < kGamesSeconds, os.str()};
}

Outcome reproducibility() {
  const std::vector<nlohmann::json> suite = {
      {{"kind", "estimator_truth"}, {"corpus", {{"count", kCorpusCount}}}},
      {{"kind", "stabilization_sweep"}, {"corpus", {{"count", kCorpusCount}}}},
      {{"kind", "wf_sweep"}, {"dags", kRandomGraphs}, {"cyclic", kRandomGraphs}},
      {{"kind", "jump_tower"}},
      {{"kind", "game_family"},
       {"families",
        {"tree", "sigma20", "priority", "estimator", "priority_parity", "sigma20_margins", "estimator_wb",
         "estimator_control"}},
       {"margins", {1, 2}}},
  };
  auto csv = [&](std::size_t threads) {
    std::string all;
    for (nlohmann::json j : suite) {
      j["seed"] = kSeed;
      j["threads"] = threads;
      all += cli::to_csv(cli::run(parse_config(j)));
    }
    return all;
  };
  const std::string a = csv(1);
  const std::string b = csv(4);
  std::ostringstream os;
  os << "two runs, " << a.size() << " bytes, " << (a == b ? "identical" : "different");
  return {a == b && !a.empty(), os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"estimator truth", estimator_truth},
      {"stabilization", stabilization},
      {"closure robustness", closure},
      {"intersection", intersection},
      {"well-foundedness", well_foundedness},
      {"level-k encoding", encoding},
      {"game solver soundness", solver_soundness},
      {"estimator-game determinacy", determinacy},
      {"bounded and priority games", bounded_games},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
