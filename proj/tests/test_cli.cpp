#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "finitist/corpus.hpp"
#include "finitist/errors.hpp"
#include "finitist/experiments.hpp"
#include "finitist/formulas.hpp"

using namespace finitist;
using namespace finitist::cli;
using nlohmann::json;

namespace {

std::string validation_message(const json& j) {
  try {
    (void)parse_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

TEST_CASE("corpus generation is deterministic and round-trips") {
  const auto a = gen_corpus(1, 50);
  const auto b = gen_corpus(1, 50);
  CHECK(write_corpus(a) == write_corpus(b));
  CHECK(a.size() == hand_written_corpus().size() + 50);
  CHECK(gen_corpus(1, 0).size() == hand_written_corpus().size());
  const auto back = read_corpus(write_corpus(a));
  REQUIRE(back.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(formulas::same_sentence(back[i].sentence, a[i].sentence));
    CHECK(back[i].truth == a[i].truth);
  }
}

TEST_CASE("hand-written truths match brute force") {
  for (const auto& e : hand_written_corpus()) {
    INFO(e.id);
    CHECK(formulas::brute_truth(e.sentence) == e.truth);
  }
}

TEST_CASE("config validation names the field") {
  CHECK(starts_with(validation_message(json::array()), "config"));
  CHECK(starts_with(validation_message({{"seed", 1}}), "kind"));
  CHECK(starts_with(validation_message({{"kind", "nope"}}), "kind"));
  CHECK(starts_with(validation_message({{"kind", "wf_sweep"}, {"wf_rates", {"affine:2", "bogus"}}}), "wf_rates[1]"));
  CHECK(starts_with(validation_message({{"kind", "game_family"}, {"families", {"chess"}}}), "families[0]"));
  CHECK(starts_with(validation_message({{"kind", "estimator_truth"}, {"budgets", {{"max_nodes", 0}}}}),
                    "budgets.max_nodes"));
  CHECK(starts_with(validation_message({{"kind", "estimator_truth"}, {"budgets", {{"max_bits", 1LL << 40}}}}),
                    "budgets.max_bits"));
  const std::string m0 = validation_message(
      {{"kind", "estimator_truth"}, {"corpus", {{"sentences", {"AA y. y>=1", "EX X. AA y. y%0=0"}}}}});
  CHECK(starts_with(m0, "corpus.sentences[1]"));
  CHECK(m0.find("y%0=0") != std::string::npos);
  CHECK(validation_message({{"kind", "jump_tower"}}).empty());
}

TEST_CASE("config round trip and hash") {
  const ExperimentConfig c = parse_config({{"kind", "wf_sweep"}, {"seed", 7}, {"dags", 3}});
  const ExperimentConfig d = parse_config(config_to_json(c));
  CHECK(config_hash(c) == config_hash(d));
  CHECK(config_hash(c).size() == 16);
  ExperimentConfig e = c;
  e.seed = 8;
  CHECK(config_hash(e) != config_hash(c));
  e = c;
  e.threads = 8;
  e.out = "elsewhere";
  CHECK(config_hash(e) == config_hash(c));
}

TEST_CASE("estimator_truth agrees on the bundled corpus") {
  ExperimentConfig c = parse_config({{"kind", "estimator_truth"}, {"corpus", {{"count", 50}}}});
  const Report r = run(c);
  CHECK(r.cases.size() == 50 + hand_written_corpus().size());
  CHECK(r.agreement_rate() == 1.0);
  CHECK(exit_code(r) == 0);
}

TEST_CASE("wf_sweep stabilizes the catalog to ground truth") {
  const Report r = run(parse_config({{"kind", "wf_sweep"}}));
  REQUIRE(r.cases.size() == 3);
  CHECK(r.cases[0].oracle == "W");
  CHECK(r.cases[1].oracle == "I");
  CHECK(r.cases[2].oracle == "W");
  for (const auto& c : r.cases) CHECK(c.agree);
}

TEST_CASE("same seed gives byte-identical CSV across thread counts") {
  ExperimentConfig c = parse_config({{"kind", "game_family"}, {"games_per_family", 8}, {"threads", 1}});
  const std::string one = to_csv(run(c));
  c.threads = 4;
  CHECK(to_csv(run(c)) == one);
  c.seed = 2;
  CHECK(to_csv(run(c)) != one);
}

TEST_CASE("budget exhaustion is reported per case") {
  ExperimentConfig c = parse_config(
      {{"kind", "game_family"}, {"families", {"priority_parity"}}, {"games_per_family", 4}, {"budgets", {{"max_nodes", 5}}}});
  const Report r = run(c);
  CHECK(r.budget_exhausted());
  CHECK(exit_code(r) == 3);
  CHECK(to_csv(r).find(",budget,") != std::string::npos);
}

TEST_CASE("reports are written with a summary") {
  const auto dir = std::filesystem::temp_directory_path() / "finitist_test_report";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = parse_config({{"kind", "jump_tower"}, {"machines", 6}, {"levels", 1}});
  const Report r = run(c);
  write_report(r, c, dir);
  std::ifstream csv(dir / "cases.csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  CHECK(ss.str() == to_csv(r));
  std::ifstream js(dir / "report.json");
  const json summary = json::parse(js);
  CHECK(summary["config_hash"] == r.config_hash);
  CHECK(summary["agreement_rate"] == 1.0);
  CHECK(summary["cases"] == r.cases.size());
  std::filesystem::remove_all(dir);
}
