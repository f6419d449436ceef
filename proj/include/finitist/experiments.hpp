#ifndef FINITIST_EXPERIMENTS_HPP
#define FINITIST_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finitist/corpus.hpp"

namespace finitist::cli {

enum class ExperimentKind { kEstimatorTruth, kStabilizationSweep, kWfSweep, kJumpTower, kGameFamily };

std::string kind_name(ExperimentKind k);

struct Budgets {
  std::size_t max_bits = 1u << 16;       // naturals
  std::size_t max_iterations = 10000;    // saturation
  std::size_t max_nodes = 20'000'000;    // game search
};

// JSON keys (all optional except "kind"):
//   kind             estimator_truth | stabilization_sweep | wf_sweep |
//                    jump_tower | game_family
//   seed             RNG seed (default 1)
//   threads          worker threads (default 1); output order is by case id
//   budgets          {max_bits, max_iterations, max_nodes}
//   corpus           {count, file, sentences: [text], hand_written: bool,
//                     limits: {max_quantifiers, max_window, max_period,
//                              max_threshold, max_depth}}
//   rate             estimator rate id (estimator_truth, default affine:2)
//   cover_schedule   [n, ...]
//   rate_constants   c values of c(x+1) for the sweep (default 1..64, powers of 2)
//   relations        wf catalog names (default pred, succ, omega2)
//   dags, cyclic     number of random graphs added (default 0)
//   graph_nodes      node count of random graphs (default 8)
//   wf_rates         rate ids (default affine:2, pow:2, exp:2)
//   lengths          [min, max] of |A| (default [4, 32])
//   machines         machine catalog size (default 20)
//   levels           highest jump level (default 3)
//   margins          margins for jump/game grids (default [1, 8])
//   families         game families: tree, sigma20, priority, estimator,
//                    priority_parity, sigma20_margins, estimator_wb,
//                    estimator_control
//   games_per_family instances per random family (default 50)
//   out              output directory
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kEstimatorTruth;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  Budgets budgets;

  std::size_t corpus_count = 50;
  std::string corpus_file;
  std::vector<std::string> sentences;
  bool hand_written = true;
  CorpusLimits limits;

  std::string rate = "affine:2";
  std::vector<std::uint32_t> cover_schedule;
  std::vector<std::uint64_t> rate_constants = {1, 2, 4, 8, 16, 32, 64};

  std::vector<std::string> relations = {"pred", "succ", "omega2"};
  std::size_t dags = 0;
  std::size_t cyclic = 0;
  std::size_t graph_nodes = 8;
  std::vector<std::string> wf_rates = {"affine:2", "pow:2", "exp:2"};
  std::size_t min_length = 4;
  std::size_t max_length = 32;

  std::size_t machines = 20;
  std::uint32_t levels = 3;
  std::vector<std::uint64_t> margins = {1, 8};

  std::vector<std::string> families = {"tree", "sigma20", "priority", "estimator"};
  std::size_t games_per_family = 50;

  std::string out;
};

// Throws ValidationError whose message starts with the offending field path
// (e.g. "corpus.sentences[2]: ...").
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& c);
// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct CaseRecord {
  std::string id;
  std::string input;
  std::string verdict;
  std::string oracle;
  bool agree = false;
  std::optional<std::size_t> stabilization_index;
  std::string status = "ok";  // ok | budget | error
  std::string detail;
  double millis = 0;
};

struct Report {
  ExperimentKind kind = ExperimentKind::kEstimatorTruth;
  std::string config_hash;
  std::vector<CaseRecord> cases;  // sorted by id

  std::size_t agreed() const;
  double agreement_rate() const;
  bool budget_exhausted() const;
  bool disagreement() const;
};

// Runs the experiment; cases that hit a budget are kept with status
// "budget".
Report run(const ExperimentConfig& c);

// Case table without timing, so equal configs give byte-identical output.
std::string to_csv(const Report& r);
// Summary with timing and a timestamp.
nlohmann::json summary_json(const Report& r, const ExperimentConfig& c);
// Writes <dir>/report.json and <dir>/cases.csv.
void write_report(const Report& r, const ExperimentConfig& c, const std::filesystem::path& dir);

// 0 all agree, 2 some disagreement, 3 budget exhausted (no disagreement).
int exit_code(const Report& r);

}  // namespace finitist::cli

#endif  // FINITIST_EXPERIMENTS_HPP
