#include "finitist/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "finitist/errors.hpp"
#include "finitist/estimators.hpp"
#include "finitist/fastgrow.hpp"
#include "finitist/formulas.hpp"
#include "finitist/game_families.hpp"
#include "finitist/games.hpp"
#include "finitist/oracles.hpp"
#include "finitist/wellfounded.hpp"

namespace finitist::cli {

namespace {

using nlohmann::json;

const std::vector<std::pair<ExperimentKind, std::string>>& kind_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> table = {
      {ExperimentKind::kEstimatorTruth, "estimator_truth"},
      {ExperimentKind::kStabilizationSweep, "stabilization_sweep"},
      {ExperimentKind::kWfSweep, "wf_sweep"},
      {ExperimentKind::kJumpTower, "jump_tower"},
      {ExperimentKind::kGameFamily, "game_family"}};
  return table;
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"tree",           "sigma20",         "priority",
                                                 "estimator",      "priority_parity", "sigma20_margins",
                                                 "estimator_wb",   "estimator_control"};
  return names;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(path + key, e.what());
  }
}

std::size_t positive(const json& j, const std::string& key, const std::string& path, std::size_t fallback,
                     std::size_t max) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) fail(path + key, "must be a positive integer");
  const auto n = v.get<std::uint64_t>();
  if (n > max) fail(path + key, "exceeds " + std::to_string(max));
  return n;
}

std::size_t count_field(const json& j, const std::string& key, const std::string& path, std::size_t fallback,
                        std::size_t max) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(path + key, "must be a non-negative integer");
  const auto n = v.get<std::uint64_t>();
  if (n > max) fail(path + key, "exceeds " + std::to_string(max));
  return n;
}

void check_rate(const std::string& id, const std::string& path) {
  try {
    (void)RateFunction::parse(id);
  } catch (const std::exception& e) {
    fail(path, "unknown rate '" + id + "': " + e.what());
  }
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string pad(std::size_t i, int width = 5) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << i;
  return os.str();
}

std::string bits(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

// ---- case tasks -------------------------------------------------------------

struct Task {
  std::string id;
  std::function<CaseRecord()> run;
};

std::vector<CorpusEntry> build_corpus(const ExperimentConfig& c) {
  std::vector<CorpusEntry> out;
  for (auto& e : gen_corpus(c.seed, c.corpus_count, c.limits)) {
    if (e.hand_written && !c.hand_written) continue;
    out.push_back(std::move(e));
  }
  if (!c.corpus_file.empty()) {
    std::ifstream in(c.corpus_file);
    if (!in) throw ValidationError("corpus.file: cannot open '" + c.corpus_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto entries = read_corpus(ss.str());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      entries[i].id = "file-" + pad(i, 4);
      out.push_back(std::move(entries[i]));
    }
  }
  for (std::size_t i = 0; i < c.sentences.size(); ++i) {
    CorpusEntry e;
    e.id = "inline-" + pad(i, 4);
    e.sentence = formulas::parse_sentence(c.sentences[i]);
    e.truth = formulas::brute_truth(e.sentence);
    out.push_back(std::move(e));
  }
  return out;
}

estimators::NotionParams notion(const ExperimentConfig& c, const std::string& rate, std::uint64_t a_min) {
  estimators::NotionParams p;
  p.a_min = a_min;
  p.rate = RateFunction::parse(rate);
  p.cover_schedule = c.cover_schedule;
  return p;
}

std::vector<Task> estimator_truth_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const auto corpus = build_corpus(c);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusEntry e = corpus[i];
    tasks.push_back({"c" + pad(i), [c, e, i] {
                       CaseRecord r;
                       r.id = "c" + pad(i);
                       r.input = formulas::render_sentence(e.sentence);
                       r.detail = e.id;
                       const auto p = notion(c, c.rate, formulas::sentence_size(e.sentence));
                       estimators::SaturationOptions opt;
                       opt.max_iterations = c.budgets.max_iterations;
                       const auto s = estimators::saturate(e.sentence, p, std::nullopt, opt);
                       const bool v = estimators::truth_by_estimator(e.sentence, s);
                       const bool oracle = formulas::brute_truth(e.sentence);
                       r.verdict = v ? "true" : "false";
                       r.oracle = oracle ? "true" : "false";
                       r.agree = v == oracle;
                       return r;
                     }});
  }
  return tasks;
}

std::vector<Task> sweep_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const auto corpus = build_corpus(c);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusEntry e = corpus[i];
    tasks.push_back({"c" + pad(i), [c, e, i] {
                       CaseRecord r;
                       r.id = "c" + pad(i);
                       r.input = formulas::render_sentence(e.sentence);
                       const bool oracle = formulas::brute_truth(e.sentence);
                       r.oracle = oracle ? "true" : "false";
                       estimators::SaturationOptions opt;
                       opt.max_iterations = c.budgets.max_iterations;
                       const std::uint64_t size = formulas::sentence_size(e.sentence);
                       r.agree = true;
                       std::size_t index = 0;
                       std::string minimal;
                       for (std::uint64_t a_min : {std::uint64_t{0}, size}) {
                         std::vector<estimators::NotionParams> schedule;
                         for (std::uint64_t k : c.rate_constants) {
                           schedule.push_back(notion(c, "affine:" + std::to_string(k), a_min));
                         }
                         const auto res = estimators::stabilization_sweep(e.sentence, schedule, opt);
                         if (!r.verdict.empty()) r.verdict += ' ';
                         r.verdict += "a" + std::to_string(a_min) + "=" + bits(res.verdicts);
                         if (!minimal.empty()) minimal += ' ';
                         minimal += "a" + std::to_string(a_min) + "=" + bits(res.minimal_verdicts);
                         index = std::max(index, res.stabilization_index);
                         r.agree = r.agree && !res.verdicts.empty() && res.verdicts.back() == oracle;
                       }
                       r.stabilization_index = index;
                       r.detail = "minimal " + minimal;
                       return r;
                     }});
  }
  return tasks;
}

std::vector<std::string> wf_relation_names(const ExperimentConfig& c) {
  std::vector<std::string> names = c.relations;
  for (std::size_t i = 0; i < c.dags; ++i) {
    names.push_back("dag:" + std::to_string(c.seed * 1000 + i) + ":" + std::to_string(c.graph_nodes) + ":0.3");
  }
  for (std::size_t i = 0; i < c.cyclic; ++i) {
    names.push_back("cyclic:" + std::to_string(c.seed * 1000 + i) + ":" + std::to_string(c.graph_nodes) +
                    ":0.3");
  }
  return names;
}

std::vector<Task> wf_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const auto names = wf_relation_names(c);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string name = names[i];
    tasks.push_back({"r" + pad(i), [c, name, i] {
                       using wellfounded::Truth;
                       CaseRecord r;
                       r.id = "r" + pad(i);
                       r.input = name;
                       const auto rel = wellfounded::RelationSpec::parse(name);
                       const Truth truth = rel.ground_truth();
                       r.oracle = truth == Truth::kWellFounded ? "W" : "I";
                       const std::uint64_t floor = wellfounded::input_size(rel, rel.start());
                       bool sound = true;
                       bool monotone = true;
                       bool stabilized = false;
                       std::optional<std::size_t> best;
                       for (const std::string& id : c.wf_rates) {
                         const RateFunction f = RateFunction::parse(id);
                         std::string row;
                         std::optional<char> last;
                         std::size_t since = c.min_length;
                         bool seen_evidence = false;
                         for (std::size_t len = c.min_length; len <= c.max_length; ++len) {
                           char v = 'B';
                           try {
                             const auto A = fastgrow::make_fastseq_above(f, len, Natural(floor), fastgrow::Variant::kPlain,
                                                                         1, NumberBudget{c.budgets.max_bits});
                             v = wellfounded::bounded_wf_search(rel, rel.start(), A).verdict == Truth::kWellFounded ? 'W'
                                                                                                                   : 'I';
                           } catch (const BudgetExceeded&) {
                           }
                           row += v;
                           if (v == 'B') continue;
                           if (v == 'W' && truth == Truth::kIllFounded) sound = false;
                           if (truth == Truth::kIllFounded && seen_evidence && v == 'W') monotone = false;
                           if (v == 'I') seen_evidence = true;
                           if (!last || *last != v) since = len;
                           last = v;
                         }
                         if (last && *last == r.oracle[0]) {
                           stabilized = true;
                           if (!best || since < *best) best = since;
                         }
                         if (!r.verdict.empty()) r.verdict += ' ';
                         r.verdict += id + "=" + row;
                       }
                       r.stabilization_index = best;
                       r.agree = sound && monotone && stabilized;
                       r.detail = std::string(sound ? "" : "unsound ") + (monotone ? "" : "flip ") +
                                  (stabilized ? "stable" : "unstable");
                       return r;
                     }});
  }
  return tasks;
}

std::vector<Task> jump_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  const auto machines = wellfounded::machine_catalog(c.seed, c.machines);
  std::vector<std::vector<bool>> direct;
  for (std::uint32_t level = 0; level <= c.levels; ++level) direct.push_back(oracles::jump_direct(machines, level));
  for (std::uint32_t level = 0; level <= c.levels; ++level) {
    for (std::uint64_t margin : c.margins) {
      const std::string id = "L" + std::to_string(level) + "-m" + pad(margin, 3);
      tasks.push_back({id, [c, machines, direct, level, margin, id] {
                         CaseRecord r;
                         r.id = id;
                         r.input = "level " + std::to_string(level) + " margin " + std::to_string(margin);
                         const auto A = fastgrow::make_fastseq_above(RateFunction::affine(2), 16,
                                                                     Natural(machines.size()),
                                                                     fastgrow::Variant::kPlain, margin);
                         std::vector<bool> tower;
                         for (std::size_t n = 0; n < machines.size(); ++n) {
                           tower.push_back(wellfounded::jump_tower_eval(level, machines, n, A));
                         }
                         r.verdict = bits(tower);
                         r.oracle = bits(direct[level]);
                         r.agree = r.verdict == r.oracle;
                         return r;
                       }});
    }
  }
  return tasks;
}

std::mt19937_64 case_rng(std::uint64_t seed, std::size_t family, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

std::vector<Task> game_tasks(const ExperimentConfig& c) {
  using namespace games;
  std::vector<Task> tasks;
  const auto fams = families::all_families();
  const games::SolveBudget budget{c.budgets.max_nodes};
  for (std::size_t fi = 0; fi < c.families.size(); ++fi) {
    const std::string fam = c.families[fi];
    const auto it = std::find_if(fams.begin(), fams.end(), [&](const auto& f) { return f.name == fam; });
    if (it != fams.end()) {
      const auto make = it->make;
      for (std::size_t i = 0; i < c.games_per_family; ++i) {
        const std::string id = fam + "-" + pad(i);
        tasks.push_back({id, [c, make, fi, i, id, budget] {
                           CaseRecord r;
                           r.id = id;
                           auto rng = case_rng(c.seed, fi, i);
                           const GameSpec g = make(rng);
                           r.input = g.name + " horizon " + std::to_string(g.horizon);
                           const Outcome v = solve(g, budget).value;
                           const Outcome o = oracles::enumerate_value(g);
                           r.verdict = outcome_name(v);
                           r.oracle = outcome_name(o);
                           r.agree = v == o;
                           return r;
                         }});
      }
    } else if (fam == "priority_parity") {
      for (std::size_t i = 0; i < c.games_per_family; ++i) {
        const std::string id = fam + "-" + pad(i);
        tasks.push_back({id, [c, fi, i, id, budget] {
                           CaseRecord r;
                           r.id = id;
                           auto rng = case_rng(c.seed, fi, i);
                           const std::size_t states = 2 + rng() % 7;
                           const auto k = 1 + static_cast<std::uint32_t>(rng() % 3);
                           const Arena a = random_arena(rng, states, k, 3);
                           r.input = std::to_string(states) + " states, priorities 0.." + std::to_string(k);
                           const RateFunction f = RateFunction::affine(1);
                           std::optional<Outcome> first;
                           bool constant = true;
                           Outcome last = Outcome::kDraw;
                           // Margins are multiples of |V|.
                           for (std::uint64_t m : c.margins) {
                             const std::uint64_t margin = m * states;
                             const std::size_t horizon = 3 * timeout_at(f, k, 0, margin);
                             PriorityGameSpec p{a, horizon, make_timeouts(f, k, horizon, margin)};
                             last = solve(build_priority_game(p), budget).value;
                             if (!r.verdict.empty()) r.verdict += ' ';
                             r.verdict += std::to_string(margin) + ":" + outcome_name(last);
                             if (first && *first != last) constant = false;
                             if (!first) first = last;
                           }
                           const Player z = oracles::parity_winner(a);
                           r.oracle = z == Player::kI ? "I" : "II";
                           r.agree = constant && outcome_name(last) == r.oracle;
                           return r;
                         }});
      }
    } else if (fam == "sigma20_margins") {
      const auto names = phi_names();
      for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string id = fam + "-" + pad(i);
        const std::string phi = names[i];
        tasks.push_back({id, [c, phi, id, budget] {
                           CaseRecord r;
                           r.id = id;
                           r.input = "phi " + phi + " horizon 3";
                           std::vector<std::string> winners;
                           for (std::uint64_t m : c.margins) {
                             const auto g = fastgrow::make_fastseq(RateFunction::affine(1), 512,
                                                                   fastgrow::Variant::kPlain, m);
                             const Outcome v = solve(build_sigma20_game(phi_catalog(phi), g, 3), budget).value;
                             winners.push_back(outcome_name(v));
                             if (!r.verdict.empty()) r.verdict += ' ';
                             r.verdict += std::to_string(m) + ":" + winners.back();
                           }
                           r.oracle = winners.back();
                           r.agree = std::all_of(winners.begin(), winners.end(),
                                                 [&](const std::string& w) { return w == winners.back(); });
                           return r;
                         }});
      }
    } else if (fam == "estimator_wb") {
      const auto corpus = families::well_behaved_corpus(c.seed, std::max<std::size_t>(10, c.games_per_family / 5));
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const std::string id = fam + "-" + pad(i);
        const auto wb = corpus[i];
        tasks.push_back({id, [wb, id, budget] {
                           CaseRecord r;
                           r.id = id;
                           r.input = formulas::render_sentence(wb.sentence) + " bitlen " + std::to_string(wb.bitlen);
                           const auto P = tail_predicate(wb.sentence.matrix);
                           const bool behaved = check_well_behaved(P, wb.s, wb.bitlen);
                           const GameSpec g = build_estimator_game(P, wb.s, wb.bitlen);
                           const Outcome v = solve(g, budget).value;
                           const Outcome o = oracles::enumerate_value(g);
                           r.verdict = outcome_name(v);
                           r.oracle = outcome_name(o);
                           r.agree = behaved && v == o && v != Outcome::kDraw;
                           r.detail = behaved ? "well-behaved" : "not well-behaved";
                           return r;
                         }});
      }
    } else if (fam == "estimator_control") {
      const std::string id = fam + "-" + pad(0);
      tasks.push_back({id, [id, budget] {
                         CaseRecord r;
                         r.id = id;
                         r.input = "least a even, mixed-parity level 3";
                         const auto s = families::mixed_parity_level3();
                         const auto P = families::min_a_even();
                         const bool behaved = check_well_behaved(P, s, 2);
                         const GameSpec g = build_estimator_game(P, s, 2);
                         const Outcome v = solve(g, budget).value;
                         r.verdict = outcome_name(v);
                         r.oracle = outcome_name(oracles::enumerate_value(g));
                         r.agree = !behaved && v == Outcome::kDraw && r.verdict == r.oracle;
                         r.detail = behaved ? "well-behaved" : "not well-behaved";
                         return r;
                       }});
    }
  }
  return tasks;
}

std::vector<Task> make_tasks(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::kEstimatorTruth: return estimator_truth_tasks(c);
    case ExperimentKind::kStabilizationSweep: return sweep_tasks(c);
    case ExperimentKind::kWfSweep: return wf_tasks(c);
    case ExperimentKind::kJumpTower: return jump_tasks(c);
    case ExperimentKind::kGameFamily: return game_tasks(c);
  }
  return {};
}

CaseRecord run_task(const Task& t) {
  const auto start = std::chrono::steady_clock::now();
  CaseRecord r;
  try {
    r = t.run();
  } catch (const BudgetExceeded& e) {
    r.status = "budget";
    r.detail = e.what();
  } catch (const NonConvergence& e) {
    r.status = "budget";
    r.detail = e.what();
  } catch (const std::exception& e) {
    r.status = "error";
    r.detail = e.what();
  }
  r.id = t.id;
  if (r.status != "ok") r.agree = false;
  r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string kind_name(ExperimentKind k) {
  for (const auto& [kind, name] : kind_table()) {
    if (kind == k) return name;
  }
  return "?";
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config", "must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("kind")) fail("kind", "missing");
  const std::string kind = get<std::string>(j, "kind", "", "");
  const auto& table = kind_table();
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.second == kind; });
  if (it == table.end()) fail("kind", "unknown experiment '" + kind + "'");
  c.kind = it->first;
  c.seed = get<std::uint64_t>(j, "seed", "", c.seed);
  c.threads = positive(j, "threads", "", c.threads, 256);
  if (j.contains("budgets")) {
    const json& b = j.at("budgets");
    if (!b.is_object()) fail("budgets", "must be an object");
    c.budgets.max_bits = positive(b, "max_bits", "budgets.", c.budgets.max_bits, 1u << 24);
    c.budgets.max_iterations = positive(b, "max_iterations", "budgets.", c.budgets.max_iterations, 100'000'000);
    c.budgets.max_nodes = positive(b, "max_nodes", "budgets.", c.budgets.max_nodes, 4'000'000'000ULL);
  }
  if (j.contains("corpus")) {
    const json& k = j.at("corpus");
    if (!k.is_object()) fail("corpus", "must be an object");
    c.corpus_count = count_field(k, "count", "corpus.", c.corpus_count, 100000);
    c.corpus_file = get<std::string>(k, "file", "corpus.", "");
    c.hand_written = get<bool>(k, "hand_written", "corpus.", true);
    c.sentences = get<std::vector<std::string>>(k, "sentences", "corpus.", {});
    for (std::size_t i = 0; i < c.sentences.size(); ++i) {
      try {
        (void)formulas::parse_sentence(c.sentences[i]);
      } catch (const std::exception& e) {
        fail("corpus.sentences[" + std::to_string(i) + "]", "'" + c.sentences[i] + "': " + e.what());
      }
    }
    if (k.contains("limits")) {
      const json& l = k.at("limits");
      const std::string p = "corpus.limits.";
      c.limits.max_quantifiers = static_cast<std::uint32_t>(positive(l, "max_quantifiers", p, 3, 3));
      c.limits.max_window = static_cast<std::uint32_t>(positive(l, "max_window", p, 3, 3));
      c.limits.max_period = positive(l, "max_period", p, 6, 6);
      c.limits.max_threshold = count_field(l, "max_threshold", p, 8, 8);
      c.limits.max_depth = static_cast<std::uint32_t>(positive(l, "max_depth", p, 3, 6));
    }
  }
  c.rate = get<std::string>(j, "rate", "", c.rate);
  check_rate(c.rate, "rate");
  c.cover_schedule = get<std::vector<std::uint32_t>>(j, "cover_schedule", "", c.cover_schedule);
  for (std::size_t i = 0; i < c.cover_schedule.size(); ++i) {
    if (c.cover_schedule[i] > 64) fail("cover_schedule[" + std::to_string(i) + "]", "exceeds 64");
  }
  c.rate_constants = get<std::vector<std::uint64_t>>(j, "rate_constants", "", c.rate_constants);
  for (std::size_t i = 0; i < c.rate_constants.size(); ++i) {
    if (c.rate_constants[i] == 0 || c.rate_constants[i] > (1u << 20)) {
      fail("rate_constants[" + std::to_string(i) + "]", "must be in 1..2^20");
    }
  }
  c.relations = get<std::vector<std::string>>(j, "relations", "", c.relations);
  for (std::size_t i = 0; i < c.relations.size(); ++i) {
    try {
      (void)wellfounded::RelationSpec::parse(c.relations[i]);
    } catch (const std::exception& e) {
      fail("relations[" + std::to_string(i) + "]", e.what());
    }
  }
  c.dags = count_field(j, "dags", "", c.dags, 10000);
  c.cyclic = count_field(j, "cyclic", "", c.cyclic, 10000);
  c.graph_nodes = positive(j, "graph_nodes", "", c.graph_nodes, 4096);
  if (c.cyclic > 0 && c.graph_nodes < 2) fail("graph_nodes", "cyclic graphs need at least 2 nodes");
  c.wf_rates = get<std::vector<std::string>>(j, "wf_rates", "", c.wf_rates);
  for (std::size_t i = 0; i < c.wf_rates.size(); ++i) check_rate(c.wf_rates[i], "wf_rates[" + std::to_string(i) + "]");
  if (j.contains("lengths")) {
    const auto l = get<std::vector<std::size_t>>(j, "lengths", "", {});
    if (l.size() != 2 || l[0] < 2 || l[0] > l[1] || l[1] > 4096) fail("lengths", "must be [min, max] with 2 <= min <= max <= 4096");
    c.min_length = l[0];
    c.max_length = l[1];
  }
  c.machines = positive(j, "machines", "", c.machines, 1000);
  c.levels = static_cast<std::uint32_t>(count_field(j, "levels", "", c.levels, 16));
  c.margins = get<std::vector<std::uint64_t>>(j, "margins", "", c.margins);
  if (c.margins.empty()) fail("margins", "must not be empty");
  for (std::size_t i = 0; i < c.margins.size(); ++i) {
    if (c.margins[i] == 0 || c.margins[i] > 64) fail("margins[" + std::to_string(i) + "]", "must be in 1..64");
  }
  c.families = get<std::vector<std::string>>(j, "families", "", c.families);
  for (std::size_t i = 0; i < c.families.size(); ++i) {
    const auto& names = family_names();
    if (std::find(names.begin(), names.end(), c.families[i]) == names.end()) {
      fail("families[" + std::to_string(i) + "]", "unknown family '" + c.families[i] + "'");
    }
  }
  c.games_per_family = positive(j, "games_per_family", "", c.games_per_family, 100000);
  c.out = get<std::string>(j, "out", "", "");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["budgets"] = {{"max_bits", c.budgets.max_bits},
                  {"max_iterations", c.budgets.max_iterations},
                  {"max_nodes", c.budgets.max_nodes}};
  j["corpus"] = {{"count", c.corpus_count},
                 {"file", c.corpus_file},
                 {"hand_written", c.hand_written},
                 {"sentences", c.sentences},
                 {"limits",
                  {{"max_quantifiers", c.limits.max_quantifiers},
                   {"max_window", c.limits.max_window},
                   {"max_period", c.limits.max_period},
                   {"max_threshold", c.limits.max_threshold},
                   {"max_depth", c.limits.max_depth}}}};
  j["rate"] = c.rate;
  j["cover_schedule"] = c.cover_schedule;
  j["rate_constants"] = c.rate_constants;
  j["relations"] = c.relations;
  j["dags"] = c.dags;
  j["cyclic"] = c.cyclic;
  j["graph_nodes"] = c.graph_nodes;
  j["wf_rates"] = c.wf_rates;
  j["lengths"] = {c.min_length, c.max_length};
  j["machines"] = c.machines;
  j["levels"] = c.levels;
  j["margins"] = c.margins;
  j["families"] = c.families;
  j["games_per_family"] = c.games_per_family;
  j["out"] = c.out;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = config_to_json(c);
  // Neither affects results.
  j.erase("out");
  j.erase("threads");
  return hex64(fnv1a(j.dump()));
}

std::size_t Report::agreed() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseRecord& r) { return r.agree; }));
}

double Report::agreement_rate() const {
  return cases.empty() ? 1.0 : static_cast<double>(agreed()) / static_cast<double>(cases.size());
}

bool Report::budget_exhausted() const {
  return std::any_of(cases.begin(), cases.end(), [](const CaseRecord& r) { return r.status == "budget"; });
}

bool Report::disagreement() const {
  return std::any_of(cases.begin(), cases.end(), [](const CaseRecord& r) { return r.status != "budget" && !r.agree; });
}

Report run(const ExperimentConfig& c) {
  Report report;
  report.kind = c.kind;
  report.config_hash = config_hash(c);
  const std::vector<Task> tasks = make_tasks(c);
  std::vector<CaseRecord> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(tasks[i]);
  };
  const std::size_t n = std::min(c.threads, std::max<std::size_t>(1, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(results.begin(), results.end(), [](const CaseRecord& a, const CaseRecord& b) { return a.id < b.id; });
  report.cases = std::move(results);
  return report;
}

std::string to_csv(const Report& r) {
  std::string out = "id,config_hash,input,verdict,oracle,agree,stabilization_index,status,detail\n";
  for (const CaseRecord& c : r.cases) {
    out += csv_field(c.id) + ',' + r.config_hash + ',' + csv_field(c.input) + ',' + csv_field(c.verdict) + ',' +
           csv_field(c.oracle) + ',' + (c.agree ? "1" : "0") + ',' +
           (c.stabilization_index ? std::to_string(*c.stabilization_index) : "") + ',' + c.status + ',' +
           csv_field(c.detail) + '\n';
  }
  return out;
}

json summary_json(const Report& r, const ExperimentConfig& c) {
  json j;
  j["experiment"] = kind_name(r.kind);
  j["config"] = config_to_json(c);
  j["config_hash"] = r.config_hash;
  j["cases"] = r.cases.size();
  j["agreed"] = r.agreed();
  j["agreement_rate"] = r.agreement_rate();
  j["status"] = r.budget_exhausted() ? "budget_exhausted" : "complete";
  j["exit_code"] = exit_code(r);
  std::optional<std::size_t> max_index;
  double total = 0;
  json timing = json::array();
  json failures = json::array();
  for (const CaseRecord& cr : r.cases) {
    total += cr.millis;
    timing.push_back({{"id", cr.id}, {"millis", cr.millis}});
    if (cr.stabilization_index) max_index = std::max(max_index.value_or(0), *cr.stabilization_index);
    if (!cr.agree) failures.push_back({{"id", cr.id}, {"status", cr.status}, {"detail", cr.detail}});
  }
  j["thresholds"] = {{"max_stabilization_index", max_index ? json(*max_index) : json(nullptr)}};
  j["failures"] = failures;
  j["timing"] = {{"total_millis", total}, {"cases", timing}};
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  j["timestamp"] = ts.str();
  return j;
}

void write_report(const Report& r, const ExperimentConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "cases.csv", std::ios::binary);
    out << to_csv(r);
  }
  std::ofstream out(dir / "report.json");
  out << summary_json(r, c).dump(2) << '\n';
}

int exit_code(const Report& r) {
  if (r.disagreement()) return 2;
  if (r.budget_exhausted()) return 3;
  return 0;
}

}  // namespace finitist::cli
