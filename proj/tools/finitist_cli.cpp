// Command-line front end: single computations and config-driven experiments.
//
// Exit codes: 0 success / all cases agree, 1 usage or configuration error,
// 2 disagreement found, 3 budget exhausted.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "finitist/corpus.hpp"
#include "finitist/errors.hpp"
#include "finitist/estimators.hpp"
#include "finitist/experiments.hpp"
#include "finitist/fastgrow.hpp"
#include "finitist/formulas.hpp"
#include "finitist/game_families.hpp"
#include "finitist/games.hpp"
#include "finitist/oracles.hpp"
#include "finitist/wellfounded.hpp"

using namespace finitist;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::optional<std::size_t> budget;
  std::string out;
};

void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(common.out, std::ios::binary);
  if (!f) throw ValidationError("--out: cannot open '" + common.out + "'");
  f << text;
}

estimators::NotionParams notion(const std::string& rate, std::optional<std::uint64_t> a_min,
                                const std::vector<std::uint32_t>& cover, const formulas::Sentence& s) {
  estimators::NotionParams p;
  p.rate = RateFunction::parse(rate);
  p.a_min = a_min.value_or(formulas::sentence_size(s));
  p.cover_schedule = cover;
  return p;
}

const char* tf(bool b) { return b ? "true" : "false"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finitist: bounded witnesses for tail sentences, fast-growing sequences and finite games"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Random seed (overrides config)");
  app.add_option("--budget", common.budget, "Search-node budget (overrides config)");
  app.add_option("--out", common.out, "Output file, or directory for `run`");

  std::string sentence;
  std::string estimator_text;
  std::string rate = "affine:2";
  std::optional<std::uint64_t> a_min;
  std::vector<std::uint32_t> cover;

  auto* eval = app.add_subcommand("eval", "Truth of a sentence: brute force and by estimator");
  eval->add_option("sentence", sentence, "Sentence, e.g. 'EX X. AA y. X(0)'")->required();
  eval->add_option("--estimator", estimator_text, "Estimator text; saturated when omitted");
  eval->add_option("--rate", rate, "Rate function id");
  eval->add_option("--a-min", a_min, "Least admissible a (default: sentence size)");
  eval->add_option("--cover", cover, "Cover schedule");

  auto* sat = app.add_subcommand("saturate", "Saturate an estimator for a sentence");
  sat->add_option("sentence", sentence)->required();
  sat->add_option("--rate", rate);
  sat->add_option("--a-min", a_min);
  sat->add_option("--cover", cover);
  bool as_json = false;
  sat->add_flag("--json", as_json, "Print the estimator as JSON");

  auto* sweep = app.add_subcommand("sweep", "Stabilization sweep over c(x+1)");
  sweep->add_option("sentence", sentence)->required();
  std::vector<std::uint64_t> constants = {1, 2, 4, 8, 16, 32, 64};
  sweep->add_option("--constants", constants, "Values of c");
  sweep->add_option("--a-min", a_min);

  auto* wf = app.add_subcommand("wf", "Bounded well-foundedness search");
  std::string relation = "pred";
  std::size_t length = 16;
  std::uint64_t margin = 1;
  wf->add_option("relation", relation, "pred, succ, omega2, dag:<seed>:<n>:<d>, cyclic:..., graph:...");
  wf->add_option("--rate", rate);
  wf->add_option("--length", length, "|A|");
  wf->add_option("--margin", margin);

  auto* jump = app.add_subcommand("jump", "Jump tower bits over the machine catalog");
  std::uint32_t level = 2;
  std::size_t machines = 20;
  jump->add_option("--level", level);
  jump->add_option("--machines", machines);
  jump->add_option("--margin", margin);
  jump->add_option("--length", length);

  auto* game = app.add_subcommand("game", "Solve a game from a family");
  std::string family = "tree";
  std::string phi = "echo";
  std::size_t horizon = 3;
  std::size_t states = 4;
  std::uint32_t priorities = 2;
  game->add_option("family", family, "tree, sigma20, priority, estimator");
  game->add_option("--phi", phi, "sigma20: catalog predicate");
  game->add_option("--horizon", horizon, "sigma20: plies");
  game->add_option("--margin", margin, "sigma20: g margin; priority: timeout margin (default |V|)");
  game->add_option("--states", states, "priority: arena size");
  game->add_option("--priorities", priorities, "priority: largest priority");

  auto* corpus = app.add_subcommand("corpus", "Generate a sentence corpus with brute-force truth");
  std::size_t count = 50;
  corpus->add_option("--count", count);

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path;
  std::size_t threads = 0;
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--threads", threads, "Worker threads (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      const auto s = formulas::parse_sentence(sentence);
      const bool brute = formulas::brute_truth(s);
      std::ostringstream os;
      os << "brute " << tf(brute) << '\n';
      const auto e = estimator_text.empty()
                         ? estimators::saturate(s, notion(rate, a_min, cover, s))
                         : estimators::from_text(estimator_text);
      os << "estimator " << tf(estimators::truth_by_estimator(s, e)) << '\n';
      emit(common, os.str());
      return 0;
    }
    if (*sat) {
      const auto s = formulas::parse_sentence(sentence);
      const auto p = notion(rate, a_min, cover, s);
      estimators::SaturationStats stats;
      const auto e = estimators::saturate(s, p, std::nullopt, {}, &stats);
      std::ostringstream os;
      if (as_json) {
        os << estimators::to_json(e).dump() << '\n';
      } else {
        os << estimators::to_text(e) << '\n'
           << "verdict " << tf(estimators::truth_by_estimator(s, e)) << " repairs " << stats.repairs
           << " padded " << stats.padded << " size " << e.size() << '\n';
      }
      emit(common, os.str());
      return 0;
    }
    if (*sweep) {
      const auto s = formulas::parse_sentence(sentence);
      std::vector<estimators::NotionParams> schedule;
      for (auto c : constants) schedule.push_back(notion("affine:" + std::to_string(c), a_min, {}, s));
      const auto r = estimators::stabilization_sweep(s, schedule);
      std::ostringstream os;
      for (std::size_t i = 0; i < constants.size(); ++i) {
        os << "c=" << constants[i] << ' ' << tf(r.verdicts[i]) << " minimal " << tf(r.minimal_verdicts[i]) << '\n';
      }
      os << "stabilization_index " << r.stabilization_index << " brute " << tf(formulas::brute_truth(s)) << '\n';
      emit(common, os.str());
      return 0;
    }
    if (*wf) {
      const auto r = wellfounded::RelationSpec::parse(relation);
      const auto floor = wellfounded::input_size(r, r.start());
      const auto A = fastgrow::make_fastseq_above(RateFunction::parse(rate), length, Natural(floor),
                                                  fastgrow::Variant::kPlain, margin);
      const auto v = wellfounded::bounded_wf_search(r, r.start(), A);
      std::ostringstream os;
      os << r.name() << " from " << r.start() << ": "
         << (v.verdict == wellfounded::Truth::kWellFounded ? "well-founded" : "ill-founded evidence")
         << " longest " << v.longest << " target " << v.target << " truth "
         << (r.ground_truth() == wellfounded::Truth::kWellFounded ? "well-founded" : "ill-founded") << '\n';
      if (!v.path.empty()) {
        os << "path";
        for (auto x : v.path) os << ' ' << x;
        os << '\n';
      }
      emit(common, os.str());
      return 0;
    }
    if (*jump) {
      const auto ms = wellfounded::machine_catalog(common.seed, machines);
      const auto A = fastgrow::make_fastseq_above(RateFunction::affine(2), length, Natural(ms.size()),
                                                  fastgrow::Variant::kPlain, margin);
      const auto direct = oracles::jump_direct(ms, level);
      std::ostringstream os;
      std::size_t agree = 0;
      for (std::size_t n = 0; n < ms.size(); ++n) {
        const bool b = wellfounded::jump_tower_eval(level, ms, n, A);
        agree += b == direct[n];
        os << n << ' ' << b << ' ' << direct[n] << ' ' << wellfounded::render_machine(ms[n]) << '\n';
      }
      os << "agree " << agree << '/' << ms.size() << '\n';
      emit(common, os.str());
      return agree == ms.size() ? 0 : 2;
    }
    if (*game) {
      games::GameSpec g;
      std::optional<games::Player> parity;
      std::mt19937_64 rng(common.seed);
      if (family == "sigma20") {
        g = games::build_sigma20_game(games::phi_catalog(phi),
                                      fastgrow::make_fastseq(RateFunction::affine(1), 4 * horizon + 64,
                                                             fastgrow::Variant::kPlain, margin),
                                      horizon);
      } else if (family == "priority") {
        const auto a = games::random_arena(rng, states, priorities);
        const auto f = RateFunction::affine(1);
        // Margins below |V| can disagree with the parity winner.
        const std::uint64_t m = game->get_option("--margin")->count() > 0 ? margin : states;
        const std::size_t h = 3 * games::timeout_at(f, priorities, 0, m);
        g = games::build_priority_game({a, h, games::make_timeouts(f, priorities, h, m)});
        parity = oracles::parity_winner(a);
      } else if (family == "tree") {
        g = families::random_tree_game(rng);
      } else if (family == "estimator") {
        g = families::random_estimator_game(rng);
      } else {
        throw ValidationError("family: unknown '" + family + "'");
      }
      games::SolveBudget budget;
      if (common.budget) budget.max_nodes = *common.budget;
      const auto s = games::solve(g, budget);
      std::ostringstream os;
      os << g.name << " horizon " << g.horizon << " value " << games::outcome_name(s.value) << " nodes " << s.nodes
         << '\n';
      if (parity) os << "parity " << (*parity == games::Player::kI ? "I" : "II") << '\n';
      emit(common, os.str());
      return 0;
    }
    if (*corpus) {
      emit(common, cli::write_corpus(cli::gen_corpus(common.seed, count)));
      return 0;
    }
    if (*run) {
      auto config = cli::load_config(config_path);
      if (app.get_option("--seed")->count() > 0) config.seed = common.seed;
      if (common.budget) config.budgets.max_nodes = *common.budget;
      if (!common.out.empty()) config.out = common.out;
      if (threads > 0) config.threads = threads;
      const auto report = cli::run(config);
      if (!config.out.empty()) {
        cli::write_report(report, config, config.out);
      } else {
        std::cout << cli::to_csv(report);
      }
      std::cerr << cli::kind_name(config.kind) << ": " << report.agreed() << '/' << report.cases.size()
                << " agree, hash " << report.config_hash << '\n';
      return cli::exit_code(report);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return 3;
  } catch (const NonConvergence& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
