#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "cyclecover/analysis.hpp"
#include "cyclecover/baseline.hpp"
#include "cyclecover/contraction.hpp"
#include "cyclecover/digraph.hpp"
#include "cyclecover/engine.hpp"
#include "cyclecover/report.hpp"
#include "cyclecover/verify.hpp"

using namespace cyclecover;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "text";

  std::uint64_t effective_seed() {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    std::cerr << "seed: " << *seed << '\n';
    return *seed;
  }
};

void emit(const Common& common, const std::string& text) {
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(common.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + common.out);
  file << text;
}

std::string dump(const json& j) { return j.dump(2) + '\n'; }

bool has_chains(const Digraph& g) {
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.label(v).find('-') != std::string::npos) return true;
  }
  return false;
}

struct Prepared {
  Digraph input;
  std::optional<ContractedDigraph> contracted;
  std::optional<ContractionFailure> failure;
  bool already_contracted = false;
};

// Files with hyphenated labels are taken as already contracted.
Prepared prepare(const std::string& path) {
  Prepared p{load_digraph(path), std::nullopt, std::nullopt, false};
  if (has_chains(p.input)) {
    p.contracted = ContractedDigraph::from_labeled(p.input);
    p.already_contracted = true;
    return p;
  }
  auto result = contract(p.input);
  if (auto* c = std::get_if<ContractedDigraph>(&result)) {
    p.contracted = std::move(*c);
  } else {
    p.failure = std::get<ContractionFailure>(std::move(result));
  }
  return p;
}

int report_failure(const Common& common, const Prepared& p) {
  const auto& f = *p.failure;
  if (common.format == "json") {
    emit(common, dump(report::failure_json(f, p.input)));
  } else {
    std::string text = f.kind == ContractionFailureKind::ForcedCycle ? "ForcedCycleFailure" : "Infeasible";
    if (!f.cycle.empty()) {
      text += " (";
      for (std::size_t i = 0; i < f.cycle.size(); ++i) {
        text += (i ? " " : "") + p.input.label(f.cycle[i]);
      }
      text += ")";
    }
    emit(common, text + ": " + f.message + '\n');
  }
  return kRunFailure;
}

// The cover to print: on the input's own labels.
CycleCover to_input_cover(const Prepared& p, const CycleCover& on_contracted) {
  if (p.already_contracted) return on_contracted;
  return expand_cover(*p.contracted, on_contracted);
}

std::string cover_text(const Digraph& g, const CycleCover& cover, const RunStats* stats,
                       std::size_t n_prime) {
  std::ostringstream out;
  out << format_cycles(cover, g) << '\n';
  out << "cycles: " << cover.cycle_count() << '\n';
  out << "n_prime: " << n_prime << '\n';
  if (stats) {
    out << "arcs_consumed: " << stats->arcs_consumed << '\n';
    out << "budget: " << stats->budget << '\n';
    out << "steps: " << stats->steps << '\n';
  }
  return out.str();
}

json cover_json(const Digraph& g, const CycleCover& cover) {
  json cycles = json::array();
  for (const auto& cycle : cover.cycles) {
    json labels = json::array();
    for (VertexId v : cycle) labels.push_back(g.label(v));
    cycles.push_back(std::move(labels));
  }
  return cycles;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle covers of sparse random digraphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "RNG seed (random when omitted; always echoed to stderr)");
  app.add_option("--out", common.out, "Write output to this file instead of stdout");
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a random digraph from the uniform arc stream");
  std::size_t gen_n = 0;
  std::optional<std::size_t> gen_m;
  bool gen_mstar = false;
  gen->add_option("--n", gen_n, "Vertex count")->required()->check(CLI::Range(2, 1 << 30));
  auto* m_opt = gen->add_option("--m", gen_m, "Take exactly this many arcs");
  auto* mstar_opt = gen->add_flag("--mstar", gen_mstar, "Stop once every degree is at least one");
  m_opt->excludes(mstar_opt);

  // contract
  auto* contract_cmd = app.add_subcommand("contract", "Contract forced chains");
  std::string contract_in;
  contract_cmd->add_option("--in", contract_in, "Digraph file")->required()->check(CLI::ExistingFile);

  // cover
  auto* cover = app.add_subcommand("cover", "Build a cycle cover");
  std::string cover_in;
  std::string cover_script;
  EngineConfig config;
  std::optional<std::uint64_t> budget;
  bool checked = false;
  cover->add_option("--in", cover_in, "Digraph file")->required()->check(CLI::ExistingFile);
  cover->add_option("--alpha", config.alpha, "Budget slack")->check(CLI::PositiveNumber);
  cover->add_option("--c", config.c_param, "Budget constant")->check(CLI::PositiveNumber);
  cover->add_option("--budget", budget, "Override the arc budget");
  cover->add_option("--script", cover_script, "Take arc choices from a script")->check(CLI::ExistingFile);
  cover->add_flag("--check", checked, "Check state invariants after every step");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Replay a script of arc choices");
  std::string replay_in;
  std::string replay_script;
  bool with_snapshots = false;
  replay_cmd->add_option("--in", replay_in, "Digraph file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--script", replay_script, "Script file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--snapshots", with_snapshots, "Emit the state after every step");

  // bench
  auto* bench = app.add_subcommand("bench", "Compare the engine with the matching baseline");
  SweepConfig sweep;
  bench->add_option("--n-min", sweep.n_min, "Smallest size")->check(CLI::Range(2, 1 << 30));
  bench->add_option("--n-max", sweep.n_max, "Largest size")->check(CLI::Range(2, 1 << 30));
  bench->add_option("--steps", sweep.steps, "Number of sizes, spaced geometrically")->check(CLI::PositiveNumber);
  bench->add_option("--trials", sweep.trials, "Instances per size")->check(CLI::PositiveNumber);
  bench->add_option("--workers", sweep.workers, "Worker threads");

  // stats
  auto* stats = app.add_subcommand("stats", "Statistics harness");
  stats->require_subcommand(1);
  auto* perm = stats->add_subcommand("perm-cycles", "Cycle counts of random permutations");
  std::size_t perm_n = 0;
  std::uint64_t perm_trials = 0;
  std::optional<double> perm_beta;
  perm->add_option("--n", perm_n, "Permutation size")->required()->check(CLI::PositiveNumber);
  perm->add_option("--trials", perm_trials, "Permutations to sample")
      ->required()
      ->check(CLI::PositiveNumber);
  perm->add_option("--beta", perm_beta, "Window half-width in units of sqrt(ln n) (default ln ln n)");
  auto* harm = stats->add_subcommand("harmonic", "Harmonic number H_n");
  std::uint64_t harm_n = 0;
  harm->add_option("--n", harm_n, "Index n")->required()->check(CLI::PositiveNumber);
  auto* occ = stats->add_subcommand("occupancy", "All-cells-hit probability");
  std::size_t occ_n = 0;
  double occ_t = 0;
  std::uint64_t occ_trials = 0;
  occ->add_option("--n", occ_n, "Cells")->required()->check(CLI::PositiveNumber);
  occ->add_option("--t", occ_t, "Draws")->required()->check(CLI::NonNegativeNumber);
  occ->add_option("--trials", occ_trials, "Trials")->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) {
      auto stream = gen_arc_stream(gen_n, common.effective_seed());
      Digraph g = gen_m ? take_prefix(stream, *gen_m) : compute_m_star(stream);
      if (common.format == "json") {
        json arcs = json::array();
        for (const Arc& a : g.arcs()) arcs.push_back(report::arc_json(g, a));
        emit(common, dump({{"n", g.vertex_count()}, {"m", g.arc_count()}, {"seed", *common.seed}, {"arcs", arcs}}));
      } else {
        emit(common, serialize_digraph(g));
      }
      return kOk;
    }

    if (*contract_cmd) {
      Prepared p{load_digraph(contract_in), std::nullopt, std::nullopt, false};
      auto result = contract(p.input);
      if (auto* f = std::get_if<ContractionFailure>(&result)) {
        p.failure = *f;
        return report_failure(common, p);
      }
      const auto& c = std::get<ContractedDigraph>(result);
      if (common.format == "json") {
        json j = report::contraction_json(c);
        j["graph"] = serialize_digraph(c.graph());
        emit(common, dump(j));
      } else {
        emit(common, serialize_digraph(c.graph()));
      }
      return kOk;
    }

    if (*cover) {
      if (budget) config.budget = budget;
      config.check_invariants = checked;
      const Prepared p = prepare(cover_in);
      if (p.failure) return report_failure(common, p);
      const auto& c = *p.contracted;
      std::optional<CycleCover> found;
      std::optional<RunResult> result;
      if (c.trivially_covered()) {
        found = trivial_cover(c);
      } else if (!cover_script.empty()) {
        const auto script = parse_script(read_text_file(cover_script), c.graph());
        found = replay(c, script).cover;
      } else {
        result = run(c, common.effective_seed(), config);
        found = result->cover;
      }

      if (!found) {
        const std::string why = result ? std::string(to_string(result->failure)) : "script ended early";
        if (common.format == "json") {
          json j = result ? report::run_json(*result, c.graph(), *common.seed) : json{{"success", false}};
          j["failure"] = why;
          emit(common, dump(j));
        } else {
          emit(common, "no cover: " + why + '\n');
        }
        return kRunFailure;
      }
      const CycleCover shown = c.trivially_covered() ? *found : to_input_cover(p, *found);
      const Digraph& shown_graph = p.input;
      if (common.format == "json") {
        json j = result ? report::run_json(*result, c.graph(), *common.seed) : json{{"success", true}};
        j["cycles"] = cover_json(shown_graph, shown);
        j["cycle_count"] = shown.cycle_count();
        j["n_prime"] = c.n_prime();
        emit(common, dump(j));
      } else if (common.format == "csv") {
        std::ostringstream out;
        out << "n,n_prime,success,cycles,arcs_consumed,budget\n"
            << shown.size() << ',' << c.n_prime() << ",1," << shown.cycle_count() << ','
            << (result ? result->stats.arcs_consumed : 0) << ',' << (result ? result->stats.budget : 0)
            << '\n';
        emit(common, out.str());
      } else {
        emit(common, cover_text(shown_graph, shown, result ? &result->stats : nullptr, c.n_prime()));
      }
      return kOk;
    }

    if (*replay_cmd) {
      const Prepared p = prepare(replay_in);
      if (p.failure) return report_failure(common, p);
      const auto& c = *p.contracted;
      const auto script = parse_script(read_text_file(replay_script), c.graph());
      const auto trace = replay(c, script);
      if (common.format == "json") {
        json j;
        if (with_snapshots) {
          j["snapshots"] = json::array();
          for (const auto& s : trace.snapshots) j["snapshots"].push_back(report::snapshot_json(s, c.graph()));
        }
        j["cover"] = trace.cover ? cover_json(c.graph(), *trace.cover) : json(nullptr);
        j["steps"] = trace.snapshots.size();
        emit(common, dump(j));
      } else {
        std::ostringstream out;
        if (with_snapshots) {
          for (const auto& s : trace.snapshots) {
            out << "step " << s.step << ": (" << c.graph().label(s.chosen.tail) << ", "
                << c.graph().label(s.chosen.head) << ") pseudo {";
            for (std::size_t i = 0; i < s.pseudo.size(); ++i) {
              out << (i ? ", " : "") << c.graph().label(s.pseudo[i]);
            }
            out << "}\n";
          }
        }
        if (trace.cover) {
          out << format_cycles(*trace.cover, c.graph()) << '\n';
        } else {
          out << "no cover after " << trace.snapshots.size() << " steps\n";
        }
        emit(common, out.str());
      }
      return trace.cover ? kOk : kRunFailure;
    }

    if (*bench) {
      sweep.seed = common.effective_seed();
      const auto report = bench_sweep(sweep);
      const auto medians = median_times(report);
      if (common.format == "json") {
        emit(common, dump({{"seed", sweep.seed}, {"skipped", report.skipped}, {"medians", report::medians_json(medians)}}));
      } else if (common.format == "csv") {
        emit(common, report.to_csv());
      } else {
        std::ostringstream out;
        out << "n,method,median_micros,successes,runs\n";
        for (const auto& m : medians) {
          out << m.n << ',' << m.method << ',' << m.median_micros << ',' << m.successes << ','
              << m.runs << '\n';
        }
        emit(common, out.str());
      }
      return kOk;
    }

    if (*perm) {
      const double beta = perm_beta.value_or(perm_n >= 3 ? std::log(std::log(static_cast<double>(perm_n))) : 1.0);
      const auto s = perm_cycle_stats(perm_n, perm_trials, beta, common.effective_seed(), 1);
      if (common.format == "json") {
        emit(common, dump(report::perm_stats_json(s)));
      } else if (common.format == "csv") {
        emit(common, report::perm_stats_csv(s));
      } else {
        std::ostringstream out;
        out.precision(6);
        out << std::fixed << "mean: " << s.mean << "\nvar: " << s.variance << "\nH_n: " << harmonic(perm_n)
            << "\nwindow_fraction: " << s.window_fraction << '\n';
        emit(common, out.str());
      }
      return kOk;
    }

    if (*harm) {
      const double h = harmonic(harm_n);
      std::ostringstream out;
      if (common.format == "json") {
        emit(common, dump({{"n", harm_n}, {"H_n", h}, {"H_n_minus_ln_n", h - std::log(static_cast<double>(harm_n))}}));
      } else if (common.format == "csv") {
        out.precision(17);
        out << "n,H_n\n" << harm_n << ',' << h << '\n';
        emit(common, out.str());
      } else {
        out.precision(6);
        out << std::fixed << h << '\n';
        emit(common, out.str());
      }
      return kOk;
    }

    if (*occ) {
      const auto t = static_cast<std::uint64_t>(std::llround(occ_t));
      const double estimate = occupancy_success_estimate(occ_n, t, occ_trials, common.effective_seed(), 1);
      const double poisson = occupancy_poisson(occ_n, static_cast<double>(t));
      std::ostringstream out;
      if (common.format == "json") {
        emit(common, dump({{"n", occ_n}, {"t", t}, {"trials", occ_trials}, {"estimate", estimate}, {"poisson", poisson}}));
      } else {
        out.precision(6);
        out << std::fixed;
        if (common.format == "csv") {
          out << "n,t,trials,estimate,poisson\n" << occ_n << ',' << t << ',' << occ_trials << ',' << estimate
              << ',' << poisson << '\n';
        } else {
          out << "estimate: " << estimate << "\npoisson: " << poisson << '\n';
        }
        emit(common, out.str());
      }
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ReplayDivergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
  return kUsage;
}
