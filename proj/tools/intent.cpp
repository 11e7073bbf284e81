// intent: command-line front end.
//
//   intent eval FORMULA TRACES
//   intent mine --config FILE [--seed N] [--out DIR]
//   intent plan --world FILE --formula TEXT --max-len N [--out FILE]
//   intent plan --world FILE --formula TEXT --sample K --length N [--seed S] [--out FILE]
//   intent transfer --config FILE [--seed N] [--out DIR]
//
// Exit status: 0 success (UNSAT included), 2 usage or parse error, 3 runtime.

#include "intent/concepts.hpp"
#include "intent/gridworld.hpp"
#include "intent/inference.hpp"
#include "intent/planner.hpp"
#include "intent/pltl.hpp"
#include "intent/scenario.hpp"
#include "intent/transfer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace intent;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_atomic(const fs::path &path, const std::string &content) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush())
      throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

ScenarioConfig load_config(const std::string &path, std::optional<std::uint64_t> seed,
                           const std::string &out) {
  ScenarioConfig cfg = load_scenario(path);
  if (seed) {
    cfg.seed = *seed;
    cfg.transfer.seed = *seed;
  }
  if (!out.empty())
    cfg.out_dir = out;
  return cfg;
}

int cmd_eval(const std::string &formula, const std::string &trace_path) {
  Formula phi = parse_formula(formula);
  auto traces = read_trace_file(trace_path);
  for (const auto &t : traces)
    std::cout << (satisfies(phi, t) ? "true" : "false") << '\n';
  return 0;
}

int cmd_mine(const ScenarioConfig &cfg) {
  auto t0 = std::chrono::steady_clock::now();
  GridWorld world = scenario_world(cfg);
  auto demos = scenario_demos(cfg, world);
  if (demos.empty())
    throw std::runtime_error("no demonstrations");
  ConceptClass cls = scenario_concepts(cfg, world);
  Rng rng = derive_rng(cfg.seed, "rollouts");
  Ranking ranking = rank_specs(cls, demos, world, cfg.n_rollouts, rng);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const SpecScore &top = ranking.top();
  std::ostringstream summary;
  summary << "top: " << to_string(top.formula) << '\n'
          << "log_posterior: " << top.log_posterior << '\n'
          << "phi_bar: " << top.stats.phi_bar << '\n'
          << "phi_hat: " << top.stats.phi_hat << '\n'
          << "candidates explored: " << cls.size() << '\n'
          << "demonstrations: " << demos.size() << '\n'
          << "rollouts: " << cfg.n_rollouts << '\n'
          << "seed: " << cfg.seed << '\n';

  fs::path dir(cfg.out_dir);
  write_atomic(dir / "ranking.tsv", ranking_to_tsv(ranking));
  write_atomic(dir / "summary.txt", summary.str());
  std::cout << summary.str();
  std::printf("wall time: %.2f s\n", secs);
  std::cout << "wrote " << (dir / "ranking.tsv").string() << '\n';
  return 0;
}

int cmd_plan(const std::string &world_path, const std::string &formula, long max_len,
             const std::string &out) {
  if (max_len < 1)
    throw UsageError("--max-len must be at least 1");
  Formula phi = parse_formula(formula);
  GridWorld world = load_world_file(world_path);
  if (static_cast<std::size_t>(max_len) > world.max_len())
    world = world.with_max_len(static_cast<std::size_t>(max_len));
  auto trace = plan_satisfying_trace(world, phi, static_cast<std::size_t>(max_len));
  if (!trace) {
    std::cout << "UNSAT\n";
    return 0;
  }
  std::string text = traces_to_string({*trace});
  if (out.empty()) {
    std::cout << text;
  } else {
    write_atomic(out, text);
    std::cout << "wrote " << out << " (" << trace->size() << " steps)\n";
  }
  return 0;
}

int cmd_sample(const std::string &world_path, const std::string &formula, long count,
               long length, std::uint64_t seed, const std::string &out) {
  if (count < 1)
    throw UsageError("--sample must be at least 1");
  if (length < 1)
    throw UsageError("--length must be at least 1");
  Formula phi = parse_formula(formula);
  GridWorld world = load_world_file(world_path);
  if (static_cast<std::size_t>(length) > world.max_len())
    world = world.with_max_len(static_cast<std::size_t>(length));
  Rng rng = derive_rng(seed, "sample");
  std::vector<Trace> traces;
  for (long attempt = 0; attempt < 200 * count && static_cast<long>(traces.size()) < count;
       ++attempt) {
    auto t = sample_satisfying_trace(world, phi, static_cast<std::size_t>(length), rng);
    if (!t) {
      std::cout << "UNSAT\n";
      return 0;
    }
    if (std::find(traces.begin(), traces.end(), *t) == traces.end())
      traces.push_back(std::move(*t));
  }
  if (static_cast<long>(traces.size()) < count)
    std::cerr << "only " << traces.size() << " distinct traces found\n";
  std::string text = traces_to_string(traces);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_atomic(out, text);
    std::cout << "wrote " << out << " (" << traces.size() << " traces)\n";
  }
  return 0;
}

int cmd_transfer(const ScenarioConfig &cfg) {
  if (!cfg.true_spec)
    throw ConfigError("key 'true_spec' is required for transfer");
  GridWorld world = scenario_world(cfg);
  auto demos = scenario_demos(cfg, world);
  if (demos.empty())
    throw std::runtime_error("no demonstrations");
  std::vector<Trace> corpus;
  if (!cfg.corpus_path.empty())
    corpus = load_checked_traces(cfg.corpus_path, world);
  ConceptClass cls = scenario_concepts(cfg, world);
  auto transcript = run_transfer_protocol(world, parse_formula(*cfg.true_spec), demos, cls,
                                          cfg.transfer, corpus);
  fs::path dir(cfg.out_dir);
  std::string summary = transcript_summary(transcript);
  write_atomic(dir / "transcript.json", transcript_to_json(transcript));
  write_atomic(dir / "transfer_summary.txt", summary);
  std::cout << summary;
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Infer past-time temporal-logic intentions from demonstrations"};
  app.require_subcommand(1);

  std::string formula, trace_path, config, out, world_path;
  std::optional<std::uint64_t> seed;
  long max_len = 0, sample = 0, length = 0;

  auto *eval = app.add_subcommand("eval", "Evaluate a formula on every trace in a file");
  eval->add_option("formula", formula, "PLTL formula")->required();
  eval->add_option("traces", trace_path, "Trace file (JSON lines)")->required();

  auto *mine = app.add_subcommand("mine", "Rank the concept class against demonstrations");
  auto *transfer = app.add_subcommand("transfer", "Run the intent transfer protocol");
  for (auto *sub : {mine, transfer}) {
    sub->add_option("--config", config, "Scenario file")->required();
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--out", out, "Output directory");
  }

  auto *plan = app.add_subcommand("plan", "Plan a shortest trace satisfying a formula");
  plan->add_option("--world", world_path, "World file")->required();
  plan->add_option("--formula", formula, "PLTL formula")->required();
  auto *max_len_opt = plan->add_option("--max-len", max_len, "Maximum trace length");
  auto *sample_opt =
      plan->add_option("--sample", sample, "Draw this many distinct uniform satisfying traces");
  auto *length_opt = plan->add_option("--length", length, "Exact length of sampled traces");
  plan->add_option("--seed", seed, "Sampling seed");
  plan->add_option("--out", out, "Trace file to write (stdout if absent)");
  sample_opt->needs(length_opt)->excludes(max_len_opt);
  length_opt->needs(sample_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_usage;
  }

  try {
    if (*eval)
      return cmd_eval(formula, trace_path);
    if (*plan && *sample_opt)
      return cmd_sample(world_path, formula, sample, length, seed.value_or(0), out);
    if (*plan) {
      if (!*max_len_opt)
        throw UsageError("plan needs --max-len or --sample");
      return cmd_plan(world_path, formula, max_len, out);
    }
    if (*mine)
      return cmd_mine(load_config(config, seed, out));
    if (*transfer)
      return cmd_transfer(load_config(config, seed, out));
  } catch (const ParseError &e) {
    std::cerr << "parse error at " << e.position() << ": " << e.what() << '\n';
    return exit_usage;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_usage;
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}
