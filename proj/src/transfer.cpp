#include "intent/transfer.hpp"

#include "intent/planner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace intent {

void TransferConfig::validate() const {
  if (!(tau > 0.0))
    throw std::invalid_argument("tau must be positive");
  if (max_rounds < 1)
    throw std::invalid_argument("max_rounds must be at least 1");
  if (probes_per_round < 1)
    throw std::invalid_argument("probes_per_round must be at least 1");
  if (clarify_per_round < 1)
    throw std::invalid_argument("clarify_per_round must be at least 1");
  if (n_rollouts < 1)
    throw std::invalid_argument("n_rollouts must be at least 1");
  if (signature_probes < 1)
    throw std::invalid_argument("signature_probes must be at least 1");
}

std::vector<SpecScore> find_ambiguous_rivals(const Ranking &ranking, double tau) {
  std::vector<SpecScore> out;
  if (ranking.scores.empty())
    return out;
  const SpecScore &top = ranking.top();
  for (std::size_t i = 1; i < ranking.scores.size(); ++i) {
    const SpecScore &s = ranking.scores[i];
    if (!s.finite() || s.formula == top.formula)
      continue;
    if (divergence(top, s) < tau)
      out.push_back(s);
  }
  return out;
}

Ranking shared_ranking(const AgentState &agent, const std::vector<Trace> &demos,
                       const TransferConfig &cfg) {
  if (!agent.world || !agent.concepts)
    throw std::invalid_argument("agent has no world or concept class");
  Rng rng = derive_rng(cfg.seed, "rollouts");
  return rank_specs(*agent.concepts, demos, *agent.world, cfg.n_rollouts, rng);
}

std::vector<Trace> probe_round(const AgentState &alice,
                               const std::vector<SpecScore> &rivals,
                               const TransferConfig &cfg, Formula *target) {
  const GridWorld &world = *alice.world;
  Rng rng = derive_rng(cfg.seed, "probes/" + std::to_string(alice.demos.size()));
  for (const auto &r : rivals) {
    auto traces = plan_many(world, r.formula, world.max_len(), cfg.probes_per_round, rng);
    if (!traces.empty()) {
      if (target)
        *target = r.formula;
      return traces;
    }
  }
  throw std::runtime_error("rivals unrealizable");
}

namespace {

bool contains_trace(const std::vector<Trace> &set, const Trace &t) {
  return std::find(set.begin(), set.end(), t) != set.end();
}

std::vector<Trace> from_corpus(const AgentState &bob, const Formula &hypothesis,
                               const std::vector<Trace> &corpus, std::size_t k) {
  // Traces that refute the hypothesis first, then the rest, corpus order within.
  std::vector<Trace> out;
  for (int pass = 0; pass < 2 && out.size() < k; ++pass) {
    for (const auto &t : corpus) {
      if (out.size() >= k)
        break;
      if (!satisfies(*bob.true_spec, t) || contains_trace(bob.demos, t) ||
          contains_trace(out, t))
        continue;
      bool refutes = !satisfies(hypothesis, t);
      if ((pass == 0) == refutes)
        out.push_back(t);
    }
  }
  return out;
}

} // namespace

std::vector<Trace> bob_respond(const AgentState &bob, const std::vector<Trace> &probes,
                               const TransferConfig &cfg,
                               const std::vector<Trace> &corpus, Formula *hypothesis) {
  if (probes.empty())
    throw std::invalid_argument("no probes to respond to");
  if (!bob.true_spec)
    throw std::invalid_argument("bob has no true specification");
  const GridWorld &world = *bob.world;
  const Formula &truth = *bob.true_spec;

  Ranking seen = shared_ranking(bob, probes, cfg);
  const Formula &guess = seen.top().formula;
  if (hypothesis)
    *hypothesis = guess;

  std::vector<Trace> out;
  if (cfg.bob_mode == BobMode::Corpus)
    out = from_corpus(bob, guess, corpus, cfg.clarify_per_round);
  if (!out.empty())
    return out;

  Rng rng = derive_rng(cfg.seed, "clarify/" + std::to_string(bob.demos.size()));
  out = plan_many(world, f_and(truth, f_not(guess)), world.max_len(),
                  cfg.clarify_per_round, rng);
  if (out.empty())
    out = plan_many(world, truth, world.max_len(), cfg.clarify_per_round, rng);
  return out;
}

namespace {

std::vector<Rival> to_rivals(const SpecScore &top, const std::vector<SpecScore> &scores) {
  std::vector<Rival> out;
  out.reserve(scores.size());
  for (const auto &s : scores)
    out.push_back({s.formula, divergence(top, s)});
  return out;
}

} // namespace

TransferTranscript run_transfer_protocol(const GridWorld &world, const Formula &true_spec,
                                         const std::vector<Trace> &initial_demos,
                                         const ConceptClass &concepts,
                                         const TransferConfig &cfg,
                                         const std::vector<Trace> &corpus) {
  cfg.validate();
  if (initial_demos.empty())
    throw std::invalid_argument("no demonstrations");
  if (!plan_satisfying_trace(world, true_spec, world.max_len()))
    throw std::invalid_argument("true specification is unrealizable within the episode bound");

  Rng sig_rng = derive_rng(cfg.seed, "signatures");
  auto probes = random_probes(world, cfg.signature_probes, sig_rng);
  ConceptClass shared = dedupe_semantic(concepts, probes);
  const auto truth_sig = signature(true_spec, probes);

  AgentState alice{Role::Alice, &world, &shared, initial_demos, std::nullopt, std::nullopt};
  AgentState bob{Role::Bob, &world, &shared, initial_demos, true_spec, std::nullopt};

  TransferTranscript t;
  t.true_spec = true_spec;
  t.class_size = shared.size();

  for (std::size_t round = 1;; ++round) {
    Ranking ranking = shared_ranking(alice, alice.demos, cfg);
    const SpecScore &top = ranking.top();
    auto rivals = find_ambiguous_rivals(ranking, cfg.tau);
    t.final_top = top.formula;
    t.final_rivals = to_rivals(top, rivals);
    t.final_demo_count = alice.demos.size();
    if (rivals.empty() && signature(top.formula, probes) == truth_sig) {
      t.status = TransferStatus::Converged;
      break;
    }
    if (round > cfg.max_rounds) {
      t.status = TransferStatus::Exhausted;
      break;
    }

    TransferRound rec;
    rec.index = round;
    rec.alice_top = top.formula;
    rec.alice_top_log_posterior = top.log_posterior;
    rec.rivals = t.final_rivals;

    // With no rival left Alice shows what she believes.
    std::vector<SpecScore> targets = rivals;
    if (targets.empty())
      targets.push_back(top);
    Formula target = top.formula;
    try {
      rec.probes = probe_round(alice, targets, cfg, &target);
    } catch (const std::runtime_error &e) {
      rec.note = e.what();
      std::vector<SpecScore> own{top};
      rec.probes = probe_round(alice, own, cfg, &target);
    }
    rec.probe_target = target;

    Formula hypothesis = target;
    rec.clarifications = bob_respond(bob, rec.probes, cfg, corpus, &hypothesis);
    rec.bob_hypothesis = hypothesis;
    for (const auto &c : rec.clarifications) {
      if (!satisfies(true_spec, c))
        throw std::logic_error("clarifying trace violates the true specification");
      alice.demos.push_back(c);
      bob.demos.push_back(c);
    }
    alice.ranking = std::move(ranking);
    t.rounds.push_back(std::move(rec));
  }
  return t;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson trace_json(const Trace &trace) {
  ojson steps = ojson::array();
  for (const auto &s : trace.steps) {
    ojson j;
    j["pos"] = {s.pos.x, s.pos.y};
    j["props"] = observation_names(grid_alphabet(), s.obs);
    if (s.action)
      j["action"] = std::string(1, action_letter(*s.action));
    else
      j["action"] = nullptr;
    steps.push_back(std::move(j));
  }
  return steps;
}

ojson traces_json(const std::vector<Trace> &traces) {
  ojson out = ojson::array();
  for (const auto &t : traces)
    out.push_back(trace_json(t));
  return out;
}

ojson rivals_json(const std::vector<Rival> &rivals) {
  ojson out = ojson::array();
  for (const auto &r : rivals) {
    ojson j;
    j["formula"] = to_string(r.formula);
    j["divergence"] = r.divergence;
    out.push_back(std::move(j));
  }
  return out;
}

const char *status_name(TransferStatus s) {
  return s == TransferStatus::Converged ? "converged" : "exhausted";
}

} // namespace

std::string transcript_to_json(const TransferTranscript &t) {
  ojson doc;
  doc["true_spec"] = to_string(t.true_spec);
  doc["class_size"] = t.class_size;
  doc["status"] = status_name(t.status);
  ojson rounds = ojson::array();
  for (const auto &r : t.rounds) {
    ojson j;
    j["round"] = r.index;
    j["alice_top"] = to_string(r.alice_top);
    if (std::isfinite(r.alice_top_log_posterior))
      j["alice_top_log_posterior"] = r.alice_top_log_posterior;
    else
      j["alice_top_log_posterior"] = nullptr;
    j["rivals"] = rivals_json(r.rivals);
    j["probe_target"] = r.probe_target ? ojson(to_string(*r.probe_target)) : ojson(nullptr);
    j["probes"] = traces_json(r.probes);
    j["bob_hypothesis"] =
        r.bob_hypothesis ? ojson(to_string(*r.bob_hypothesis)) : ojson(nullptr);
    j["clarifications"] = traces_json(r.clarifications);
    if (!r.note.empty())
      j["note"] = r.note;
    rounds.push_back(std::move(j));
  }
  doc["rounds"] = std::move(rounds);
  ojson fin;
  fin["top"] = to_string(t.final_top);
  fin["rivals"] = rivals_json(t.final_rivals);
  fin["demos"] = t.final_demo_count;
  doc["final"] = std::move(fin);
  return doc.dump(2) + "\n";
}

std::string transcript_summary(const TransferTranscript &t) {
  std::string out;
  char buf[256];
  out += "true spec: " + to_string(t.true_spec) + "\n";
  out += "candidates: " + std::to_string(t.class_size) + "\n";
  out += "round  rivals  probes  clarify  alice top / probe target / bob hypothesis\n";
  for (const auto &r : t.rounds) {
    std::snprintf(buf, sizeof buf, "%5zu  %6zu  %6zu  %7zu  ", r.index, r.rivals.size(),
                  r.probes.size(), r.clarifications.size());
    out += buf;
    out += to_string(r.alice_top) + "\n";
    out += std::string(31, ' ') + (r.probe_target ? to_string(*r.probe_target) : "-") + "\n";
    out += std::string(31, ' ') +
           (r.bob_hypothesis ? to_string(*r.bob_hypothesis) : "-") + "\n";
    if (!r.note.empty())
      out += std::string(31, ' ') + "note: " + r.note + "\n";
  }
  out += "final top: " + to_string(t.final_top) + "\n";
  out += "final rivals below tau: " + std::to_string(t.final_rivals.size()) + "\n";
  out += "demos: " + std::to_string(t.final_demo_count) + "\n";
  out += std::string("status: ") + status_name(t.status) + "\n";
  return out;
}

} // namespace intent
