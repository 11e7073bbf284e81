// Two-agent intent transfer. Alice infers a specification from the
// demonstrations she has seen; when rivals sit within the divergence
// threshold of her top hypothesis she demonstrates the strongest rival. Bob,
// who holds the true specification and the same inference machinery, reads
// her hypothesis off those probes and answers with traces that satisfy the
// truth but not her hypothesis.

#pragma once

#include "intent/concepts.hpp"
#include "intent/gridworld.hpp"
#include "intent/inference.hpp"
#include "intent/pltl.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace intent {

enum class BobMode {
  Plan,   // plan traces satisfying the truth and violating Alice's hypothesis
  Corpus, // replay unseen demonstrations from a corpus
};

struct TransferConfig {
  double tau = 0.5;
  std::size_t max_rounds = 5;
  std::size_t probes_per_round = 1;
  std::size_t clarify_per_round = 4;
  std::size_t n_rollouts = 10000;
  std::size_t signature_probes = 10000;
  std::uint64_t seed = 0;
  BobMode bob_mode = BobMode::Plan;

  void validate() const;
};

enum class Role { Alice, Bob };

struct AgentState {
  Role role = Role::Alice;
  const GridWorld *world = nullptr;
  const ConceptClass *concepts = nullptr;
  std::vector<Trace> demos;
  std::optional<Formula> true_spec; // Bob only
  std::optional<Ranking> ranking;
};

struct Rival {
  Formula formula;
  double divergence = 0.0;
};

struct TransferRound {
  std::size_t index = 0;
  Formula alice_top;
  double alice_top_log_posterior = 0.0;
  std::vector<Rival> rivals;
  std::optional<Formula> probe_target;
  std::vector<Trace> probes;
  std::optional<Formula> bob_hypothesis;
  std::vector<Trace> clarifications;
  std::string note;
};

enum class TransferStatus { Converged, Exhausted };

struct TransferTranscript {
  std::vector<TransferRound> rounds;
  TransferStatus status = TransferStatus::Exhausted;
  Formula true_spec;
  Formula final_top;
  std::vector<Rival> final_rivals;
  std::size_t final_demo_count = 0;
  std::size_t class_size = 0;
};

/// Scores in rank order after the top, excluding the top itself, with finite
/// posterior and divergence from the top below `tau`.
std::vector<SpecScore> find_ambiguous_rivals(const Ranking &ranking, double tau);

/// Ranking of `demos` under the shared inference settings. Every agent uses
/// the same rollout stream, so equal inputs give equal rankings.
Ranking shared_ranking(const AgentState &agent, const std::vector<Trace> &demos,
                       const TransferConfig &cfg);

/// Up to `probes_per_round` planned traces for the highest-ranked realizable
/// rival. Throws std::runtime_error("rivals unrealizable") if none plans.
std::vector<Trace> probe_round(const AgentState &alice,
                               const std::vector<SpecScore> &rivals,
                               const TransferConfig &cfg,
                               Formula *target = nullptr);

/// Bob's reply to Alice's probes. `corpus` is consulted in corpus mode;
/// traces already in Bob's demo set are skipped.
std::vector<Trace> bob_respond(const AgentState &bob, const std::vector<Trace> &probes,
                               const TransferConfig &cfg,
                               const std::vector<Trace> &corpus = {},
                               Formula *hypothesis = nullptr);

TransferTranscript run_transfer_protocol(const GridWorld &world, const Formula &true_spec,
                                         const std::vector<Trace> &initial_demos,
                                         const ConceptClass &concepts,
                                         const TransferConfig &cfg,
                                         const std::vector<Trace> &corpus = {});

/// JSON document with per-round formulas, divergences and embedded traces.
std::string transcript_to_json(const TransferTranscript &t);
/// Plain-text round table.
std::string transcript_summary(const TransferTranscript &t);

} // namespace intent
