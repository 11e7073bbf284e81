// Candidate concept classes of PLTL formulas.
//
// Two generators are available. Grammar mode enumerates every formula over
// the enabled operators up to a size bound. Template mode instantiates
// formula patterns whose placeholders range over the alphabet:
//
//   @k  an atom                 $k  an atom or its negation
//
// A pattern may end with `where` and comma-separated constraints on its
// placeholders, `@i!=@j` or `@i<@j` (ordering by alphabet position), e.g.
//
//   H !@1 & O @2 & O @3 where @1!=@2, @1!=@3, @2<@3

#pragma once

#include "intent/gridworld.hpp"
#include "intent/pltl.hpp"
#include "intent/random.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace intent {

enum class ConceptMode { Grammar, Templates };

struct ConceptConfig {
  std::vector<std::string> atoms;
  ConceptMode mode = ConceptMode::Templates;
  std::set<Op> operators;             // grammar mode
  std::vector<std::string> templates; // template mode
  std::size_t max_size = 17;
  std::size_t hard_cap = 100000;
  /// Probe traces for semantic deduplication; 0 disables it.
  std::size_t dedup_probes = 0;
};

/// Safety, liveness and guarded-ordering templates over the five tile colors.
/// `guarded` toggles the guarded-response family.
ConceptConfig default_concept_config(bool guarded = true);
std::vector<std::string> default_templates(bool guarded = true);

struct ConceptClass {
  std::vector<Formula> members;
  ConceptConfig config;

  std::size_t size() const { return members.size(); }
  /// Position of a structurally equal member, or -1.
  long find(const Formula &f) const;
};

/// All formulas the config generates, structurally distinct, within the size
/// bound, in size-lexicographic order. Throws std::length_error past the cap.
ConceptClass enumerate_candidates(const ConceptConfig &cfg);

/// Random walks from the start with lengths uniform in [1, max_len].
std::vector<std::vector<Observation>> random_probes(const GridWorld &world,
                                                    std::size_t n, Rng &rng);

/// Packed truth values of `phi` on each probe.
std::vector<std::uint64_t> signature(const Formula &phi,
                                     const std::vector<std::vector<Observation>> &probes);

/// Keeps one member per group of identical probe signatures (the first in
/// canonical order, which is also the smallest).
ConceptClass dedupe_semantic(const ConceptClass &cls, const GridWorld &world,
                             std::size_t n_probe, Rng &rng);
ConceptClass dedupe_semantic(const ConceptClass &cls,
                             const std::vector<std::vector<Observation>> &probes);

/// One formula per line.
std::string class_to_text(const ConceptClass &cls);
std::vector<Formula> read_formulas(std::istream &in);

} // namespace intent
