// Maximum-entropy posterior over candidate specifications.
//
// A specification phi earns reward 1 on a trace that satisfies it. Given the
// demonstrations' satisfaction rate phi_bar and the rate phi_hat under random
// action sequences of matched length, the unnormalized posterior is
//
//   Pr(phi | X) ~ 1[phi_bar >= phi_hat] * exp(|X| * KL(B(phi_bar) || B(phi_hat)))
//
// Scores are kept in the log domain.

#pragma once

#include "intent/concepts.hpp"
#include "intent/gridworld.hpp"
#include "intent/pltl.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace intent {

struct SatStats {
  double phi_bar = 0.0;
  double phi_hat = 0.0;
  std::size_t n_demos = 1;
  std::size_t n_rollouts = 1;
};

struct SpecScore {
  Formula formula;
  SatStats stats;
  double kl_term = 0.0;
  double log_posterior = 0.0;
  std::size_t class_index = 0;
  std::string demo_fingerprint;

  bool finite() const { return log_posterior > -std::numeric_limits<double>::infinity(); }
};

struct Ranking {
  std::vector<SpecScore> scores;
  std::string demo_fingerprint;
  std::size_t n_rollouts = 0;

  const SpecScore &top() const { return scores.front(); }
};

double empirical_satisfaction(const Formula &phi, const std::vector<Trace> &demos);

/// Monte Carlo estimate over `n_rollouts` random walks whose lengths are drawn
/// uniformly from `demo_lengths`.
double random_satisfaction(const Formula &phi, const GridWorld &world,
                           const std::vector<std::size_t> &demo_lengths,
                           std::size_t n_rollouts, Rng &rng);

/// KL(B(p) || B(q)) in nats with 0 ln 0 = 0. Requires p in [0,1], q in (0,1).
double kl_bernoulli(double p, double q);

/// phi_hat clamped to [1/(2n), 1 - 1/(2n)].
double clamp_rate(double q, std::size_t n_rollouts);

struct PosteriorTerms {
  double kl_term;
  double log_posterior;
};

PosteriorTerms posterior_score(const SatStats &stats);

/// Random walks shared by every candidate, stored as distinct observation
/// sequences with multiplicities.
class RolloutPool {
public:
  RolloutPool(const GridWorld &world, const std::vector<std::size_t> &demo_lengths,
              std::size_t n_rollouts, Rng &rng);

  std::size_t size() const { return n_; }
  std::size_t distinct() const { return traces_.size(); }
  double satisfaction(const Formula &phi) const;

private:
  std::vector<std::vector<Observation>> traces_;
  std::vector<std::size_t> counts_;
  std::size_t n_ = 0;
};

std::string demo_fingerprint(const std::vector<Trace> &demos);
std::vector<std::size_t> demo_lengths(const std::vector<Trace> &demos);

/// Scores every candidate against one shared rollout pool and sorts by
/// log-posterior (descending), then size, then class order.
Ranking rank_specs(const ConceptClass &cls, const std::vector<Trace> &demos,
                   const GridWorld &world, std::size_t n_rollouts, Rng &rng);
Ranking rank_specs(std::span<const Formula> candidates,
                   const std::vector<Trace> &demos, const RolloutPool &pool);

/// Difference of the two information-gain terms. Throws std::invalid_argument
/// when the scores come from different demonstration sets.
double divergence(const SpecScore &a, const SpecScore &b);

/// Tab-separated: formula, phi_bar, phi_hat, kl_term, log_posterior.
std::string ranking_to_tsv(const Ranking &ranking);

} // namespace intent
