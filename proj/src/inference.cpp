#include "intent/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace intent {

double empirical_satisfaction(const Formula &phi, const std::vector<Trace> &demos) {
  if (demos.empty())
    throw std::invalid_argument("no demonstrations");
  Monitor m(phi, grid_alphabet());
  std::size_t hits = 0;
  for (const auto &d : demos)
    hits += m.run(d.observations());
  return static_cast<double>(hits) / static_cast<double>(demos.size());
}

double random_satisfaction(const Formula &phi, const GridWorld &world,
                           const std::vector<std::size_t> &demo_lengths,
                           std::size_t n_rollouts, Rng &rng) {
  return RolloutPool(world, demo_lengths, n_rollouts, rng).satisfaction(phi);
}

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("kl_bernoulli: p outside [0,1]");
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error("kl_bernoulli: q outside (0,1)");
  double kl = 0.0;
  if (p > 0.0)
    kl += p * std::log(p / q);
  if (p < 1.0)
    kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  // Rounding can leave a tiny negative residue when p == q.
  return std::max(kl, 0.0);
}

double clamp_rate(double q, std::size_t n_rollouts) {
  if (n_rollouts == 0)
    throw std::invalid_argument("clamp_rate needs at least one rollout");
  const double eps = 1.0 / (2.0 * static_cast<double>(n_rollouts));
  return std::clamp(q, eps, 1.0 - eps);
}

PosteriorTerms posterior_score(const SatStats &s) {
  if (s.n_demos == 0 || s.n_rollouts == 0)
    throw std::invalid_argument("posterior_score: empty demo or rollout set");
  double kl = kl_bernoulli(s.phi_bar, clamp_rate(s.phi_hat, s.n_rollouts));
  double lp = s.phi_bar >= s.phi_hat ? static_cast<double>(s.n_demos) * kl
                                     : -std::numeric_limits<double>::infinity();
  return {kl, lp};
}

RolloutPool::RolloutPool(const GridWorld &world,
                         const std::vector<std::size_t> &demo_lengths,
                         std::size_t n_rollouts, Rng &rng)
    : n_(n_rollouts) {
  if (demo_lengths.empty())
    throw std::invalid_argument("no demonstration lengths to match");
  if (n_rollouts == 0)
    throw std::invalid_argument("at least one rollout is required");
  std::map<std::vector<std::uint64_t>, std::size_t> seen;
  for (std::size_t i = 0; i < n_rollouts; ++i) {
    std::size_t len = demo_lengths[uniform_index(rng, demo_lengths.size())];
    auto obs = rollout_random(world, len, rng).observations();
    std::vector<std::uint64_t> key;
    key.reserve(obs.size());
    for (auto o : obs)
      key.push_back(o.bits);
    auto [it, inserted] = seen.emplace(std::move(key), traces_.size());
    if (inserted) {
      traces_.push_back(std::move(obs));
      counts_.push_back(1);
    } else {
      ++counts_[it->second];
    }
  }
}

double RolloutPool::satisfaction(const Formula &phi) const {
  Monitor m(phi, grid_alphabet());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < traces_.size(); ++i)
    if (m.run(traces_[i]))
      hits += counts_[i];
  return static_cast<double>(hits) / static_cast<double>(n_);
}

std::string demo_fingerprint(const std::vector<Trace> &demos) {
  std::uint64_t h = fnv1a("demos");
  for (const auto &d : demos) {
    std::string buf;
    for (const auto &s : d.steps) {
      buf += std::to_string(s.pos.x) + ',' + std::to_string(s.pos.y) + ':' +
             std::to_string(s.obs.bits) + ';';
    }
    buf += '|';
    h = fnv1a(buf, h);
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::vector<std::size_t> demo_lengths(const std::vector<Trace> &demos) {
  std::vector<std::size_t> out;
  out.reserve(demos.size());
  for (const auto &d : demos)
    out.push_back(d.size());
  return out;
}

Ranking rank_specs(std::span<const Formula> candidates,
                   const std::vector<Trace> &demos, const RolloutPool &pool) {
  if (candidates.empty())
    throw std::invalid_argument("empty concept class");
  if (demos.empty())
    throw std::invalid_argument("no demonstrations");
  Ranking r;
  r.demo_fingerprint = demo_fingerprint(demos);
  r.n_rollouts = pool.size();
  r.scores.reserve(candidates.size());

  std::vector<std::vector<Observation>> demo_obs;
  demo_obs.reserve(demos.size());
  for (const auto &d : demos)
    demo_obs.push_back(d.observations());

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Formula &phi = candidates[i];
    Monitor m(phi, grid_alphabet());
    std::size_t hits = 0;
    for (const auto &d : demo_obs)
      hits += m.run(d);
    SatStats st;
    st.phi_bar = static_cast<double>(hits) / static_cast<double>(demos.size());
    st.phi_hat = pool.satisfaction(phi);
    st.n_demos = demos.size();
    st.n_rollouts = pool.size();
    auto terms = posterior_score(st);
    r.scores.push_back(SpecScore{phi, st, terms.kl_term, terms.log_posterior, i,
                                 r.demo_fingerprint});
  }
  std::sort(r.scores.begin(), r.scores.end(),
            [](const SpecScore &a, const SpecScore &b) {
              if (a.log_posterior != b.log_posterior)
                return a.log_posterior > b.log_posterior;
              if (a.formula.size() != b.formula.size())
                return a.formula.size() < b.formula.size();
              return a.class_index < b.class_index;
            });
  return r;
}

Ranking rank_specs(const ConceptClass &cls, const std::vector<Trace> &demos,
                   const GridWorld &world, std::size_t n_rollouts, Rng &rng) {
  if (cls.members.empty())
    throw std::invalid_argument("empty concept class");
  if (demos.empty())
    throw std::invalid_argument("no demonstrations");
  RolloutPool pool(world, demo_lengths(demos), n_rollouts, rng);
  return rank_specs(cls.members, demos, pool);
}

double divergence(const SpecScore &a, const SpecScore &b) {
  if (a.demo_fingerprint != b.demo_fingerprint)
    throw std::invalid_argument(
        "divergence between scores from different demonstration sets");
  return a.kl_term - b.kl_term;
}

std::string ranking_to_tsv(const Ranking &ranking) {
  std::string out = "formula\tphi_bar\tphi_hat\tkl_term\tlog_posterior\n";
  char buf[160];
  for (const auto &s : ranking.scores) {
    out += to_string(s.formula);
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.9f\t", s.stats.phi_bar,
                  s.stats.phi_hat, s.kl_term);
    out += buf;
    if (s.finite()) {
      std::snprintf(buf, sizeof buf, "%.9f", s.log_posterior);
      out += buf;
    } else {
      out += "-inf";
    }
    out += '\n';
  }
  return out;
}

} // namespace intent
