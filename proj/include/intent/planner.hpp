// Demonstration synthesis by breadth-first search over the product of the
// grid (deterministic kernel) and a formula monitor.

#pragma once

#include "intent/gridworld.hpp"
#include "intent/pltl.hpp"
#include "intent/random.hpp"

#include <optional>

namespace intent {

struct ProductNode {
  Cell pos;
  MonitorState monitor;
  std::size_t steps = 0;
};

/// A minimum-length trace (counted in steps, at most `max_len`) from the start
/// whose last position satisfies `phi`, or nullopt. Equal-length candidates
/// are explored in N,S,E,W order unless `tie_break` is given, in which case
/// the action order is shuffled at every expansion.
std::optional<Trace> plan_satisfying_trace(const GridWorld &world, const Formula &phi,
                                           std::size_t max_len,
                                           Rng *tie_break = nullptr);

/// A minimum-length trace satisfying exactly one of `a` and `b`.
std::optional<Trace> plan_distinguishing_trace(const GridWorld &world,
                                               const Formula &a, const Formula &b,
                                               std::size_t max_len,
                                               Rng *tie_break = nullptr);

/// Up to `k` distinct minimum-length traces for `phi`; the first uses the
/// canonical action order, later ones randomized tie-breaking.
std::vector<Trace> plan_many(const GridWorld &world, const Formula &phi,
                             std::size_t max_len, std::size_t k, Rng &rng,
                             std::size_t attempts_per_trace = 8);

/// A trace of exactly `length` steps whose last position satisfies `phi`,
/// drawn uniformly from all such action sequences on the deterministic
/// kernel, or nullopt when there is none.
std::optional<Trace> sample_satisfying_trace(const GridWorld &world, const Formula &phi,
                                             std::size_t length, Rng &rng);

} // namespace intent
