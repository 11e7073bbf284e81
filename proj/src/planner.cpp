#include "intent/planner.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace intent {

namespace {

struct SearchNode {
  std::uint32_t cell;
  std::vector<std::uint8_t> values;
  std::size_t parent;
  Action action; // action taken at the parent to get here
  std::size_t steps;
};

std::string key_of(std::uint32_t cell, const std::vector<std::uint8_t> &values) {
  std::string key(reinterpret_cast<const char *>(&cell), sizeof cell);
  key.append(reinterpret_cast<const char *>(values.data()), values.size());
  return key;
}

Trace reconstruct(const GridWorld &world, const std::vector<SearchNode> &nodes,
                  std::size_t goal) {
  std::vector<std::size_t> chain;
  for (std::size_t i = goal;; i = nodes[i].parent) {
    chain.push_back(i);
    if (i == 0)
      break;
  }
  std::reverse(chain.begin(), chain.end());
  Trace t;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    Cell pos = world.cell(nodes[chain[k]].cell);
    std::optional<Action> act;
    if (k + 1 < chain.size())
      act = nodes[chain[k + 1]].action;
    t.steps.push_back({pos, label(world, pos), act});
  }
  return t;
}

} // namespace

std::optional<Trace> plan_satisfying_trace(const GridWorld &world, const Formula &phi,
                                           std::size_t max_len, Rng *tie_break) {
  if (max_len < 1)
    throw std::invalid_argument("max_len must be at least 1");
  if (max_len > world.max_len())
    throw std::invalid_argument("max_len exceeds the episode bound of the world");

  Monitor monitor(phi, grid_alphabet());
  const std::size_t n = monitor.subformula_count();

  std::vector<SearchNode> nodes;
  std::unordered_set<std::string> visited;

  Cell start = world.start();
  std::vector<std::uint8_t> v0(n);
  monitor.advance(nullptr, v0.data(), label(world, start), true);
  auto start_cell = static_cast<std::uint32_t>(world.index(start));
  visited.insert(key_of(start_cell, v0));
  nodes.push_back({start_cell, v0, 0, Action::North, 1});
  if (v0.back())
    return reconstruct(world, nodes, 0);

  std::array<Action, 4> order = all_actions;
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].steps >= max_len)
      continue;
    if (tie_break) {
      for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[uniform_index(*tie_break, i + 1)]);
    }
    for (Action a : order) {
      Cell next = move(world, world.cell(nodes[head].cell), a);
      auto next_cell = static_cast<std::uint32_t>(world.index(next));
      std::vector<std::uint8_t> v(n);
      monitor.advance(nodes[head].values.data(), v.data(), label(world, next), false);
      if (!visited.insert(key_of(next_cell, v)).second)
        continue;
      std::size_t steps = nodes[head].steps + 1;
      bool goal = v.back();
      nodes.push_back({next_cell, std::move(v), head, a, steps});
      if (goal)
        return reconstruct(world, nodes, nodes.size() - 1);
    }
  }
  return std::nullopt;
}

std::optional<Trace> plan_distinguishing_trace(const GridWorld &world,
                                               const Formula &a, const Formula &b,
                                               std::size_t max_len, Rng *tie_break) {
  Formula target = f_or(f_and(a, f_not(b)), f_and(f_not(a), b));
  return plan_satisfying_trace(world, target, max_len, tie_break);
}

std::vector<Trace> plan_many(const GridWorld &world, const Formula &phi,
                             std::size_t max_len, std::size_t k, Rng &rng,
                             std::size_t attempts_per_trace) {
  std::vector<Trace> out;
  auto first = plan_satisfying_trace(world, phi, max_len);
  if (!first)
    return out;
  out.push_back(*first);
  std::size_t attempts = 0;
  while (out.size() < k && attempts < k * attempts_per_trace) {
    ++attempts;
    auto t = plan_satisfying_trace(world, phi, max_len, &rng);
    if (t && std::find(out.begin(), out.end(), *t) == out.end())
      out.push_back(std::move(*t));
  }
  return out;
}

std::optional<Trace> sample_satisfying_trace(const GridWorld &world, const Formula &phi,
                                             std::size_t length, Rng &rng) {
  if (length < 1)
    throw std::invalid_argument("length must be at least 1");
  if (length > world.max_len())
    throw std::invalid_argument("length exceeds the episode bound of the world");

  Monitor monitor(phi, grid_alphabet());
  const std::size_t n = monitor.subformula_count();
  struct Node {
    std::uint32_t cell;
    std::vector<std::uint8_t> values;
    std::array<std::size_t, 4> next{};
  };

  // Unroll the product graph layer by layer.
  std::vector<std::vector<Node>> layers(length);
  Cell start = world.start();
  std::vector<std::uint8_t> v0(n);
  monitor.advance(nullptr, v0.data(), label(world, start), true);
  layers[0].push_back({static_cast<std::uint32_t>(world.index(start)), v0, {}});
  for (std::size_t t = 0; t + 1 < length; ++t) {
    std::unordered_map<std::string, std::size_t> seen;
    for (auto &node : layers[t]) {
      for (std::size_t a = 0; a < all_actions.size(); ++a) {
        Cell next = move(world, world.cell(node.cell), all_actions[a]);
        auto cell = static_cast<std::uint32_t>(world.index(next));
        std::vector<std::uint8_t> v(n);
        monitor.advance(node.values.data(), v.data(), label(world, next), false);
        auto [it, fresh] = seen.emplace(key_of(cell, v), layers[t + 1].size());
        if (fresh)
          layers[t + 1].push_back({cell, std::move(v), {}});
        node.next[a] = it->second;
      }
    }
  }

  // Number of satisfying continuations from every node.
  std::vector<std::vector<double>> count(length);
  count[length - 1].resize(layers[length - 1].size());
  for (std::size_t i = 0; i < layers[length - 1].size(); ++i)
    count[length - 1][i] = layers[length - 1][i].values.back() ? 1.0 : 0.0;
  for (std::size_t t = length - 1; t-- > 0;) {
    count[t].resize(layers[t].size());
    for (std::size_t i = 0; i < layers[t].size(); ++i)
      for (std::size_t j : layers[t][i].next)
        count[t][i] += count[t + 1][j];
  }
  if (count[0][0] == 0.0)
    return std::nullopt;

  Trace trace;
  std::size_t cur = 0;
  for (std::size_t t = 0; t < length; ++t) {
    Cell pos = world.cell(layers[t][cur].cell);
    if (t + 1 == length) {
      trace.steps.push_back({pos, label(world, pos), std::nullopt});
      break;
    }
    double r = uniform_unit(rng) * count[t][cur];
    std::size_t pick = 0;
    for (std::size_t a = 0; a < all_actions.size(); ++a) {
      double c = count[t + 1][layers[t][cur].next[a]];
      if (c == 0.0)
        continue;
      pick = a;
      if (r < c)
        break;
      r -= c;
    }
    trace.steps.push_back({pos, label(world, pos), all_actions[pick]});
    cur = layers[t][cur].next[pick];
  }
  return trace;
}

} // namespace intent
