// Independent reference semantics and generators shared by the tests.
#pragma once

#include "intent/gridworld.hpp"
#include "intent/pltl.hpp"
#include "intent/random.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Labels = std::vector<std::set<std::string>>;

// Tile colors visited by a trace, read from the world rather than the trace
// labels.
inline Labels labels_of(const intent::GridWorld &w, const intent::Trace &t) {
  Labels out;
  for (const auto &s : t.steps)
    out.push_back({std::string(intent::color_name(w.color(s.pos)))});
  return out;
}

// Truth of f at position i, recomputed from the definitions.
inline bool holds(const intent::Formula &f, const Labels &t, std::size_t i) {
  using intent::Op;
  switch (f.op()) {
  case Op::Atom: return t[i].count(f.name()) > 0;
  case Op::True: return true;
  case Op::False: return false;
  case Op::Not: return !holds(f.child(), t, i);
  case Op::And: return holds(f.lhs(), t, i) && holds(f.rhs(), t, i);
  case Op::Or: return holds(f.lhs(), t, i) || holds(f.rhs(), t, i);
  case Op::Implies: return !holds(f.lhs(), t, i) || holds(f.rhs(), t, i);
  case Op::Historically:
    for (std::size_t j = 0; j <= i; ++j)
      if (!holds(f.child(), t, j))
        return false;
    return true;
  case Op::Once:
    for (std::size_t j = 0; j <= i; ++j)
      if (holds(f.child(), t, j))
        return true;
    return false;
  case Op::Since:
    for (std::size_t j = 0; j <= i; ++j) {
      if (!holds(f.rhs(), t, j))
        continue;
      bool ok = true;
      for (std::size_t k = j + 1; k <= i; ++k)
        ok = ok && holds(f.lhs(), t, k);
      if (ok)
        return true;
    }
    return false;
  case Op::Yesterday: return i > 0 && holds(f.child(), t, i - 1);
  }
  return false;
}

inline const std::vector<std::string> &atoms() {
  static const std::vector<std::string> a = {"red", "yellow", "blue", "brown", "white"};
  return a;
}

// Random formula with exactly `n` nodes over the five colors.
inline intent::Formula random_formula(intent::Rng &rng, std::size_t n) {
  using namespace intent;
  if (n == 1) {
    auto k = uniform_index(rng, 7);
    if (k == 5)
      return Formula::truth();
    if (k == 6)
      return Formula::falsity();
    return f_atom(atoms()[k]);
  }
  if (n == 2 || uniform_index(rng, 2) == 0) {
    static const Op un[] = {Op::Not, Op::Historically, Op::Once, Op::Yesterday};
    return Formula::unary(un[uniform_index(rng, 4)], random_formula(rng, n - 1));
  }
  static const Op bin[] = {Op::And, Op::Or, Op::Implies, Op::Since};
  std::size_t left = 1 + uniform_index(rng, n - 2);
  return Formula::binary(bin[uniform_index(rng, 4)], random_formula(rng, left),
                         random_formula(rng, n - 1 - left));
}

// Random singleton-label trace, as a grid would produce.
inline Labels random_labels(intent::Rng &rng, std::size_t len) {
  Labels t(len);
  for (auto &s : t)
    s.insert(atoms()[intent::uniform_index(rng, atoms().size())]);
  return t;
}

inline std::vector<intent::Observation> to_observations(const Labels &t) {
  std::vector<intent::Observation> out;
  for (const auto &s : t)
    out.push_back(intent::make_observation(intent::grid_alphabet(),
                                           std::vector<std::string>(s.begin(), s.end())));
  return out;
}

inline Labels colors(std::initializer_list<const char *> names) {
  Labels t;
  for (const char *n : names)
    t.push_back({n});
  return t;
}

// Exact probability that `f` holds at the end of a `len`-entry uniform random
// walk, summing over every action sequence and slip outcome.
inline double exact_random_satisfaction(const intent::GridWorld &w, const intent::Formula &f,
                                        std::size_t len) {
  const int dx[] = {0, 0, 1, -1}, dy[] = {-1, 1, 0, 0};
  const int perp[4][2] = {{2, 3}, {2, 3}, {0, 1}, {0, 1}};
  auto go = [&](int x, int y, int a) {
    int nx = x + dx[a], ny = y + dy[a];
    if (nx < 0 || ny < 0 || nx >= w.width() || ny >= w.height())
      return std::pair{x, y};
    return std::pair{nx, ny};
  };
  Labels t;
  double total = 0.0;
  auto rec = [&](auto &self, int x, int y, double p) -> void {
    t.push_back({std::string(intent::color_name(w.color({x, y})))});
    if (t.size() == len) {
      if (holds(f, t, len - 1))
        total += p;
    } else {
      for (int a = 0; a < 4; ++a) {
        double q = p / 4;
        auto [ix, iy] = go(x, y, a);
        self(self, ix, iy, q * (1 - w.p_slip()));
        if (w.p_slip() > 0)
          for (int s : perp[a]) {
            auto [sx, sy] = go(x, y, s);
            self(self, sx, sy, q * w.p_slip() / 2);
          }
      }
    }
    t.pop_back();
  };
  rec(rec, w.start().x, w.start().y, 1.0);
  return total;
}

// Fewest entries (at most `max_len`) of a deterministic walk from the start
// whose final position satisfies `f`, found by trying every action sequence.
inline std::optional<std::size_t> exhaustive_min_length(const intent::GridWorld &w,
                                                        const intent::Formula &f,
                                                        std::size_t max_len) {
  const int dx[] = {0, 0, 1, -1}, dy[] = {-1, 1, 0, 0};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::size_t combos = std::size_t{1} << (2 * (len - 1));
    for (std::size_t code = 0; code < combos; ++code) {
      int x = w.start().x, y = w.start().y;
      Labels t{{std::string(intent::color_name(w.color({x, y})))}};
      for (std::size_t k = 0; k + 1 < len; ++k) {
        int a = static_cast<int>((code >> (2 * k)) & 3);
        int nx = x + dx[a], ny = y + dy[a];
        if (nx >= 0 && ny >= 0 && nx < w.width() && ny < w.height())
          x = nx, y = ny;
        t.push_back({std::string(intent::color_name(w.color({x, y})))});
      }
      if (holds(f, t, len - 1))
        return len;
    }
  }
  return std::nullopt;
}

/// Action codes (two bits per step, N,S,E,W) of every deterministic sequence
/// whose trace of exactly `len` entries satisfies `f`.
inline std::vector<std::size_t> satisfying_sequences(const intent::GridWorld &w,
                                                     const intent::Formula &f,
                                                     std::size_t len) {
  const int dx[] = {0, 0, 1, -1}, dy[] = {-1, 1, 0, 0};
  std::vector<std::size_t> out;
  std::size_t combos = std::size_t{1} << (2 * (len - 1));
  for (std::size_t code = 0; code < combos; ++code) {
    int x = w.start().x, y = w.start().y;
    Labels t{{std::string(intent::color_name(w.color({x, y})))}};
    for (std::size_t k = 0; k + 1 < len; ++k) {
      int a = static_cast<int>((code >> (2 * k)) & 3);
      int nx = x + dx[a], ny = y + dy[a];
      if (nx >= 0 && ny >= 0 && nx < w.width() && ny < w.height())
        x = nx, y = ny;
      t.push_back({std::string(intent::color_name(w.color({x, y})))});
    }
    if (holds(f, t, len - 1))
      out.push_back(code);
  }
  return out;
}

} // namespace oracle
