#include "intent/concepts.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace intent {

std::vector<std::string> default_templates(bool guarded) {
  std::vector<std::string> t = {
      "H !@1",
      "O @1",
      "H !@1 & O @2 where @1!=@2",
      "H !@1 & H !@2 where @1<@2",
      "O @1 & O @2 where @1<@2",
      "H !@1 & O @2 & O @3 where @1!=@2, @1!=@3, @2<@3",
      "H !@1 & H !@2 & O @3 where @1<@2, @1!=@3, @2!=@3",
  };
  if (guarded) {
    const char *g = "@2!=@1, @3!=@1, @3!=@2";
    t.push_back(std::string("H ((@1 & O @2) -> (!@2 S @3)) where ") + g);
    t.push_back(std::string("O @1 & H ((@1 & O @2) -> (!@2 S @3)) where ") + g);
    t.push_back("H !@1 & H ((@2 & O @3) -> (!@3 S @4)) "
                "where @3!=@2, @4!=@2, @4!=@3");
    t.push_back("H !@1 & O @2 & H ((@2 & O @3) -> (!@3 S @4)) "
                "where @1!=@2, @3!=@2, @4!=@2, @4!=@3");
  }
  return t;
}

ConceptConfig default_concept_config(bool guarded) {
  ConceptConfig cfg;
  cfg.atoms = grid_alphabet().names();
  cfg.mode = ConceptMode::Templates;
  cfg.operators = {Op::Not, Op::And, Op::Historically, Op::Once, Op::Since,
                   Op::Implies};
  cfg.templates = default_templates(guarded);
  cfg.max_size = 17;
  return cfg;
}

long ConceptClass::find(const Formula &f) const {
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i] == f)
      return static_cast<long>(i);
  return -1;
}

namespace {

void validate(const ConceptConfig &cfg) {
  if (cfg.atoms.empty())
    throw std::invalid_argument("concept alphabet is empty");
  if (cfg.max_size < 1)
    throw std::invalid_argument("maximum formula size must be at least 1");
  for (const auto &a : cfg.atoms)
    f_atom(a);
}

// --- grammar mode ----------------------------------------------------------

std::size_t saturating_add(std::size_t a, std::size_t b, std::size_t cap) {
  return (a > cap || b > cap || a + b > cap) ? cap + 1 : a + b;
}

std::size_t saturating_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (a == 0 || b == 0)
    return 0;
  if (a > cap || b > cap || a > (cap + 1) / b + 1)
    return cap + 1;
  return std::min(a * b, cap + 1);
}

std::vector<Formula> enumerate_grammar(const ConceptConfig &cfg) {
  std::vector<Op> unary, binary;
  for (Op op : cfg.operators) {
    if (is_unary(op))
      unary.push_back(op);
    else if (is_binary(op))
      binary.push_back(op);
  }
  std::size_t leaves = cfg.atoms.size() + cfg.operators.count(Op::True) +
                       cfg.operators.count(Op::False);

  // Count first so an oversized request fails before materializing anything.
  const std::size_t cap = cfg.hard_cap;
  std::vector<std::size_t> count(cfg.max_size + 1, 0);
  std::size_t total = 0;
  for (std::size_t s = 1; s <= cfg.max_size; ++s) {
    std::size_t c = s == 1 ? leaves : 0;
    if (s >= 2)
      c = saturating_add(c, saturating_mul(unary.size(), count[s - 1], cap), cap);
    for (std::size_t l = 1; l + 2 <= s; ++l)
      c = saturating_add(
          c, saturating_mul(binary.size(),
                            saturating_mul(count[l], count[s - 1 - l], cap), cap),
          cap);
    count[s] = c;
    total = saturating_add(total, c, cap);
  }
  if (total > cap)
    throw std::length_error("concept class exceeds the cap of " +
                            std::to_string(cap) +
                            " formulas; lower the size bound or disable operators");

  std::vector<std::vector<Formula>> by_size(cfg.max_size + 1);
  for (const auto &a : cfg.atoms)
    by_size[1].push_back(f_atom(a));
  if (cfg.operators.count(Op::True))
    by_size[1].push_back(Formula::truth());
  if (cfg.operators.count(Op::False))
    by_size[1].push_back(Formula::falsity());
  for (std::size_t s = 2; s <= cfg.max_size; ++s) {
    for (Op op : unary)
      for (const auto &c : by_size[s - 1])
        by_size[s].push_back(Formula::unary(op, c));
    for (Op op : binary)
      for (std::size_t l = 1; l + 2 <= s; ++l)
        for (const auto &a : by_size[l])
          for (const auto &b : by_size[s - 1 - l])
            by_size[s].push_back(Formula::binary(op, a, b));
  }
  std::vector<Formula> out;
  for (auto &v : by_size)
    for (auto &f : v)
      out.push_back(std::move(f));
  return out;
}

// --- template mode ---------------------------------------------------------

struct Placeholder {
  char kind; // '@' atom, '$' literal
  int id;
};

struct Constraint {
  int lhs;
  int rhs;
  bool less; // otherwise !=
};

struct Pattern {
  std::string body;
  std::vector<Placeholder> slots; // distinct ids in order of appearance
  std::vector<Constraint> constraints;
};

int parse_slot_id(const std::string &s, std::size_t &i) {
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
    ++i;
  if (start == i)
    throw std::invalid_argument("placeholder without number in template: " + s);
  return std::stoi(s.substr(start, i - start));
}

Pattern parse_pattern(const std::string &text) {
  Pattern p;
  std::string where;
  if (auto k = text.find(" where "); k != std::string::npos) {
    p.body = text.substr(0, k);
    where = text.substr(k + 7);
  } else {
    p.body = text;
  }
  for (std::size_t i = 0; i < p.body.size();) {
    char c = p.body[i];
    if (c == '@' || c == '$') {
      ++i;
      int id = parse_slot_id(p.body, i);
      auto it = std::find_if(p.slots.begin(), p.slots.end(),
                             [id](const Placeholder &s) { return s.id == id; });
      if (it == p.slots.end())
        p.slots.push_back({c, id});
      else if (it->kind != c)
        throw std::invalid_argument("placeholder " + std::to_string(id) +
                                    " used as both atom and literal");
    } else {
      ++i;
    }
  }
  std::stringstream ws(where);
  std::string item;
  while (std::getline(ws, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    if (item.empty())
      continue;
    std::size_t i = 0;
    if (item[i] != '@' && item[i] != '$')
      throw std::invalid_argument("bad template constraint: " + item);
    ++i;
    int lhs = parse_slot_id(item, i);
    bool less;
    if (item.compare(i, 2, "!=") == 0) {
      less = false;
      i += 2;
    } else if (item.compare(i, 1, "<") == 0) {
      less = true;
      i += 1;
    } else {
      throw std::invalid_argument("bad template constraint: " + item);
    }
    if (i >= item.size() || (item[i] != '@' && item[i] != '$'))
      throw std::invalid_argument("bad template constraint: " + item);
    ++i;
    int rhs = parse_slot_id(item, i);
    if (i != item.size())
      throw std::invalid_argument("bad template constraint: " + item);
    p.constraints.push_back({lhs, rhs, less});
  }
  for (const auto &c : p.constraints)
    for (int id : {c.lhs, c.rhs})
      if (std::none_of(p.slots.begin(), p.slots.end(),
                       [id](const Placeholder &s) { return s.id == id; }))
        throw std::invalid_argument("constraint names unknown placeholder " +
                                    std::to_string(id));
  return p;
}

std::string substitute(const Pattern &p, const std::vector<std::string> &atoms,
                       const std::map<int, std::size_t> &value) {
  std::string out;
  for (std::size_t i = 0; i < p.body.size();) {
    char c = p.body[i];
    if (c == '@' || c == '$') {
      ++i;
      int id = parse_slot_id(p.body, i);
      std::size_t v = value.at(id);
      if (c == '@') {
        out += atoms[v];
      } else {
        // Literal index: 2k is atom k, 2k+1 its negation.
        if (v % 2)
          out += '!';
        out += atoms[v / 2];
      }
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

void instantiate(const Pattern &p, const ConceptConfig &cfg,
                 std::vector<Formula> &out) {
  const std::size_t n = cfg.atoms.size();
  std::map<int, std::size_t> value;
  // Constraints compare the underlying atom position for literals.
  auto atom_of = [&](int id) {
    auto it = std::find_if(p.slots.begin(), p.slots.end(),
                           [id](const Placeholder &s) { return s.id == id; });
    std::size_t v = value.at(id);
    return it->kind == '$' ? v / 2 : v;
  };
  auto ok = [&] {
    for (const auto &c : p.constraints) {
      if (c.less ? !(atom_of(c.lhs) < atom_of(c.rhs))
                 : atom_of(c.lhs) == atom_of(c.rhs))
        return false;
    }
    return true;
  };
  auto rec = [&](auto &&self, std::size_t k) -> void {
    if (k == p.slots.size()) {
      if (!ok())
        return;
      Formula f = parse_formula(substitute(p, cfg.atoms, value));
      if (f.size() <= cfg.max_size) {
        out.push_back(std::move(f));
        if (out.size() > cfg.hard_cap)
          throw std::length_error(
              "concept class exceeds the cap of " + std::to_string(cfg.hard_cap) +
              " formulas; lower the size bound or tighten the templates");
      }
      return;
    }
    std::size_t range = p.slots[k].kind == '@' ? n : 2 * n;
    for (std::size_t v = 0; v < range; ++v) {
      value[p.slots[k].id] = v;
      self(self, k + 1);
    }
    value.erase(p.slots[k].id);
  };
  rec(rec, 0);
}

} // namespace

ConceptClass enumerate_candidates(const ConceptConfig &cfg) {
  validate(cfg);
  std::vector<Formula> raw;
  if (cfg.mode == ConceptMode::Grammar) {
    raw = enumerate_grammar(cfg);
  } else {
    for (const auto &t : cfg.templates)
      instantiate(parse_pattern(t), cfg, raw);
  }

  // Canonical order, then structural dedup.
  std::vector<std::pair<std::string, Formula>> keyed;
  keyed.reserve(raw.size());
  for (auto &f : raw)
    keyed.emplace_back(to_string(f), std::move(f));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) {
    if (a.second.size() != b.second.size())
      return a.second.size() < b.second.size();
    return a.first < b.first;
  });
  ConceptClass cls;
  cls.config = cfg;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first)
      continue;
    cls.members.push_back(std::move(keyed[i].second));
  }
  return cls;
}

std::vector<std::vector<Observation>> random_probes(const GridWorld &world,
                                                    std::size_t n, Rng &rng) {
  std::vector<std::vector<Observation>> probes;
  probes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 1 + uniform_index(rng, world.max_len());
    probes.push_back(rollout_random(world, len, rng).observations());
  }
  return probes;
}

std::vector<std::uint64_t> signature(const Formula &phi,
                                     const std::vector<std::vector<Observation>> &probes) {
  Monitor m(phi, grid_alphabet());
  std::vector<std::uint64_t> sig((probes.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (m.run(probes[i]))
      sig[i / 64] |= std::uint64_t{1} << (i % 64);
  return sig;
}

ConceptClass dedupe_semantic(const ConceptClass &cls,
                             const std::vector<std::vector<Observation>> &probes) {
  if (probes.empty())
    throw std::invalid_argument("semantic dedup needs at least one probe");
  ConceptClass out;
  out.config = cls.config;
  std::map<std::vector<std::uint64_t>, std::size_t> seen;
  for (const auto &f : cls.members) {
    auto [it, inserted] = seen.emplace(signature(f, probes), out.members.size());
    if (inserted)
      out.members.push_back(f);
  }
  return out;
}

ConceptClass dedupe_semantic(const ConceptClass &cls, const GridWorld &world,
                             std::size_t n_probe, Rng &rng) {
  if (n_probe < 1)
    throw std::invalid_argument("semantic dedup needs at least one probe");
  return dedupe_semantic(cls, random_probes(world, n_probe, rng));
}

std::string class_to_text(const ConceptClass &cls) {
  std::string out;
  for (const auto &f : cls.members) {
    out += to_string(f);
    out += '\n';
  }
  return out;
}

std::vector<Formula> read_formulas(std::istream &in) {
  std::vector<Formula> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto k = line.find('#'); k != std::string::npos)
      line.erase(k);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    out.push_back(parse_formula(line));
  }
  return out;
}

} // namespace intent
