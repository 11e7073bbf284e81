#include "intent/scenario.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace intent {

namespace {

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

template <class T> T as_unsigned(const std::string &key, const std::string &v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  return out;
}

double as_double(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size())
      throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool as_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "yes" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "0")
    return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

Op op_from_name(const std::string &name) {
  static const std::map<std::string, Op> ops = {
      {"!", Op::Not},     {"&", Op::And},          {"|", Op::Or},
      {"->", Op::Implies}, {"H", Op::Historically}, {"O", Op::Once},
      {"S", Op::Since},   {"Y", Op::Yesterday},
  };
  auto it = ops.find(name);
  if (it == ops.end())
    throw ConfigError("key 'operators': unknown operator '" + name + "'");
  return it->second;
}

std::string resolve(const std::string &base, const std::string &p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty())
    return path.string();
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string &text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto k = line.find('#'); k != std::string::npos)
      line.erase(k);
    line = trim(line);
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

ScenarioConfig parse_scenario(const std::string &text, const std::string &base_dir) {
  auto kv = parse_key_values(text);
  static const std::set<std::string> known = {
      "seed", "world", "p_slip", "max_len", "demos", "demos_avoid", "concepts",
      "guarded", "templates", "operators", "atoms", "max_size", "hard_cap",
      "dedup_probes", "n_rollouts", "signature_probes", "true_spec", "tau",
      "rounds", "probes_per_round", "clarify_per_round", "bob_mode", "corpus", "out"};
  for (const auto &[k, v] : kv)
    if (!known.count(k))
      throw ConfigError("unknown key '" + k + "'");

  ScenarioConfig cfg;
  auto get = [&](const std::string &k) -> const std::string * {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (!get("seed"))
    throw ConfigError("key 'seed' is required");
  cfg.seed = as_unsigned<std::uint64_t>("seed", *get("seed"));

  if (auto v = get("world"))
    cfg.world_path = resolve(base_dir, *v);
  if (auto v = get("p_slip"))
    cfg.p_slip = as_double("p_slip", *v);
  if (auto v = get("max_len"))
    cfg.max_len = as_unsigned<std::size_t>("max_len", *v);
  if (auto v = get("demos"))
    cfg.demos_path = resolve(base_dir, *v);
  if (auto v = get("demos_avoid")) {
    cfg.demos_avoid = split_list(*v);
    for (const auto &c : cfg.demos_avoid)
      if (!grid_alphabet().contains(c))
        throw ConfigError("key 'demos_avoid': unknown color '" + c + "'");
  }

  bool guarded = true;
  if (auto v = get("guarded"))
    guarded = as_bool("guarded", *v);
  cfg.concepts = default_concept_config(guarded);
  if (auto v = get("concepts")) {
    if (*v == "templates")
      cfg.concepts.mode = ConceptMode::Templates;
    else if (*v == "grammar")
      cfg.concepts.mode = ConceptMode::Grammar;
    else
      throw ConfigError("key 'concepts': expected templates or grammar, got '" + *v + "'");
  }
  if (auto v = get("templates")) {
    std::ifstream in(resolve(base_dir, *v));
    if (!in)
      throw ConfigError("key 'templates': cannot open " + resolve(base_dir, *v));
    cfg.concepts.templates.clear();
    std::string line;
    while (std::getline(in, line)) {
      if (auto k = line.find('#'); k != std::string::npos)
        line.erase(k);
      line = trim(line);
      if (!line.empty())
        cfg.concepts.templates.push_back(line);
    }
  }
  if (auto v = get("operators")) {
    cfg.concepts.operators.clear();
    for (const auto &name : split_list(*v))
      cfg.concepts.operators.insert(op_from_name(name));
  }
  if (auto v = get("atoms"))
    cfg.concepts.atoms = split_list(*v);
  if (auto v = get("max_size"))
    cfg.concepts.max_size = as_unsigned<std::size_t>("max_size", *v);
  if (auto v = get("hard_cap"))
    cfg.concepts.hard_cap = as_unsigned<std::size_t>("hard_cap", *v);
  if (auto v = get("dedup_probes"))
    cfg.concepts.dedup_probes = as_unsigned<std::size_t>("dedup_probes", *v);

  if (auto v = get("n_rollouts"))
    cfg.n_rollouts = as_unsigned<std::size_t>("n_rollouts", *v);
  if (auto v = get("signature_probes"))
    cfg.signature_probes = as_unsigned<std::size_t>("signature_probes", *v);
  if (cfg.n_rollouts < 1)
    throw ConfigError("key 'n_rollouts' must be at least 1");

  if (auto v = get("true_spec")) {
    try {
      parse_formula(*v);
    } catch (const ParseError &e) {
      throw ConfigError("key 'true_spec': " + std::string(e.what()));
    }
    cfg.true_spec = *v;
  }
  auto &t = cfg.transfer;
  t.seed = cfg.seed;
  t.n_rollouts = cfg.n_rollouts;
  t.signature_probes = cfg.signature_probes;
  if (auto v = get("tau"))
    t.tau = as_double("tau", *v);
  if (auto v = get("rounds"))
    t.max_rounds = as_unsigned<std::size_t>("rounds", *v);
  if (auto v = get("probes_per_round"))
    t.probes_per_round = as_unsigned<std::size_t>("probes_per_round", *v);
  if (auto v = get("clarify_per_round"))
    t.clarify_per_round = as_unsigned<std::size_t>("clarify_per_round", *v);
  if (auto v = get("bob_mode")) {
    if (*v == "plan")
      t.bob_mode = BobMode::Plan;
    else if (*v == "corpus")
      t.bob_mode = BobMode::Corpus;
    else
      throw ConfigError("key 'bob_mode': expected plan or corpus, got '" + *v + "'");
  }
  try {
    t.validate();
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (auto v = get("corpus"))
    cfg.corpus_path = resolve(base_dir, *v);
  if (auto v = get("out"))
    cfg.out_dir = *v;
  return cfg;
}

ScenarioConfig load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto base = std::filesystem::path(path).parent_path().string();
  return parse_scenario(buf.str(), base);
}

GridWorld scenario_world(const ScenarioConfig &cfg) {
  if (cfg.world_path.empty())
    throw ConfigError("key 'world' is required");
  GridWorld w = load_world_file(cfg.world_path);
  if (cfg.p_slip)
    w = w.with_slip(*cfg.p_slip);
  if (cfg.max_len)
    w = w.with_max_len(*cfg.max_len);
  return w;
}

std::vector<Trace> traces_avoiding(const std::vector<Trace> &traces,
                                   const std::vector<std::string> &colors) {
  std::uint64_t mask = 0;
  for (const auto &c : colors)
    mask |= std::uint64_t{1} << grid_alphabet().index(c);
  std::vector<Trace> out;
  for (const auto &t : traces) {
    bool hit = false;
    for (const auto &s : t.steps)
      hit = hit || (s.obs.bits & mask) != 0;
    if (!hit)
      out.push_back(t);
  }
  return out;
}

std::vector<Trace> load_checked_traces(const std::string &path, const GridWorld &world) {
  auto traces = read_trace_file(path);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    auto err = check_trace(world, traces[i]);
    if (!err.empty())
      throw std::runtime_error(path + ": trace " + std::to_string(i + 1) + ": " + err);
    if (traces[i].steps.front().pos != world.start())
      throw std::runtime_error(path + ": trace " + std::to_string(i + 1) +
                               " does not begin at the start cell");
  }
  return traces;
}

std::vector<Trace> scenario_demos(const ScenarioConfig &cfg, const GridWorld &world) {
  if (cfg.demos_path.empty())
    throw ConfigError("key 'demos' is required");
  auto demos = load_checked_traces(cfg.demos_path, world);
  if (!cfg.demos_avoid.empty())
    demos = traces_avoiding(demos, cfg.demos_avoid);
  return demos;
}

ConceptClass scenario_concepts(const ScenarioConfig &cfg, const GridWorld &world) {
  ConceptClass cls = enumerate_candidates(cfg.concepts);
  if (cfg.concepts.dedup_probes > 0) {
    Rng rng = derive_rng(cfg.seed, "signatures");
    cls = dedupe_semantic(cls, world, cfg.concepts.dedup_probes, rng);
  }
  return cls;
}

} // namespace intent
