// Scenario files: flat `key = value` documents, `#` starts a comment.
// Input paths resolve against the directory holding the file; the output
// directory is taken as given.

#pragma once

#include "intent/concepts.hpp"
#include "intent/transfer.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace intent {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::string world_path;
  std::optional<double> p_slip;
  std::optional<std::size_t> max_len;
  std::string demos_path;
  /// Drop demonstrations that visit any of these colors.
  std::vector<std::string> demos_avoid;
  ConceptConfig concepts;
  std::size_t n_rollouts = 10000;
  std::size_t signature_probes = 10000;
  std::optional<std::string> true_spec;
  TransferConfig transfer;
  std::string corpus_path;
  std::string out_dir = "out";
};

/// Raw key/value pairs in file order; duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(const std::string &text);

/// Typed view of a scenario. `base_dir` anchors relative paths. Throws
/// ConfigError naming the offending key.
ScenarioConfig parse_scenario(const std::string &text, const std::string &base_dir);
ScenarioConfig load_scenario(const std::string &path);

/// The world file with the config's slip and episode-bound overrides.
GridWorld scenario_world(const ScenarioConfig &cfg);

/// Demonstrations from the config, validated against `world` and filtered by
/// `demos_avoid`.
std::vector<Trace> scenario_demos(const ScenarioConfig &cfg, const GridWorld &world);

/// The configured concept class, semantically deduplicated when
/// `dedup_probes` is set.
ConceptClass scenario_concepts(const ScenarioConfig &cfg, const GridWorld &world);

/// Traces that never visit any of `colors`.
std::vector<Trace> traces_avoiding(const std::vector<Trace> &traces,
                                   const std::vector<std::string> &colors);

/// Reads a trace file and rejects traces that break the trace invariants.
std::vector<Trace> load_checked_traces(const std::string &path, const GridWorld &world);

} // namespace intent
