// Past-time LTL: formulas, parsing, printing and finite-trace evaluation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

enum class Op : std::uint8_t {
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  Historically,
  Once,
  Since,
  Yesterday,
};

bool is_unary(Op op);
bool is_binary(Op op);

/// Immutable PLTL syntax tree. Copies share structure.
class Formula {
public:
  /// The constant `true`.
  Formula();

  static Formula atom(std::string name);
  static Formula truth();
  static Formula falsity();
  static Formula unary(Op op, Formula child);
  static Formula binary(Op op, Formula lhs, Formula rhs);

  Op op() const;
  const std::string &name() const;
  const Formula &child() const;
  const Formula &lhs() const;
  const Formula &rhs() const;

  std::size_t size() const;

  friend bool operator==(const Formula &a, const Formula &b);
  friend bool operator!=(const Formula &a, const Formula &b) { return !(a == b); }

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Op op;
  std::string name;
  std::vector<Formula> children;
  std::size_t size;
};

inline Op Formula::op() const { return node_->op; }
inline const std::string &Formula::name() const { return node_->name; }
inline std::size_t Formula::size() const { return node_->size; }

// Shorthands used throughout tests and the concept generator.
Formula f_atom(std::string name);
Formula f_not(Formula f);
Formula f_and(Formula a, Formula b);
Formula f_or(Formula a, Formula b);
Formula f_implies(Formula a, Formula b);
Formula f_hist(Formula f);
Formula f_once(Formula f);
Formula f_since(Formula a, Formula b);
Formula f_yesterday(Formula f);

/// Number of AST nodes.
std::size_t size(const Formula &f);

/// Total order on formulas: by size, then by printed text.
int compare(const Formula &a, const Formula &b);

/// Distinct atom names in first-occurrence order.
std::vector<std::string> atoms_of(const Formula &f);

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &msg, std::size_t position);
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

Formula parse_formula(std::string_view text);

/// Minimal-parenthesis rendering that parses back to an equal tree.
std::string to_string(const Formula &f);

/// Ordered proposition names; an observation is a bitmask over it.
class Alphabet {
public:
  static constexpr std::size_t max_size = 64;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string> &names() const { return names_; }
  const std::string &name(std::size_t i) const { return names_.at(i); }

  /// Index of `name`; throws std::invalid_argument naming the atom otherwise.
  std::size_t index(std::string_view name) const;
  bool contains(std::string_view name) const;

  friend bool operator==(const Alphabet &, const Alphabet &) = default;

private:
  std::vector<std::string> names_;
};

/// Set of propositions true at one step.
struct Observation {
  std::uint64_t bits = 0;

  bool has(std::size_t index) const { return (bits >> index) & 1U; }
  friend bool operator==(Observation, Observation) = default;
};

Observation make_observation(const Alphabet &alphabet,
                             const std::vector<std::string> &props);
std::vector<std::string> observation_names(const Alphabet &alphabet,
                                           Observation obs);

/// Truth value of every subformula at the current step, in the post-order
/// of the compiled formula.
struct MonitorState {
  std::vector<bool> values;
  std::size_t step = 0;

  bool root() const { return values.back(); }
  friend bool operator==(const MonitorState &, const MonitorState &) = default;
};

/// A formula flattened into post-order for constant-space incremental
/// evaluation. Compiling resolves atoms against the alphabet.
class Monitor {
public:
  Monitor(const Formula &phi, const Alphabet &alphabet);

  std::size_t subformula_count() const { return nodes_.size(); }

  MonitorState init(Observation first) const;
  MonitorState step(const MonitorState &state, Observation obs) const;

  /// Root value after consuming the whole trace.
  bool run(std::span<const Observation> trace) const;

  /// Root values after each prefix of `trace`.
  std::vector<bool> run_prefixes(std::span<const Observation> trace) const;

  /// In-place variant used by hot loops: `prev` holds the previous step (or
  /// is ignored when `first`), `cur` receives the new values.
  void advance(const std::uint8_t *prev, std::uint8_t *cur, Observation obs,
               bool first) const;

private:
  struct Node {
    Op op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t atom = 0;
  };
  std::vector<Node> nodes_;
};

/// Satisfaction at the last position of a nonempty trace.
bool evaluate(const Formula &phi, std::span<const Observation> trace,
              const Alphabet &alphabet);

MonitorState monitor_init(const Formula &phi, const Alphabet &alphabet,
                          Observation first);
MonitorState monitor_step(const Formula &phi, const Alphabet &alphabet,
                          const MonitorState &state, Observation obs);

} // namespace intent
