#include "intent/pltl.hpp"

#include <algorithm>
#include <cctype>

namespace intent {

bool is_unary(Op op) {
  return op == Op::Not || op == Op::Historically || op == Op::Once ||
         op == Op::Yesterday;
}

bool is_binary(Op op) {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Since;
}

Formula Formula::atom(std::string name) {
  if (name.empty())
    throw std::invalid_argument("atom name must be nonempty");
  for (char c : name)
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      throw std::invalid_argument("atom name must be a lowercase identifier: " +
                                  name);
  return Formula(std::make_shared<const Node>(
      Node{Op::Atom, std::move(name), {}, 1}));
}

Formula::Formula() : Formula(truth()) {}

Formula Formula::truth() {
  return Formula(std::make_shared<const Node>(Node{Op::True, {}, {}, 1}));
}

Formula Formula::falsity() {
  return Formula(std::make_shared<const Node>(Node{Op::False, {}, {}, 1}));
}

Formula Formula::unary(Op op, Formula child) {
  if (!is_unary(op))
    throw std::invalid_argument("not a unary operator");
  std::size_t n = child.size() + 1;
  return Formula(
      std::make_shared<const Node>(Node{op, {}, {std::move(child)}, n}));
}

Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  if (!is_binary(op))
    throw std::invalid_argument("not a binary operator");
  std::size_t n = lhs.size() + rhs.size() + 1;
  return Formula(std::make_shared<const Node>(
      Node{op, {}, {std::move(lhs), std::move(rhs)}, n}));
}

const Formula &Formula::child() const {
  if (!is_unary(op()))
    throw std::logic_error("child() on non-unary formula");
  return node_->children[0];
}

const Formula &Formula::lhs() const {
  if (!is_binary(op()))
    throw std::logic_error("lhs() on non-binary formula");
  return node_->children[0];
}

const Formula &Formula::rhs() const {
  if (!is_binary(op()))
    throw std::logic_error("rhs() on non-binary formula");
  return node_->children[1];
}

bool operator==(const Formula &a, const Formula &b) {
  if (a.node_ == b.node_)
    return true;
  if (a.op() != b.op() || a.size() != b.size() || a.name() != b.name())
    return false;
  const auto &ca = a.node_->children;
  const auto &cb = b.node_->children;
  for (std::size_t i = 0; i < ca.size(); ++i)
    if (ca[i] != cb[i])
      return false;
  return true;
}

Formula f_atom(std::string name) { return Formula::atom(std::move(name)); }
Formula f_not(Formula f) { return Formula::unary(Op::Not, std::move(f)); }
Formula f_and(Formula a, Formula b) {
  return Formula::binary(Op::And, std::move(a), std::move(b));
}
Formula f_or(Formula a, Formula b) {
  return Formula::binary(Op::Or, std::move(a), std::move(b));
}
Formula f_implies(Formula a, Formula b) {
  return Formula::binary(Op::Implies, std::move(a), std::move(b));
}
Formula f_hist(Formula f) {
  return Formula::unary(Op::Historically, std::move(f));
}
Formula f_once(Formula f) { return Formula::unary(Op::Once, std::move(f)); }
Formula f_since(Formula a, Formula b) {
  return Formula::binary(Op::Since, std::move(a), std::move(b));
}
Formula f_yesterday(Formula f) {
  return Formula::unary(Op::Yesterday, std::move(f));
}

std::size_t size(const Formula &f) { return f.size(); }

namespace {

int compare_structure(const Formula &a, const Formula &b) {
  if (a.op() != b.op())
    return a.op() < b.op() ? -1 : 1;
  switch (a.op()) {
  case Op::Atom:
    return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
  case Op::True:
  case Op::False:
    return 0;
  default:
    break;
  }
  if (is_unary(a.op()))
    return compare_structure(a.child(), b.child());
  if (int c = compare_structure(a.lhs(), b.lhs()); c != 0)
    return c;
  return compare_structure(a.rhs(), b.rhs());
}

void collect_atoms(const Formula &f, std::vector<std::string> &out) {
  if (f.op() == Op::Atom) {
    if (std::find(out.begin(), out.end(), f.name()) == out.end())
      out.push_back(f.name());
  } else if (is_unary(f.op())) {
    collect_atoms(f.child(), out);
  } else if (is_binary(f.op())) {
    collect_atoms(f.lhs(), out);
    collect_atoms(f.rhs(), out);
  }
}

} // namespace

int compare(const Formula &a, const Formula &b) {
  if (a.size() != b.size())
    return a.size() < b.size() ? -1 : 1;
  if (a == b)
    return 0;
  int c = to_string(a).compare(to_string(b));
  return c != 0 ? (c < 0 ? -1 : 1) : compare_structure(a, b);
}

std::vector<std::string> atoms_of(const Formula &f) {
  std::vector<std::string> out;
  collect_atoms(f, out);
  return out;
}

ParseError::ParseError(const std::string &msg, std::size_t position)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " +
                         msg),
      position_(position) {}

// ---------------------------------------------------------------------------
// Parsing
//
//   implies := or ( '->' implies )?
//   or      := and ( '|' and )*
//   and     := since ( '&' since )*
//   since   := unary ( 'S' unary )*
//   unary   := ( '!' | 'H' | 'O' | 'Y' ) unary | primary
//   primary := ident | 'true' | 'false' | '(' implies ')'

namespace {

enum class Tok { Ident, Not, And, Or, Arrow, Hist, Once, Since, Yest, LParen,
                 RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
        ++i_;
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", i_});
        return out;
      }
      std::size_t start = i_;
      char c = src_[i_];
      if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
        while (i_ < src_.size() &&
               (std::islower(static_cast<unsigned char>(src_[i_])) ||
                std::isdigit(static_cast<unsigned char>(src_[i_])) ||
                src_[i_] == '_'))
          ++i_;
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)),
                       start});
        continue;
      }
      ++i_;
      switch (c) {
      case '!': out.push_back({Tok::Not, "!", start}); break;
      case '&': out.push_back({Tok::And, "&", start}); break;
      case '|': out.push_back({Tok::Or, "|", start}); break;
      case '(': out.push_back({Tok::LParen, "(", start}); break;
      case ')': out.push_back({Tok::RParen, ")", start}); break;
      case 'H': out.push_back({Tok::Hist, "H", start}); break;
      case 'O': out.push_back({Tok::Once, "O", start}); break;
      case 'S': out.push_back({Tok::Since, "S", start}); break;
      case 'Y': out.push_back({Tok::Yest, "Y", start}); break;
      case '-':
        if (i_ < src_.size() && src_[i_] == '>') {
          ++i_;
          out.push_back({Tok::Arrow, "->", start});
          break;
        }
        throw ParseError("expected '->'", start);
      default:
        if (std::isupper(static_cast<unsigned char>(c)))
          throw ParseError(std::string("unknown operator '") + c + "'", start);
        throw ParseError(std::string("unexpected character '") + c + "'", start);
      }
    }
  }

private:
  std::string_view src_;
  std::size_t i_ = 0;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse() {
    Formula f = parse_implies();
    if (peek().kind == Tok::RParen)
      throw ParseError("unbalanced ')'", peek().pos);
    if (peek().kind != Tok::End)
      throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    return f;
  }

private:
  const Token &peek() const { return toks_[i_]; }
  const Token &next() { return toks_[i_++]; }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (peek().kind == Tok::Arrow) {
      next();
      return f_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (peek().kind == Tok::Or) {
      next();
      f = f_or(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_since();
    while (peek().kind == Tok::And) {
      next();
      f = f_and(std::move(f), parse_since());
    }
    return f;
  }

  Formula parse_since() {
    Formula f = parse_unary();
    while (peek().kind == Tok::Since) {
      next();
      f = f_since(std::move(f), parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    switch (peek().kind) {
    case Tok::Not: next(); return f_not(parse_unary());
    case Tok::Hist: next(); return f_hist(parse_unary());
    case Tok::Once: next(); return f_once(parse_unary());
    case Tok::Yest: next(); return f_yesterday(parse_unary());
    default: return parse_primary();
    }
  }

  Formula parse_primary() {
    const Token &t = next();
    switch (t.kind) {
    case Tok::Ident:
      if (t.text == "true")
        return Formula::truth();
      if (t.text == "false")
        return Formula::falsity();
      return f_atom(t.text);
    case Tok::LParen: {
      Formula f = parse_implies();
      if (peek().kind != Tok::RParen)
        throw ParseError("unbalanced '(' opened at " + std::to_string(t.pos),
                         peek().pos);
      next();
      return f;
    }
    case Tok::End:
      throw ParseError("unexpected end of formula", t.pos);
    case Tok::RParen:
      throw ParseError("unbalanced ')'", t.pos);
    default:
      throw ParseError("expected an operand before '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// Binding strength; higher binds tighter.
int precedence(Op op) {
  switch (op) {
  case Op::Implies: return 1;
  case Op::Or: return 2;
  case Op::And: return 3;
  case Op::Since: return 4;
  case Op::Not:
  case Op::Historically:
  case Op::Once:
  case Op::Yesterday: return 5;
  default: return 6;
  }
}

const char *symbol(Op op) {
  switch (op) {
  case Op::Not: return "!";
  case Op::Historically: return "H ";
  case Op::Once: return "O ";
  case Op::Yesterday: return "Y ";
  case Op::And: return " & ";
  case Op::Or: return " | ";
  case Op::Implies: return " -> ";
  case Op::Since: return " S ";
  default: return "";
  }
}

void print(const Formula &f, std::string &out) {
  auto wrap = [&out](const Formula &g, bool parens) {
    if (parens)
      out += '(';
    print(g, out);
    if (parens)
      out += ')';
  };
  switch (f.op()) {
  case Op::Atom: out += f.name(); return;
  case Op::True: out += "true"; return;
  case Op::False: out += "false"; return;
  default: break;
  }
  int p = precedence(f.op());
  if (is_unary(f.op())) {
    out += symbol(f.op());
    wrap(f.child(), precedence(f.child().op()) < p);
    return;
  }
  // Left-associative except '->', which associates to the right.
  bool right_assoc = f.op() == Op::Implies;
  int lp = precedence(f.lhs().op());
  int rp = precedence(f.rhs().op());
  wrap(f.lhs(), right_assoc ? lp <= p : lp < p);
  out += symbol(f.op());
  wrap(f.rhs(), right_assoc ? rp < p : rp <= p);
}

} // namespace

Formula parse_formula(std::string_view text) {
  return Parser(Lexer(text).run()).parse();
}

std::string to_string(const Formula &f) {
  std::string out;
  print(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Alphabet and observations

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > max_size)
    throw std::invalid_argument("alphabet larger than 64 propositions");
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j])
        throw std::invalid_argument("duplicate proposition: " + names_[i]);
}

std::size_t Alphabet::index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name)
      return i;
  throw std::invalid_argument("unknown atom '" + std::string(name) + "'");
}

bool Alphabet::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Observation make_observation(const Alphabet &alphabet,
                             const std::vector<std::string> &props) {
  Observation obs;
  for (const auto &p : props)
    obs.bits |= std::uint64_t{1} << alphabet.index(p);
  return obs;
}

std::vector<std::string> observation_names(const Alphabet &alphabet,
                                           Observation obs) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (obs.has(i))
      out.push_back(alphabet.name(i));
  return out;
}

// ---------------------------------------------------------------------------
// Monitor
//
// Update rules at step i (p = previous step's value):
//   H f   : f_i && p        (init: f_0)
//   O f   : f_i || p        (init: f_0)
//   f S g : g_i || (f_i && p)  (init: g_0)
//   Y f   : f_{i-1}        (init: false)

namespace {

std::uint32_t flatten(const Formula &f, const Alphabet &alphabet,
                      std::vector<Op> &ops, std::vector<std::uint32_t> &a,
                      std::vector<std::uint32_t> &b,
                      std::vector<std::uint32_t> &atom) {
  std::uint32_t ca = 0, cb = 0, at = 0;
  if (is_unary(f.op())) {
    ca = flatten(f.child(), alphabet, ops, a, b, atom);
  } else if (is_binary(f.op())) {
    ca = flatten(f.lhs(), alphabet, ops, a, b, atom);
    cb = flatten(f.rhs(), alphabet, ops, a, b, atom);
  } else if (f.op() == Op::Atom) {
    at = static_cast<std::uint32_t>(alphabet.index(f.name()));
  }
  ops.push_back(f.op());
  a.push_back(ca);
  b.push_back(cb);
  atom.push_back(at);
  return static_cast<std::uint32_t>(ops.size() - 1);
}

} // namespace

Monitor::Monitor(const Formula &phi, const Alphabet &alphabet) {
  std::vector<Op> ops;
  std::vector<std::uint32_t> a, b, atom;
  flatten(phi, alphabet, ops, a, b, atom);
  nodes_.reserve(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i)
    nodes_.push_back(Node{ops[i], a[i], b[i], atom[i]});
}

void Monitor::advance(const std::uint8_t *prev, std::uint8_t *cur,
                      Observation obs, bool first) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node &n = nodes_[i];
    std::uint8_t v = 0;
    switch (n.op) {
    case Op::Atom: v = obs.has(n.atom); break;
    case Op::True: v = 1; break;
    case Op::False: v = 0; break;
    case Op::Not: v = !cur[n.a]; break;
    case Op::And: v = cur[n.a] && cur[n.b]; break;
    case Op::Or: v = cur[n.a] || cur[n.b]; break;
    case Op::Implies: v = !cur[n.a] || cur[n.b]; break;
    case Op::Historically: v = cur[n.a] && (first || prev[i]); break;
    case Op::Once: v = cur[n.a] || (!first && prev[i]); break;
    case Op::Since: v = cur[n.b] || (cur[n.a] && !first && prev[i]); break;
    case Op::Yesterday: v = !first && prev[n.a]; break;
    }
    cur[i] = v;
  }
}

MonitorState Monitor::init(Observation first) const {
  std::vector<std::uint8_t> cur(nodes_.size());
  advance(nullptr, cur.data(), first, true);
  return MonitorState{std::vector<bool>(cur.begin(), cur.end()), 0};
}

MonitorState Monitor::step(const MonitorState &state, Observation obs) const {
  if (state.values.size() != nodes_.size())
    throw std::invalid_argument("monitor state has " +
                                std::to_string(state.values.size()) +
                                " entries, formula has " +
                                std::to_string(nodes_.size()) + " subformulas");
  std::vector<std::uint8_t> prev(state.values.begin(), state.values.end());
  std::vector<std::uint8_t> cur(nodes_.size());
  advance(prev.data(), cur.data(), obs, false);
  return MonitorState{std::vector<bool>(cur.begin(), cur.end()), state.step + 1};
}

bool Monitor::run(std::span<const Observation> trace) const {
  if (trace.empty())
    throw std::invalid_argument("empty trace");
  std::vector<std::uint8_t> a(nodes_.size()), b(nodes_.size());
  std::uint8_t *prev = a.data();
  std::uint8_t *cur = b.data();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    advance(prev, cur, trace[t], t == 0);
    std::swap(prev, cur);
  }
  return prev[nodes_.size() - 1];
}

std::vector<bool> Monitor::run_prefixes(std::span<const Observation> trace) const {
  std::vector<bool> out;
  out.reserve(trace.size());
  std::vector<std::uint8_t> a(nodes_.size()), b(nodes_.size());
  std::uint8_t *prev = a.data();
  std::uint8_t *cur = b.data();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    advance(prev, cur, trace[t], t == 0);
    out.push_back(cur[nodes_.size() - 1]);
    std::swap(prev, cur);
  }
  return out;
}

bool evaluate(const Formula &phi, std::span<const Observation> trace,
              const Alphabet &alphabet) {
  if (trace.empty())
    throw std::invalid_argument("empty trace");
  return Monitor(phi, alphabet).run(trace);
}

MonitorState monitor_init(const Formula &phi, const Alphabet &alphabet,
                          Observation first) {
  return Monitor(phi, alphabet).init(first);
}

MonitorState monitor_step(const Formula &phi, const Alphabet &alphabet,
                          const MonitorState &state, Observation obs) {
  return Monitor(phi, alphabet).step(state, obs);
}

} // namespace intent
