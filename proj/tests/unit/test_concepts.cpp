#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"

#include "intent/concepts.hpp"

#include <set>
#include <sstream>

using namespace intent;

namespace {

const char *phi_f_text = "(H !red & O yellow) & H((yellow & O blue) -> (!blue S brown))";

ConceptConfig tiny_grammar() {
  ConceptConfig cfg;
  cfg.atoms = {"yellow"};
  cfg.mode = ConceptMode::Grammar;
  cfg.operators = {Op::Once};
  cfg.max_size = 2;
  return cfg;
}

std::size_t brute_grammar_count(std::size_t atoms, std::size_t unary, std::size_t binary,
                                std::size_t max_size) {
  std::vector<std::size_t> c(max_size + 1, 0);
  std::size_t total = 0;
  for (std::size_t s = 1; s <= max_size; ++s) {
    if (s == 1)
      c[s] = atoms;
    else
      c[s] = unary * c[s - 1];
    for (std::size_t l = 1; l + 2 <= s; ++l)
      c[s] += binary * c[l] * c[s - 1 - l];
    total += c[s];
  }
  return total;
}

} // namespace

TEST_CASE("grammar: one atom and once up to size two") {
  ConceptClass cls = enumerate_candidates(tiny_grammar());
  REQUIRE(cls.size() == 2);
  CHECK(cls.members[0] == parse_formula("yellow"));
  CHECK(cls.members[1] == parse_formula("O yellow"));
}

TEST_CASE("grammar: count matches the closed recurrence") {
  ConceptConfig cfg;
  cfg.atoms = {"red", "yellow"};
  cfg.mode = ConceptMode::Grammar;
  cfg.operators = {Op::Not, Op::Once, Op::And, Op::Since};
  cfg.max_size = 5;
  ConceptClass cls = enumerate_candidates(cfg);
  CHECK(cls.size() == brute_grammar_count(2, 2, 2, 5));
  std::set<std::string> seen;
  for (const auto &f : cls.members) {
    CHECK(f.size() <= 5);
    CHECK(seen.insert(to_string(f)).second);
  }
}

TEST_CASE("grammar: oversized requests fail before enumeration") {
  ConceptConfig cfg;
  cfg.atoms = grid_alphabet().names();
  cfg.mode = ConceptMode::Grammar;
  cfg.operators = {Op::Not, Op::And, Op::Or, Op::Once, Op::Historically, Op::Since};
  cfg.max_size = 12;
  cfg.hard_cap = 1000;
  CHECK_THROWS_AS(enumerate_candidates(cfg), std::length_error);
}

TEST_CASE("templates: literal family over two atoms has 24 members") {
  ConceptConfig cfg;
  cfg.atoms = {"red", "yellow"};
  cfg.mode = ConceptMode::Templates;
  cfg.templates = {"H $1", "O $1", "H $1 & O $2"};
  ConceptClass cls = enumerate_candidates(cfg);
  CHECK(cls.size() == 24);
  CHECK(cls.find(parse_formula("H !red & O yellow")) >= 0);
  CHECK(cls.find(parse_formula("H red & O !red")) >= 0);
}

TEST_CASE("templates: constraints restrict instantiation") {
  ConceptConfig cfg;
  cfg.atoms = {"red", "yellow", "blue"};
  cfg.templates = {"O @1 & O @2 where @1<@2"};
  CHECK(enumerate_candidates(cfg).size() == 3);
  cfg.templates = {"O @1 & O @2 where @1!=@2"};
  CHECK(enumerate_candidates(cfg).size() == 6);
  cfg.templates = {"O @1 & O @2"};
  CHECK(enumerate_candidates(cfg).size() == 9);
}

TEST_CASE("templates: malformed patterns are rejected") {
  ConceptConfig cfg;
  cfg.atoms = {"red"};
  cfg.templates = {"O @1 where @1<<@2"};
  CHECK_THROWS(enumerate_candidates(cfg));
  cfg.templates = {"O (@1"};
  CHECK_THROWS(enumerate_candidates(cfg));
}

TEST_CASE("config validation") {
  ConceptConfig cfg = tiny_grammar();
  cfg.atoms.clear();
  CHECK_THROWS(enumerate_candidates(cfg));
  cfg = tiny_grammar();
  cfg.max_size = 0;
  CHECK_THROWS(enumerate_candidates(cfg));
}

TEST_CASE("default class: size window and required members") {
  ConceptClass cls = enumerate_candidates(default_concept_config());
  CHECK(cls.size() >= 500);
  CHECK(cls.size() <= 2000);
  CHECK(cls.find(parse_formula(phi_f_text)) >= 0);
  CHECK(cls.find(parse_formula("H !red & O yellow")) >= 0);
  CHECK(cls.find(parse_formula("H !red & O yellow & O blue")) >= 0);
  for (const auto &f : cls.members)
    CHECK(f.size() <= 17);
  CHECK(enumerate_candidates(default_concept_config(false)).size() < cls.size());
}

TEST_CASE("enumeration is deterministic and canonically ordered") {
  ConceptClass a = enumerate_candidates(default_concept_config());
  ConceptClass b = enumerate_candidates(default_concept_config());
  CHECK(a.members == b.members);
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK(compare(a.members[i - 1], a.members[i]) < 0);
}

TEST_CASE("every member parses back to itself") {
  ConceptClass cls = enumerate_candidates(default_concept_config());
  for (const auto &f : cls.members)
    CHECK(parse_formula(to_string(f)) == f);
  std::istringstream in(class_to_text(cls));
  CHECK(read_formulas(in) == cls.members);
}

TEST_CASE("dedupe merges H !red with !O red") {
  GridWorld w = load_world("r.y\n.A.\nbn.\n");
  ConceptClass cls;
  cls.members = {parse_formula("H !red"), parse_formula("!(O red)")};
  Rng rng = derive_rng(1, "signatures");
  ConceptClass out = dedupe_semantic(cls, w, 500, rng);
  REQUIRE(out.size() == 1);
  CHECK(out.members[0] == parse_formula("H !red"));
}

TEST_CASE("dedupe keeps distinguishable formulas") {
  GridWorld w = load_world("r.y\n.A.\nbn.\n");
  ConceptClass cls;
  cls.members = {parse_formula("O yellow"), parse_formula("O red")};
  Rng rng = derive_rng(1, "signatures");
  CHECK(dedupe_semantic(cls, w, 500, rng).size() == 2);
  CHECK_THROWS(dedupe_semantic(cls, w, 0, rng));
}

TEST_CASE("dedupe is sound on its probes") {
  GridWorld w = load_world("ry.b\n.A.n\nyrb.\n").with_max_len(10);
  ConceptConfig cfg;
  cfg.atoms = {"red", "yellow", "blue"};
  cfg.mode = ConceptMode::Grammar;
  cfg.operators = {Op::Not, Op::Once, Op::Historically, Op::And};
  cfg.max_size = 4;
  ConceptClass cls = enumerate_candidates(cfg);
  Rng rng = derive_rng(2, "signatures");
  auto probes = random_probes(w, 300, rng);
  ConceptClass out = dedupe_semantic(cls, probes);
  CHECK(out.size() < cls.size());

  std::set<std::vector<std::uint64_t>> kept;
  for (const auto &f : out.members)
    CHECK(kept.insert(signature(f, probes)).second);
  for (const auto &f : cls.members)
    CHECK(kept.count(signature(f, probes)) == 1);
  for (std::size_t i = 1; i < out.size(); ++i)
    CHECK(compare(out.members[i - 1], out.members[i]) < 0);
}

TEST_CASE("random probes respect the episode bound") {
  GridWorld w = load_world("r.y\n.A.\nbn.\n").with_max_len(6);
  Rng rng = derive_rng(3, "probes");
  auto probes = random_probes(w, 2000, rng);
  std::set<std::size_t> lengths;
  for (const auto &p : probes) {
    CHECK(p.size() >= 1);
    CHECK(p.size() <= 6);
    lengths.insert(p.size());
  }
  CHECK(lengths.size() == 6);
}
