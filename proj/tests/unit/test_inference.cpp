#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"

#include "intent/inference.hpp"

#include <cmath>

using namespace intent;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

const char *three = "r.y\n.A.\nbn.\n";

Trace walk(const GridWorld &w, const std::string &letters) {
  std::vector<Action> acts;
  for (char c : letters)
    acts.push_back(action_from_letter(c));
  return trace_from_actions(w, acts);
}

SatStats stats(double bar, double hat, std::size_t n, std::size_t rollouts = 10000) {
  SatStats s;
  s.phi_bar = bar;
  s.phi_hat = hat;
  s.n_demos = n;
  s.n_rollouts = rollouts;
  return s;
}

} // namespace

TEST_CASE("kl_bernoulli: closed forms") {
  CHECK(kl_bernoulli(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(std::abs(kl_bernoulli(1.0, 0.5) - std::log(2.0)) < 1e-9);
  CHECK(std::abs(kl_bernoulli(0.9, 0.1) - 0.8 * std::log(9.0)) < 1e-9);
  CHECK(std::abs(kl_bernoulli(0.9, 0.1) - 1.757780) < 1e-6);
  CHECK(std::abs(kl_bernoulli(0.0, 0.5) - std::log(2.0)) < 1e-9);
}

TEST_CASE("kl_bernoulli: nonnegative, zero only on the diagonal") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 1; j < 20; ++j) {
      double p = i / 20.0, q = j / 20.0;
      double d = kl_bernoulli(p, q);
      CHECK(d >= 0.0);
      if (i == j)
        CHECK(d == doctest::Approx(0.0));
      else
        CHECK(d > 0.0);
    }
}

TEST_CASE("clamp_rate keeps estimates off the boundary") {
  CHECK(clamp_rate(0.0, 10000) == doctest::Approx(0.00005));
  CHECK(clamp_rate(1.0, 10000) == doctest::Approx(0.99995));
  CHECK(clamp_rate(0.3, 10000) == 0.3);
}

TEST_CASE("posterior_score: examples") {
  auto a = posterior_score(stats(0.4, 0.4, 10));
  CHECK(a.kl_term == doctest::Approx(0.0));
  CHECK(a.log_posterior == doctest::Approx(0.0));

  auto b = posterior_score(stats(1.0, 0.5, 10));
  CHECK(std::abs(b.log_posterior - 6.93147) < 1e-5);

  auto c = posterior_score(stats(0.2, 0.5, 10));
  CHECK(c.log_posterior == -inf);

  auto d = posterior_score(stats(1.0, 0.0, 20));
  CHECK(std::isfinite(d.log_posterior));
  CHECK(d.log_posterior == doctest::Approx(20 * std::log(20000.0)));
}

TEST_CASE("indicator law on a 21 x 21 grid") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      double bar = i / 20.0, hat = j / 20.0;
      auto s = posterior_score(stats(bar, hat, 7));
      CHECK((s.log_posterior == -inf) == (bar < hat));
      if (bar >= hat)
        CHECK(s.log_posterior == doctest::Approx(7 * s.kl_term));
    }
}

TEST_CASE("log posterior increases with the number of demonstrations") {
  for (auto [bar, hat] : {std::pair{1.0, 0.5}, {0.7, 0.2}, {0.31, 0.3}, {1.0, 0.0}}) {
    double prev = -inf;
    for (std::size_t n = 1; n <= 50; ++n) {
      double lp = posterior_score(stats(bar, hat, n)).log_posterior;
      CHECK(lp > prev);
      prev = lp;
    }
  }
}

TEST_CASE("empirical_satisfaction") {
  GridWorld w = load_world(three);
  std::vector<Trace> demos = {walk(w, "NE"), walk(w, "NW"), walk(w, "S"), walk(w, "E")};
  CHECK(empirical_satisfaction(parse_formula("O yellow"), demos) == 0.25);
  CHECK(empirical_satisfaction(parse_formula("H !red"), demos) == 0.75);
  CHECK(empirical_satisfaction(parse_formula("O yellow | O red"), demos) == 0.5);
  CHECK(empirical_satisfaction(parse_formula("true"), demos) == 1.0);
  CHECK_THROWS(empirical_satisfaction(parse_formula("true"), {}));
}

TEST_CASE("random_satisfaction: trivial formulas are exact") {
  GridWorld w = load_world(three).with_slip(0.1);
  Rng rng = derive_rng(1, "rollouts");
  CHECK(random_satisfaction(parse_formula("true"), w, {3, 5}, 1000, rng) == 1.0);
  CHECK(random_satisfaction(parse_formula("yellow & red"), w, {3, 5}, 1000, rng) == 0.0);
  CHECK_THROWS(random_satisfaction(parse_formula("true"), w, {}, 1000, rng));
  CHECK_THROWS(random_satisfaction(parse_formula("true"), w, {3}, 0, rng));
}

TEST_CASE("random_satisfaction: Monte Carlo agrees with exact enumeration") {
  for (double slip : {0.0, 0.2}) {
    GridWorld w = load_world(three).with_slip(slip);
    Formula f = parse_formula("O yellow");
    double exact = oracle::exact_random_satisfaction(w, f, 6);
    Rng rng = derive_rng(7, "rollouts");
    double mc = random_satisfaction(f, w, {6}, 50000, rng);
    CHECK(std::abs(mc - exact) < 0.01);
  }
}

TEST_CASE("rollout pool matches direct sampling") {
  GridWorld w = load_world(three).with_slip(0.2);
  Rng a = derive_rng(3, "rollouts");
  RolloutPool pool(w, {2, 4, 6}, 20000, a);
  CHECK(pool.size() == 20000);
  CHECK(pool.distinct() <= 20000);
  for (const char *text : {"O yellow", "H !red", "!blue S brown", "Y white"}) {
    Formula f = parse_formula(text);
    double exact = (oracle::exact_random_satisfaction(w, f, 2) +
                    oracle::exact_random_satisfaction(w, f, 4) +
                    oracle::exact_random_satisfaction(w, f, 6)) /
                   3;
    CHECK(std::abs(pool.satisfaction(f) - exact) < 0.015);
  }
}

TEST_CASE("divergence: examples") {
  SpecScore a, b;
  a.kl_term = 1.757780;
  b.kl_term = 0.693147;
  a.demo_fingerprint = b.demo_fingerprint = "x";
  CHECK(std::abs(divergence(a, b) - 1.06463) < 1e-5);
  CHECK(divergence(a, b) == -divergence(b, a));
  CHECK(divergence(a, a) == 0.0);
  b.demo_fingerprint = "y";
  CHECK_THROWS_AS(divergence(a, b), std::invalid_argument);
}

TEST_CASE("rank_specs: ordering, singletons and determinism") {
  GridWorld w = load_world(three).with_slip(0.1);
  std::vector<Trace> demos = {walk(w, "NE"), walk(w, "EN"), walk(w, "NEW")};
  ConceptClass one;
  one.members = {parse_formula("O yellow")};
  Rng r0 = derive_rng(5, "rollouts");
  Ranking single = rank_specs(one, demos, w, 1000, r0);
  REQUIRE(single.scores.size() == 1);
  CHECK(single.top().stats.phi_bar == 1.0);

  ConceptClass cls = enumerate_candidates(default_concept_config());
  Rng r1 = derive_rng(5, "rollouts");
  Rng r2 = derive_rng(5, "rollouts");
  Ranking x = rank_specs(cls, demos, w, 2000, r1);
  Ranking y = rank_specs(cls, demos, w, 2000, r2);
  CHECK(ranking_to_tsv(x) == ranking_to_tsv(y));
  REQUIRE(x.scores.size() == cls.size());
  for (std::size_t i = 1; i < x.scores.size(); ++i) {
    const auto &p = x.scores[i - 1], &q = x.scores[i];
    bool ordered = p.log_posterior > q.log_posterior ||
                   (p.log_posterior == q.log_posterior &&
                    (p.formula.size() < q.formula.size() ||
                     (p.formula.size() == q.formula.size() && p.class_index < q.class_index)));
    CHECK(ordered);
  }
  for (const auto &s : x.scores) {
    CHECK((s.log_posterior == -inf) == (s.stats.phi_bar < s.stats.phi_hat));
    CHECK(s.demo_fingerprint == x.demo_fingerprint);
  }
  CHECK(x.top().stats.phi_bar == 1.0);
  CHECK_THROWS(rank_specs(cls, {}, w, 100, r1));
}

TEST_CASE("argmax sanity: extra satisfying demos keep the perfect spec ahead") {
  // Both candidates have the same random rate; only one is always satisfied.
  GridWorld w = load_world("y.r\n.A.\nr.y\n");
  Formula good = parse_formula("O yellow");
  Formula bad = parse_formula("O red");
  std::vector<Trace> demos = {walk(w, "NW"), walk(w, "SE"), walk(w, "WN")};
  Rng pool_rng = derive_rng(8, "rollouts");
  RolloutPool pool(w, {3}, 20000, pool_rng);
  CHECK(std::abs(pool.satisfaction(good) - pool.satisfaction(bad)) < 0.02);
  std::vector<Formula> cands = {bad, good};
  for (int extra = 0; extra < 6; ++extra) {
    Ranking r = rank_specs(cands, demos, pool);
    CHECK(r.top().formula == good);
    demos.push_back(walk(w, extra % 2 ? "ES" : "NW"));
  }
}

TEST_CASE("ranking table layout") {
  GridWorld w = load_world(three);
  ConceptClass one;
  one.members = {parse_formula("O yellow")};
  Rng rng = derive_rng(5, "rollouts");
  std::string tsv = ranking_to_tsv(rank_specs(one, {walk(w, "NE")}, w, 100, rng));
  CHECK(tsv.rfind("formula\tphi_bar\tphi_hat\tkl_term\tlog_posterior\n", 0) == 0);
  CHECK(tsv.find("O yellow\t1") != std::string::npos);
}
