#include <catch2/catch_amalgamated.hpp>

#include "aggsolve/equational.hpp"
#include "aggsolve/oracle.hpp"
#include "aggsolve/parse.hpp"
#include "aggsolve/print.hpp"
#include "support/testutil.hpp"

using namespace aggsolve;

namespace {

Term t(const Theory& th, const char* text) { return parse_term(th, text); }

}  // namespace

TEST_CASE("normalize canonicalizes per theory") {
  CHECK(print(normalize(mset_theory, t(mset_theory, "{[b,a,b]}"))) ==
        "{[a,b,b]}");
  CHECK(print(normalize(clist_theory, t(clist_theory, "[[a,a,b|X]]"))) ==
        "[[a,b|X]]");
  CHECK(print(normalize(set_theory, t(set_theory, "{b,a,b}"))) == "{a,b}");
  // Lists are free: nothing moves.
  CHECK(normalize(list_theory, t(list_theory, "[b,a,b]")) ==
        t(list_theory, "[b,a,b]"));
}

TEST_CASE("normalize is idempotent") {
  aggtest::Rng rng(8001);
  aggtest::GenOptions opts;
  opts.max_depth = 3;
  for (const Theory& th : all_theories) {
    for (int i = 0; i < 300; ++i) {
      Term x = aggtest::random_term(rng, th, 3, opts);
      Term n = normalize(th, x);
      CHECK(normalize(th, n) == n);
    }
  }
}

TEST_CASE("e_equal decides the word problem") {
  CHECK(e_equal(mset_theory, t(mset_theory, "{[a,b]}"),
                t(mset_theory, "{[b,a]}")));
  CHECK(e_equal(set_theory, t(set_theory, "{a|X}"),
                t(set_theory, "{a,a|X}")));
  CHECK(!e_equal(list_theory, t(list_theory, "[a,b]"),
                 t(list_theory, "[b,a]")));
  // Compact lists only absorb contiguous duplicates.
  CHECK(!e_equal(clist_theory, t(clist_theory, "[[a,b,a]]"),
                 t(clist_theory, "[[a,a,b]]")));
  CHECK(e_equal(clist_theory, t(clist_theory, "[[a,a,b]]"),
                t(clist_theory, "[[a,b]]")));
}

TEST_CASE("e_equal is an equivalence and a congruence on samples") {
  aggtest::Rng rng(8002);
  aggtest::GenOptions opts;
  for (const Theory& th : all_theories) {
    std::vector<Term> pool;
    for (int i = 0; i < 40; ++i)
      pool.push_back(aggtest::random_term(rng, th, 2, opts));
    for (int i = 0; i < 200; ++i) {
      const Term& x = pool[rng() % pool.size()];
      const Term& y = pool[rng() % pool.size()];
      const Term& z = pool[rng() % pool.size()];
      CHECK(e_equal(th, x, x));
      CHECK(e_equal(th, x, y) == e_equal(th, y, x));
      if (e_equal(th, x, y) && e_equal(th, y, z)) CHECK(e_equal(th, x, z));
      if (e_equal(th, x, y)) {
        CHECK(e_equal(th, Term::make("f", {x}), Term::make("f", {y})));
        CHECK(e_equal(th, cons(th, x, z), cons(th, y, z)));
        CHECK(e_equal(th, cons(th, z, x), cons(th, z, y)));
      }
    }
  }
}

TEST_CASE("for lists e_equal is syntactic equality") {
  aggtest::Rng rng(8003);
  aggtest::GenOptions opts;
  for (int i = 0; i < 300; ++i) {
    Term x = aggtest::random_term(rng, list_theory, 2, opts);
    Term y = aggtest::random_term(rng, list_theory, 2, opts);
    CHECK(e_equal(list_theory, x, y) == (x == y));
  }
}

TEST_CASE("ground_member reads membership off the spine") {
  CHECK(ground_member(set_theory, t(set_theory, "a"), t(set_theory, "{b,a}")));
  for (const Theory& th : all_theories)
    CHECK(!ground_member(th, Term::make("a"), Term::nil()));
  // Only the spine counts: the kernel b carries no members.
  CHECK(!ground_member(set_theory, t(set_theory, "a"),
                       t(set_theory, "{c|b}")));
  CHECK(ground_member(list_theory, t(list_theory, "b"),
                      t(list_theory, "[a,b,c]")));
  CHECK_THROWS_AS(ground_member(set_theory, Term::var("X"), Term::nil()),
                  NotGround);
}

TEST_CASE("ground_member is invariant under normalize") {
  aggtest::Rng rng(8004);
  aggtest::GenOptions opts;
  opts.vars = {};  // ground only
  for (const Theory& th : all_theories) {
    for (int i = 0; i < 200; ++i) {
      Term elem = aggtest::random_term(rng, th, 1, opts);
      Term agg = aggtest::random_term(rng, th, 2, opts);
      if (!is_ground(elem) || !is_ground(agg)) continue;
      bool base = ground_member(th, elem, agg);
      CHECK(ground_member(th, normalize(th, elem), agg) == base);
      CHECK(ground_member(th, elem, normalize(th, agg)) == base);
    }
  }
}

TEST_CASE("eval_ground evaluates conjunctions in the privileged model") {
  Valuation empty;
  CHECK(eval_ground(set_theory,
                    parse_constraint(set_theory, "{a|b} != {a|c}"), empty));
  CHECK(eval_ground(set_theory,
                    parse_constraint(set_theory, "{a} = {a,a}"), empty));
  CHECK(!eval_ground(set_theory, parse_constraint(set_theory, "a nin {a}"),
                     empty));
  Valuation v{{"X", parse_term(set_theory, "{a}")}};
  CHECK(eval_ground(set_theory, parse_constraint(set_theory, "a in X"), v));
  CHECK_THROWS_AS(
      eval_ground(set_theory, parse_constraint(set_theory, "a in X"), empty),
      NotGround);
}

TEST_CASE("e_equal agrees with the axiom-closure oracle at small depth") {
  // The exhaustive depth-3 agreement run lives in the acceptance suite;
  // this is the fast sanity slice over random pairs.
  aggtest::Rng rng(8005);
  aggtest::GenOptions opts;
  opts.allow_unary = false;
  opts.vars = {};
  for (const Theory& th : all_theories) {
    for (int i = 0; i < 200; ++i) {
      Term x = aggtest::random_term(rng, th, 2, opts);
      Term y = aggtest::random_term(rng, th, 2, opts);
      CHECK(e_equal(th, x, y) == closure_e_equal(th, x, y));
    }
  }
}
