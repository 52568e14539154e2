#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/solved_form.hpp"
#include "aggsolve/term.hpp"
#include "aggsolve/unify.hpp"

namespace aggsolve {

class NotSolvedForm : public std::runtime_error {
 public:
  NotSolvedForm() : std::runtime_error("constraint is not a solved form") {}
};

class UnsafeDisequation : public std::runtime_error {
 public:
  UnsafeDisequation()
      : std::runtime_error(
            "disequation of the form u != u; solved-form violation upstream") {
  }
};

class VerificationFailed : public std::runtime_error {
 public:
  explicit VerificationFailed(const std::string& what)
      : std::runtime_error(what) {}
};

// Integer disequation system over unknowns n_0..n_{j-1}: every unknown
// exceeds the floor, and each entry demands n_a != n_b + offset. An entry is
// safe unless it evaluates to u != u.
struct DisequationSystem {
  long floor = 0;
  size_t unknown_count = 0;
  struct Entry {
    size_t a;
    size_t b;
    long offset;
  };
  std::vector<Entry> entries;
};

// Smallest admissible strictly increasing assignment above the floor. A
// finite set of safe disequations always has solutions, so the greedy scan
// terminates.
inline std::vector<long> solve_disequations(const DisequationSystem& s) {
  for (const auto& e : s.entries)
    if (e.a == e.b && e.offset == 0) throw UnsafeDisequation();
  std::vector<long> values(s.unknown_count, 0);
  long prev = s.floor;
  for (size_t i = 0; i < s.unknown_count; ++i) {
    std::set<long> forbidden;
    for (const auto& e : s.entries) {
      if (e.a == e.b) continue;
      if (e.a == i && e.b < i) forbidden.insert(values[e.b] + e.offset);
      if (e.b == i && e.a < i) forbidden.insert(values[e.a] - e.offset);
    }
    long v = prev + 1;
    while (forbidden.count(v)) ++v;
    values[i] = v;
    prev = v;
  }
  return values;
}

// Nested singleton aggregate of the given constructor-nesting rank.
inline Term singleton_tower(const Theory& th, long n) {
  Term t = Term::nil();
  for (long i = 0; i < n; ++i) t = cons(th, t, Term::nil());
  return t;
}

namespace detail {

inline uint64_t max_subterm_rank(const Theory& th, const Term& t) {
  uint64_t best = rank(th, t);
  for (const Term& a : t.args())
    best = std::max(best, max_subterm_rank(th, a));
  return best;
}

inline Term ground_leftovers(const Term& t) {
  if (t.is_var()) return Term::nil();
  if (t.is_constant()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(ground_leftovers(a));
  return Term::make(t.symbol(), std::move(args));
}

// Indexing of the variables that receive tower values: those occurring in
// the transformed negative literals, in first-occurrence order.
struct TowerVars {
  std::vector<std::string> order;
  std::map<std::string, size_t> index;

  void add_term(const Term& t) {
    if (t.is_var()) {
      if (index.emplace(t.symbol(), order.size()).second)
        order.push_back(t.symbol());
      return;
    }
    for (const Term& a : t.args()) add_term(a);
  }
  std::optional<size_t> at(const std::string& v) const {
    auto it = index.find(v);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// One chosen blocking atom per unifier of a (p in V, r nin V) pair. Making
// the atom false under the tower assignment falsifies the whole unifier.
struct BlockingAtom {
  std::string var;       // A
  std::optional<Term> first_element;  // aggregate shape: block via a1
  std::optional<std::string> other_var;  // A = B shape
  bool auto_false = false;  // incompatible with towers outright
};

inline std::optional<BlockingAtom> choose_blocking_atom(
    const Theory& th, const Substitution& unifier, const TowerVars& towers) {
  std::optional<BlockingAtom> best;
  int best_score = -1;
  for (const auto& [var, t] : unifier.bindings()) {
    if (!towers.at(var)) continue;
    BlockingAtom atom{var, std::nullopt, std::nullopt, false};
    int score;
    if (t.is_var()) {
      if (!towers.at(t.symbol())) continue;  // unconstrained fresh variable
      atom.other_var = t.symbol();
      score = 2;
    } else if (!is_cons(th, t)) {
      // A tower never equals a non-aggregate term.
      atom.auto_false = true;
      score = 3;
    } else {
      auto [elems, rest] = split_aggregate(th, t);
      atom.first_element = elems.front();
      if (!rest.is_var() && !rest.is_nil()) {
        // Kernel incompatible with a tower.
        atom.auto_false = true;
        score = 3;
      } else {
        // Blockable through the first element's rank; weaker when that
        // element mentions variables the rank system does not control.
        bool clean = true;
        for (const std::string& v : free_vars(elems.front()))
          if (!towers.at(v)) clean = false;
        score = clean ? 4 : 1;
      }
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(atom);
    }
  }
  return best;
}

}  // namespace detail

// Constructs a verified ground valuation for a solved-form constraint.
//
// Equations fix their variables directly; membership targets take their
// closed member-substitution image; every variable of the remaining negative
// literals becomes a singleton tower whose rank is chosen by a safe integer
// disequation system, so that no blocked coincidence of ranks can make a
// disequality or non-membership fail. The result is always checked against
// the constraint; a failing check is an internal-bug signal.
inline Valuation build_witness(const Theory& th, const Constraint& c,
                               FreshSupply& supply) {
  if (!is_solved(th, c)) throw NotSolvedForm();

  Substitution theta1;
  std::vector<const Literal*> mems, nmems, neqs;
  for (const Literal& lit : c.literals) {
    if (lit.rel == Rel::Eq && lit.positive)
      theta1.bind(lit.lhs.symbol(), lit.rhs);
    else if (lit.rel == Rel::Member && lit.positive)
      mems.push_back(&lit);
    else if (lit.rel == Rel::Member && !lit.positive)
      nmems.push_back(&lit);
    else
      neqs.push_back(&lit);
  }

  std::set<std::string> all_vars = free_vars(c);
  supply.advance_past(all_vars);
  Substitution sigma = member_subst(th, c, supply);
  Substitution closed = sigma.closure();
  auto transform = [&](const Term& t) {
    return closed.apply(theta1.apply(t));
  };

  // Count the variables that are none of: equation left sides, membership
  // targets, non-membership targets, disequation left sides.
  std::set<std::string> special;
  for (const Literal& lit : c.literals) {
    if (lit.rel == Rel::Eq && lit.positive) special.insert(lit.lhs.symbol());
    if (lit.rel == Rel::Member && lit.rhs.is_var())
      special.insert(lit.rhs.symbol());
    if (lit.rel == Rel::Eq && !lit.positive) special.insert(lit.lhs.symbol());
  }
  size_t other_var_count = 0;
  for (const std::string& v : all_vars)
    if (!special.count(v)) ++other_var_count;

  struct TransformedNeq {
    Term lhs;
    Term rhs;
  };
  struct TransformedNin {
    Term lhs;
    Term rhs;
  };
  std::vector<TransformedNeq> tneqs;
  for (const Literal* lit : neqs)
    tneqs.push_back({transform(lit->lhs), transform(lit->rhs)});
  std::vector<TransformedNin> tnins;
  for (const Literal* lit : nmems)
    tnins.push_back({transform(lit->lhs), transform(lit->rhs)});

  detail::TowerVars towers;
  for (const auto& t : tneqs) {
    towers.add_term(t.lhs);
    towers.add_term(t.rhs);
  }
  for (const auto& t : tnins) {
    towers.add_term(t.lhs);
    towers.add_term(t.rhs);
  }

  // Blocking atoms for every (p in V, r nin V) pair: each unifier of the
  // transformed sides must be falsified by the rank assignment.
  std::vector<detail::BlockingAtom> blockers;
  for (const Literal* nin_lit : nmems) {
    if (!nin_lit->rhs.is_var()) continue;
    for (const Literal* in_lit : mems) {
      if (!in_lit->rhs.is_var() ||
          in_lit->rhs.symbol() != nin_lit->rhs.symbol())
        continue;
      UnifierSet us = unify(
          th, {{closed.apply(in_lit->lhs), closed.apply(nin_lit->lhs)}},
          supply);
      for (const Substitution& d : us.solutions) {
        if (d.empty()) throw NotSolvedForm();  // membership inconsistency
        std::optional<detail::BlockingAtom> atom =
            detail::choose_blocking_atom(th, d, towers);
        if (atom) blockers.push_back(std::move(*atom));
        // With no admissible atom the unifier only constrains variables
        // outside the tower set; the final ground check decides.
      }
    }
  }

  uint64_t max_rank = 0;
  for (const Literal& lit : c.literals) {
    max_rank = std::max(max_rank, detail::max_subterm_rank(th, transform(lit.lhs)));
    max_rank = std::max(max_rank, detail::max_subterm_rank(th, transform(lit.rhs)));
  }
  long floor = long(max_rank) + 1 + long(other_var_count);

  for (int attempt = 0; attempt < 3; ++attempt) {
    DisequationSystem system;
    system.floor = floor;
    system.unknown_count = towers.order.size();
    auto add = [&](size_t a, size_t b, long offset) {
      if (a == b && offset != 0) return;  // trivially true
      system.entries.push_back({a, b, offset});
    };
    // Pairwise distinct ranks.
    for (size_t i = 0; i < towers.order.size(); ++i)
      for (size_t j = i + 1; j < towers.order.size(); ++j) add(i, j, 0);
    auto depth_entries = [&](size_t target, const Term& other, long shift) {
      for (size_t w = 0; w < towers.order.size(); ++w) {
        if (w == target) continue;
        for (uint64_t d :
             occurrence_depths(th, towers.order[w], other))
          add(target, w, long(d) + shift);
      }
    };
    for (const auto& t : tneqs) {
      if (t.lhs.is_var()) {
        // rank of the left variable must differ from any achievable rank of
        // the right side.
        depth_entries(*towers.at(t.lhs.symbol()), t.rhs, 0);
      } else if (is_cons(th, t.lhs)) {
        const Term& slack = t.lhs.args()[0];
        if (slack.is_var() && towers.at(slack.symbol()))
          depth_entries(*towers.at(slack.symbol()), t.rhs, -1);
      }
    }
    for (const auto& t : tnins) {
      if (t.rhs.is_var()) {
        depth_entries(*towers.at(t.rhs.symbol()), t.lhs, 1);
      } else if (is_cons(th, t.rhs)) {
        const Term& slack = t.rhs.args()[0];
        if (slack.is_var() && towers.at(slack.symbol()))
          depth_entries(*towers.at(slack.symbol()), t.lhs, 0);
        Term rest = tail(th, t.rhs);
        if (rest.is_var() && towers.at(rest.symbol()))
          depth_entries(*towers.at(rest.symbol()), t.lhs, 1);
      }
    }
    for (const detail::BlockingAtom& atom : blockers) {
      if (atom.auto_false) continue;
      size_t a = *towers.at(atom.var);
      if (atom.other_var) {
        add(a, *towers.at(*atom.other_var), 0);
      } else if (atom.first_element) {
        depth_entries(a, *atom.first_element, 1);
      }
    }

    std::vector<long> ranks = solve_disequations(system);
    Substitution theta2;
    for (size_t i = 0; i < towers.order.size(); ++i)
      theta2.bind(towers.order[i], singleton_tower(th, ranks[i]));

    Valuation gamma;
    for (const std::string& v : all_vars) {
      Term g = detail::ground_leftovers(
          theta2.apply(closed.apply(theta1.apply(Term::var(v)))));
      gamma[v] = std::move(g);
    }
    if (eval_ground(th, c, gamma)) return gamma;
    floor = floor * 2 + 17;
  }
  throw VerificationFailed("constructed valuation does not satisfy the constraint");
}

}  // namespace aggsolve
