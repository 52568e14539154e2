#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/limits.hpp"
#include "aggsolve/print.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

struct UnificationProblem {
  Theory theory;
  std::vector<std::pair<Term, Term>> equations;
  FreshSupply supply;
};

// Finite complete set of solved-form substitutions; empty means failure.
struct UnifierSet {
  std::vector<Substitution> solutions;
  bool empty() const { return solutions.empty(); }
};

namespace detail {

inline bool eq_presolved(const Literal& lit, const Constraint& c,
                         size_t idx) {
  if (lit.rel != Rel::Eq || !lit.positive) return false;
  if (!lit.lhs.is_var()) return false;
  const std::string& x = lit.lhs.symbol();
  if (occurs(x, lit.rhs)) return false;
  for (size_t i = 0; i < c.literals.size(); ++i)
    if (i != idx && occurs(x, c.literals[i])) return false;
  return true;
}

// Can X = t be rewritten instead of failing the occurs check? Compact lists
// and sets allow it exactly when t is an aggregate whose innermost rest is X
// itself and X does not occur in the elements.
inline bool occurs_relaxable(const Theory& th, const std::string& x,
                             const Term& t) {
  if (th.kind != TheoryKind::CList && th.kind != TheoryKind::Set) return false;
  if (!is_cons(th, t)) return false;
  auto [elems, rest] = split_aggregate(th, t);
  if (!rest.is_var() || rest.symbol() != x) return false;
  for (const Term& e : elems)
    if (occurs(x, e)) return false;
  return true;
}

inline bool same_variable_tails(const Theory& th, const Term& l,
                                const Term& r) {
  Term tl = tail(th, l.args()[1]);
  Term tr = tail(th, r.args()[1]);
  return tl.is_var() && tr.is_var() && tl.symbol() == tr.symbol();
}

}  // namespace detail

// Rule classes for equations, in selection-priority order: failures first,
// then deterministic simplifications, variable elimination, decomposition,
// the same-tail rules, and the branching rules last.
enum class EqRule {
  Clash,        // distinct functors
  OccursFail,   // X = t[X] with no relaxation
  Trivial,      // X = X
  Orient,       // t = X, t not a variable
  VarElim,      // X = t, X elsewhere in the constraint
  Decompose,    // same free functor, argument-wise (lists included)
  SameTailUntail,  // multiset spines sharing their tail variable
  OccursRelax,  // X = [t1..tn|X] forms of compact lists / sets
  Branch,       // multiset rule (7), compact-list / set constructor cases
};

inline int eq_rule_priority(EqRule r) {
  switch (r) {
    case EqRule::Clash:
    case EqRule::OccursFail:
      return 0;
    case EqRule::Trivial:
    case EqRule::Orient:
      return 1;
    case EqRule::VarElim:
      return 2;
    case EqRule::Decompose:
      return 3;
    case EqRule::SameTailUntail:
    case EqRule::OccursRelax:
      return 4;
    case EqRule::Branch:
      return 5;
  }
  return 6;
}

// Classifies the equation literal at idx; nullopt if it is pre-solved (or not
// a positive equation at all).
inline std::optional<EqRule> classify_eq(const Theory& th, size_t idx,
                                         const Constraint& c) {
  const Literal& lit = c.literals[idx];
  if (lit.rel != Rel::Eq || !lit.positive) return std::nullopt;
  const Term& l = lit.lhs;
  const Term& r = lit.rhs;
  if (l.is_var()) {
    if (r.is_var() && r.symbol() == l.symbol()) return EqRule::Trivial;
    if (occurs(l.symbol(), r)) {
      return detail::occurs_relaxable(th, l.symbol(), r)
                 ? EqRule::OccursRelax
                 : EqRule::OccursFail;
    }
    if (detail::eq_presolved(lit, c, idx)) return std::nullopt;
    return EqRule::VarElim;
  }
  if (r.is_var()) return EqRule::Orient;
  if (l.symbol() != r.symbol() || l.arity() != r.arity()) return EqRule::Clash;
  if (!is_cons(th, l)) return EqRule::Decompose;
  switch (th.kind) {
    case TheoryKind::List:
      return EqRule::Decompose;
    case TheoryKind::MSet:
      return detail::same_variable_tails(th, l, r) ? EqRule::SameTailUntail
                                                   : EqRule::Branch;
    case TheoryKind::CList:
      return EqRule::Branch;
    case TheoryKind::Set:
      return EqRule::Branch;
  }
  return EqRule::Branch;
}

namespace detail {

inline Constraint splice(const Constraint& c, size_t idx,
                         std::vector<Literal> repl) {
  Constraint out;
  out.literals.reserve(c.literals.size() - 1 + repl.size());
  for (size_t i = 0; i < c.literals.size(); ++i) {
    if (i == idx) {
      for (Literal& l : repl) out.literals.push_back(std::move(l));
    } else {
      out.literals.push_back(c.literals[i]);
    }
  }
  return out;
}

}  // namespace detail

// Applies the equation rule for the literal at idx, returning the replacement
// branches. Failure branches come back as false constraints.
inline Branches step_eq(const Theory& th, size_t idx, const Constraint& c,
                        FreshSupply& supply) {
  const Literal lit = c.literals[idx];
  const Term l = lit.lhs;
  const Term r = lit.rhs;
  std::optional<EqRule> rule = classify_eq(th, idx, c);
  if (!rule) return {c};
  switch (*rule) {
    case EqRule::Clash:
    case EqRule::OccursFail:
      return {Constraint::false_constraint()};
    case EqRule::Trivial:
      return {detail::splice(c, idx, {})};
    case EqRule::Orient:
      return {detail::splice(c, idx, {eq(r, l)})};
    case EqRule::VarElim: {
      Substitution s;
      s.bind(l.symbol(), r);
      Constraint out;
      out.literals.reserve(c.literals.size());
      for (size_t i = 0; i < c.literals.size(); ++i)
        out.literals.push_back(i == idx ? lit : apply(s, c.literals[i]));
      return {out};
    }
    case EqRule::Decompose: {
      std::vector<Literal> repl;
      repl.reserve(l.arity());
      for (size_t i = 0; i < l.arity(); ++i)
        repl.push_back(eq(l.args()[i], r.args()[i]));
      return {detail::splice(c, idx, std::move(repl))};
    }
    case EqRule::SameTailUntail:
      return {detail::splice(c, idx, {eq(untail(th, l), untail(th, r))})};
    case EqRule::OccursRelax: {
      auto [elems, rest] = split_aggregate(th, r);
      Term n = supply.fresh("N");
      if (th.kind == TheoryKind::Set) {
        // X = {t1,..,tn|X}  ->  X = {t1,..,tn|N}
        return {detail::splice(c, idx, {eq(l, build_aggregate(th, elems, n))})};
      }
      // X = [[t1,..,tn|X]]  ->  t1 = t2 & .. & t1 = tn & X = [[t1|N]]
      std::vector<Literal> repl;
      for (size_t i = 1; i < elems.size(); ++i)
        repl.push_back(eq(elems[0], elems[i]));
      repl.push_back(eq(l, cons(th, elems[0], n)));
      return {detail::splice(c, idx, std::move(repl))};
    }
    case EqRule::Branch:
      break;
  }

  const Term hl = l.args()[0], rl = l.args()[1];
  const Term hr = r.args()[0], rr = r.args()[1];
  Branches out;
  switch (th.kind) {
    case TheoryKind::MSet: {
      // (i) heads and rests; (ii) the head of one side occurs in the rest of
      // the other, through a fresh shared rest N.
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(rl, rr)}));
      Term n = supply.fresh("N");
      out.push_back(
          detail::splice(c, idx, {eq(rl, cons(th, hr, n)), eq(cons(th, hl, n), rr)}));
      return out;
    }
    case TheoryKind::CList: {
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(rl, rr)}));
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(rl, r)}));
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(l, rr)}));
      return out;
    }
    case TheoryKind::Set: {
      if (detail::same_variable_tails(th, l, r)) {
        // {t1..tm|X} = {t'1..t'n|X}: match t1 against some t'_j dropping it
        // from either side, or push t1 into the shared tail.
        auto [le, ltail] = split_aggregate(th, l);
        auto [re, rtail] = split_aggregate(th, r);
        std::span<const Term> le_rest(le.data() + 1, le.size() - 1);
        for (size_t j = 0; j < re.size(); ++j) {
          out.push_back(detail::splice(
              c, idx,
              {eq(le[0], re[j]), eq(build_aggregate(th, le_rest, ltail), r)}));
          std::vector<Term> re_drop;
          for (size_t k = 0; k < re.size(); ++k)
            if (k != j) re_drop.push_back(re[k]);
          out.push_back(detail::splice(
              c, idx,
              {eq(le[0], re[j]), eq(l, build_aggregate(th, re_drop, rtail))}));
        }
        Term n = supply.fresh("N");
        out.push_back(detail::splice(
            c, idx,
            {eq(ltail, cons(th, le[0], n)),
             eq(build_aggregate(th, le_rest, n), build_aggregate(th, re, n))}));
        return out;
      }
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(rl, rr)}));
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(rl, r)}));
      out.push_back(detail::splice(c, idx, {eq(hl, hr), eq(l, rr)}));
      Term n = supply.fresh("N");
      out.push_back(
          detail::splice(c, idx, {eq(rl, cons(th, hr, n)), eq(cons(th, hl, n), rr)}));
      return out;
    }
    case TheoryKind::List:
      break;
  }
  return {c};
}

// Index of the best equation to rewrite next, by rule priority then position.
inline std::optional<size_t> select_equation(const Theory& th,
                                             const Constraint& c) {
  std::optional<size_t> best;
  int best_prio = 1 << 20;
  for (size_t i = 0; i < c.literals.size(); ++i) {
    std::optional<EqRule> rule = classify_eq(th, i, c);
    if (!rule) continue;
    int prio = eq_rule_priority(*rule);
    if (prio < best_prio) {
      best = i;
      best_prio = prio;
      if (prio == 0) break;
    }
  }
  return best;
}

namespace detail {

inline Substitution extract_substitution(const Constraint& c) {
  Substitution s;
  for (const Literal& lit : c.literals) s.bind(lit.lhs.symbol(), lit.rhs);
  return s;
}

inline std::string substitution_key(const Theory& th, const Substitution& s) {
  std::string key;
  for (const auto& [var, term] : s.bindings()) {
    key += var;
    key += "=";
    key += print(normalize(th, term));
    key += ";";
  }
  return key;
}

}  // namespace detail

// Complete (finitary) unification in the theory: every solution of the
// equation set is an E-instance of some returned substitution. Failure is
// the empty set.
inline UnifierSet unify(const UnificationProblem& p,
                        const EngineLimits& limits = {}) {
  Constraint c0;
  uint64_t input_size = 0;
  for (const auto& [l, r] : p.equations) {
    c0.literals.push_back(eq(l, r));
    input_size += size(l) + size(r) + 1;
  }
  uint64_t step_cap = limits.step_limit_per_branch
                          ? limits.step_limit_per_branch
                          : default_step_limit(input_size);
  FreshSupply supply = p.supply;
  supply.advance_past(free_vars(c0));

  struct Node {
    Constraint c;
    uint64_t steps;
  };
  std::vector<Node> stack{{c0, 0}};
  UnifierSet result;
  std::set<std::string> seen;
  EngineStats stats;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.c.failed) continue;
    std::optional<size_t> idx = select_equation(p.theory, node.c);
    if (!idx) {
      Substitution s = detail::extract_substitution(node.c);
      if (seen.insert(detail::substitution_key(p.theory, s)).second)
        result.solutions.push_back(std::move(s));
      continue;
    }
    if (node.steps >= step_cap)
      throw BranchLimitExceeded("unification step limit exceeded", stats);
    Branches branches = step_eq(p.theory, *idx, node.c, supply);
    stats.rule_applications++;
    stats.branches += branches.size();
    if (stats.branches > limits.branch_limit)
      throw BranchLimitExceeded("unification branch limit exceeded", stats);
    for (size_t i = branches.size(); i-- > 0;) {
      if (branches[i].failed) continue;
      stack.push_back({std::move(branches[i]), node.steps + 1});
    }
  }
  return result;
}

inline UnifierSet unify(const Theory& th,
                        std::vector<std::pair<Term, Term>> equations,
                        FreshSupply supply = FreshSupply(),
                        const EngineLimits& limits = {}) {
  return unify(UnificationProblem{th, std::move(equations), supply}, limits);
}

}  // namespace aggsolve
