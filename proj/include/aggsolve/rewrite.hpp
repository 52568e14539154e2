#pragma once

#include <optional>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/limits.hpp"
#include "aggsolve/unify.hpp"

namespace aggsolve {

struct RewriteOptions {
  // Replace t in X by X = cons(r, N) for multisets and sets, so pre-solved
  // output carries no membership atoms. Unsound for lists and compact lists,
  // where it is never applied.
  bool member_elim = true;
};

enum class Phase { In, Nin, Neq, Eq };

namespace detail {

inline bool member_elim_applies(const Theory& th, const RewriteOptions& opts) {
  return opts.member_elim &&
         (th.kind == TheoryKind::MSet || th.kind == TheoryKind::Set);
}

inline bool lit_presolved(const Literal& lit, const Constraint& c,
                          size_t idx) {
  switch (lit.rel) {
    case Rel::Eq:
      if (lit.positive) return eq_presolved(lit, c, idx);
      return lit.lhs.is_var() && !occurs(lit.lhs.symbol(), lit.rhs);
    case Rel::Member:
      return lit.rhs.is_var() && !occurs(lit.rhs.symbol(), lit.lhs);
  }
  return false;
}

}  // namespace detail

inline bool literal_presolved(const Literal& lit, const Constraint& c,
                              size_t idx) {
  return detail::lit_presolved(lit, c, idx);
}

// Membership rules: anything fails to belong to a non-constructor term; a
// spine membership either matches the head or recurses into the rest; a
// membership whose right side occurs in its own left side is absurd. With
// member elimination on, r in X becomes the equation X = cons(r, N).
inline Branches step_in(const Theory& th, size_t idx, const Constraint& c,
                        FreshSupply& supply,
                        const RewriteOptions& opts = {}) {
  const Literal lit = c.literals[idx];
  const Term& r = lit.lhs;
  const Term& t = lit.rhs;
  if (t.is_var()) {
    if (occurs(t.symbol(), r)) return {Constraint::false_constraint()};
    if (detail::member_elim_applies(th, opts)) {
      Term n = supply.fresh("N");
      return {detail::splice(c, idx, {eq(t, cons(th, r, n))})};
    }
    return {c};
  }
  if (!is_cons(th, t)) return {Constraint::false_constraint()};
  Branches out;
  out.push_back(detail::splice(c, idx, {eq(r, t.args()[0])}));
  out.push_back(detail::splice(c, idx, {member(r, t.args()[1])}));
  return out;
}

inline Branches step_nin(const Theory& th, size_t idx, const Constraint& c,
                         FreshSupply&) {
  const Literal lit = c.literals[idx];
  const Term& r = lit.lhs;
  const Term& t = lit.rhs;
  if (t.is_var()) {
    if (occurs(t.symbol(), r)) return {detail::splice(c, idx, {})};
    return {c};
  }
  if (!is_cons(th, t)) return {detail::splice(c, idx, {})};
  return {detail::splice(c, idx,
                         {neq(r, t.args()[0]), not_member(r, t.args()[1])})};
}

// Disequality rules: the general table shared by the four theories plus the
// theory-specific constructor and occurrence cases.
inline Branches step_neq(const Theory& th, size_t idx, const Constraint& c,
                         FreshSupply& supply) {
  const Literal lit = c.literals[idx];
  const Term& s = lit.lhs;
  const Term& t = lit.rhs;

  if (s.is_var()) {
    if (t.is_var() && t.symbol() == s.symbol())
      return {Constraint::false_constraint()};
    if (!occurs(s.symbol(), t)) return {c};  // pre-solved
    // X != t with X inside t. Lists and multisets are acyclic outright. For
    // compact lists and sets the equation X = t is satisfiable only when t's
    // innermost rest is X itself, so every other shape rewrites to true.
    if (th.kind == TheoryKind::List || th.kind == TheoryKind::MSet)
      return {detail::splice(c, idx, {})};
    auto [elems, rest] = split_aggregate(th, t);
    bool tail_is_x = rest.is_var() && rest.symbol() == s.symbol();
    if (!is_cons(th, t) || !tail_is_x) return {detail::splice(c, idx, {})};
    bool x_in_elems = false;
    for (const Term& e : elems)
      if (occurs(s.symbol(), e)) x_in_elems = true;
    if (x_in_elems) return {detail::splice(c, idx, {})};
    Branches out;
    if (th.kind == TheoryKind::Set) {
      // X != {t1..tn|X}: some element is missing from X.
      for (const Term& e : elems)
        out.push_back(detail::splice(c, idx, {not_member(e, s)}));
      return out;
    }
    // X != [[t1..tn|X]]: elements disagree, or X is nil, or X starts with
    // something other than t1.
    for (size_t i = 1; i < elems.size(); ++i)
      out.push_back(detail::splice(c, idx, {neq(elems[0], elems[i])}));
    out.push_back(detail::splice(c, idx, {eq(s, Term::nil())}));
    Term n1 = supply.fresh("N");
    Term n2 = supply.fresh("N");
    out.push_back(
        detail::splice(c, idx, {eq(s, cons(th, n1, n2)), neq(n1, elems[0])}));
    return out;
  }

  if (t.is_var()) return {detail::splice(c, idx, {neq(t, s)})};

  if (s.symbol() != t.symbol() || s.arity() != t.arity())
    return {detail::splice(c, idx, {})};
  if (s.arity() == 0) return {Constraint::false_constraint()};

  if (!is_cons(th, s)) {
    Branches out;
    for (size_t i = 0; i < s.arity(); ++i)
      out.push_back(detail::splice(c, idx, {neq(s.args()[i], t.args()[i])}));
    return out;
  }

  const Term hs = s.args()[0], rs = s.args()[1];
  const Term ht = t.args()[0], rt = t.args()[1];
  Branches out;
  switch (th.kind) {
    case TheoryKind::List:
      out.push_back(detail::splice(c, idx, {neq(hs, ht)}));
      out.push_back(detail::splice(c, idx, {neq(rs, rt)}));
      return out;
    case TheoryKind::MSet: {
      if (detail::same_variable_tails(th, s, t))
        return {detail::splice(c, idx, {neq(untail(th, s), untail(th, t))})};
      out.push_back(detail::splice(c, idx, {neq(hs, ht), not_member(hs, rt)}));
      Term n = supply.fresh("N");
      out.push_back(
          detail::splice(c, idx, {eq(t, cons(th, hs, n)), neq(rs, n)}));
      return out;
    }
    case TheoryKind::CList:
      out.push_back(detail::splice(c, idx, {neq(hs, ht)}));
      out.push_back(detail::splice(c, idx, {neq(rs, rt), neq(s, rt), neq(rs, t)}));
      return out;
    case TheoryKind::Set: {
      // Extensionality: some member of one side misses the other. Cannot
      // separate sets that differ only in their kernels.
      Term z = supply.fresh("Z");
      out.push_back(detail::splice(c, idx, {member(z, s), not_member(z, t)}));
      out.push_back(detail::splice(c, idx, {member(z, t), not_member(z, s)}));
      return out;
    }
  }
  return {c};
}

// Literal the phase's main loop should rewrite next, if any. Within the in,
// nin and neq phases selection is leftmost; equations use rule priorities.
inline std::optional<size_t> select_literal(const Theory& th, Phase phase,
                                            const Constraint& c,
                                            const RewriteOptions& opts = {}) {
  if (c.failed) return std::nullopt;
  if (phase == Phase::Eq) return select_equation(th, c);
  for (size_t i = 0; i < c.literals.size(); ++i) {
    const Literal& lit = c.literals[i];
    switch (phase) {
      case Phase::In:
        if (lit.rel != Rel::Member || !lit.positive) continue;
        if (detail::lit_presolved(lit, c, i) &&
            !detail::member_elim_applies(th, opts))
          continue;
        return i;
      case Phase::Nin:
        if (lit.rel != Rel::Member || lit.positive) continue;
        if (detail::lit_presolved(lit, c, i)) continue;
        return i;
      case Phase::Neq:
        if (lit.rel != Rel::Eq || lit.positive) continue;
        if (detail::lit_presolved(lit, c, i)) continue;
        return i;
      case Phase::Eq:
        break;
    }
  }
  return std::nullopt;
}

inline Branches apply_step(const Theory& th, Phase phase, size_t idx,
                           const Constraint& c, FreshSupply& supply,
                           const RewriteOptions& opts) {
  switch (phase) {
    case Phase::In:
      return step_in(th, idx, c, supply, opts);
    case Phase::Nin:
      return step_nin(th, idx, c, supply);
    case Phase::Neq:
      return step_neq(th, idx, c, supply);
    case Phase::Eq:
      return step_eq(th, idx, c, supply);
  }
  return {c};
}

struct BranchNode {
  Constraint c;
  uint64_t steps = 0;
};

// Runs one phase to completion on one branch state: repeatedly selects a
// literal of the phase's relation kind not in pre-solved form and applies a
// rule, exploring the nondeterministic alternatives depth-first. Failed
// alternatives are dropped; if everything fails a single false constraint is
// returned so the disjunction stays equi-satisfiable.
inline std::vector<BranchNode> run_main_loop_node(
    const Theory& th, Phase phase, BranchNode start, FreshSupply& supply,
    const RewriteOptions& opts, const EngineLimits& limits,
    EngineStats& stats, uint64_t step_cap) {
  std::vector<BranchNode> done;
  std::vector<BranchNode> stack{std::move(start)};
  while (!stack.empty()) {
    BranchNode node = std::move(stack.back());
    stack.pop_back();
    if (node.c.failed) continue;
    std::optional<size_t> idx = select_literal(th, phase, node.c, opts);
    if (!idx) {
      done.push_back(std::move(node));
      continue;
    }
    if (node.steps >= step_cap)
      throw BranchLimitExceeded("rewriting step limit exceeded", stats);
    Branches branches = apply_step(th, phase, *idx, node.c, supply, opts);
    stats.rule_applications++;
    stats.branches += branches.size();
    stats.max_branch_steps = std::max(stats.max_branch_steps, node.steps + 1);
    if (stats.branches > limits.branch_limit)
      throw BranchLimitExceeded("branch limit exceeded", stats);
    for (size_t i = branches.size(); i-- > 0;) {
      if (branches[i].failed) continue;
      stack.push_back({std::move(branches[i]), node.steps + 1});
    }
  }
  if (done.empty()) done.push_back({Constraint::false_constraint(), 0});
  return done;
}

// One phase of the rewriting main loop over a single constraint.
inline Branches run_main_loop(const Theory& th, Phase phase,
                              const Constraint& c, FreshSupply& supply,
                              const RewriteOptions& opts = {},
                              const EngineLimits& limits = {}) {
  EngineStats stats;
  uint64_t input_size = 0;
  for (const Literal& lit : c.literals)
    input_size += size(lit.lhs) + size(lit.rhs) + 1;
  uint64_t cap = limits.step_limit_per_branch ? limits.step_limit_per_branch
                                              : default_step_limit(input_size);
  std::vector<BranchNode> nodes = run_main_loop_node(
      th, phase, BranchNode{c, 0}, supply, opts, limits, stats, cap);
  Branches out;
  out.reserve(nodes.size());
  for (BranchNode& n : nodes) out.push_back(std::move(n.c));
  return out;
}

}  // namespace aggsolve
