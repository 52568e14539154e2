#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/rewrite.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

// Every literal is one of: X = t with X nowhere else in the constraint,
// t in X, X != t, t nin X, each with the right side (left for !=) variable
// not occurring in the other term.
inline bool is_presolved(const Constraint& c) {
  if (c.failed) return false;
  for (size_t i = 0; i < c.literals.size(); ++i)
    if (!literal_presolved(c.literals[i], c, i)) return false;
  return true;
}

// Directed graph over the variables of the membership atoms: t in X adds an
// edge from every variable of t to X. A cycle means some aggregate would
// have to contain itself arbitrarily deep.
struct MembershipGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
};

inline MembershipGraph build_graph(const Constraint& c) {
  MembershipGraph g;
  for (const Literal& lit : c.literals) {
    if (lit.rel != Rel::Member || !lit.positive) continue;
    std::set<std::string> lhs_vars = free_vars(lit.lhs);
    g.nodes.insert(lhs_vars.begin(), lhs_vars.end());
    if (!lit.rhs.is_var()) continue;
    const std::string& x = lit.rhs.symbol();
    g.nodes.insert(x);
    for (const std::string& v : lhs_vars) g.edges.insert({v, x});
  }
  return g;
}

inline bool is_acyclic(const MembershipGraph& g) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& [from, to] : g.edges) succ[from].push_back(to);
  std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
  std::vector<std::pair<std::string, size_t>> stack;
  for (const std::string& start : g.nodes) {
    if (state[start]) continue;
    stack.push_back({start, 0});
    state[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto& out = succ[node];
      if (next < out.size()) {
        const std::string& to = out[next++];
        if (state[to] == 1) return false;
        if (state[to] == 0) {
          state[to] = 1;
          stack.push_back({to, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

// The member substitution: each variable X with membership atoms
// t1 in X, .., tk in X is bound to cons(F, t1, .., tk | M) with F and M new.
// The slack element F keeps the first element free, which compact lists
// need.
inline Substitution member_subst(const Theory& th, const Constraint& c,
                                 FreshSupply& supply) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Term>> members;
  for (const Literal& lit : c.literals) {
    if (lit.rel != Rel::Member || !lit.positive || !lit.rhs.is_var()) continue;
    const std::string& x = lit.rhs.symbol();
    if (!members.count(x)) order.push_back(x);
    members[x].push_back(lit.lhs);
  }
  Substitution s;
  for (const std::string& x : order) {
    Term f = supply.fresh("F");
    Term m = supply.fresh("M");
    std::vector<Term> elems;
    elems.push_back(f);
    for (const Term& t : members[x]) elems.push_back(t);
    s.bind(x, build_aggregate(th, elems, m));
  }
  return s;
}

// A pre-solved, acyclic constraint is membership consistent when no pair
// t nin X, t' in X collapses to the same term once the closed member
// substitution is applied.
inline bool membership_consistent(const Theory& th, const Constraint& c) {
  FreshSupply supply;
  supply.advance_past(free_vars(c));
  Substitution closed = member_subst(th, c, supply).closure();
  for (const Literal& nin_lit : c.literals) {
    if (nin_lit.rel != Rel::Member || nin_lit.positive) continue;
    if (!nin_lit.rhs.is_var()) continue;
    for (const Literal& in_lit : c.literals) {
      if (in_lit.rel != Rel::Member || !in_lit.positive) continue;
      if (!in_lit.rhs.is_var() ||
          in_lit.rhs.symbol() != nin_lit.rhs.symbol())
        continue;
      if (e_equal(th, closed.apply(nin_lit.lhs), closed.apply(in_lit.lhs)))
        return false;
    }
  }
  return true;
}

// Final check: a pre-solved constraint is a solved form when its membership
// graph is acyclic and it is membership consistent. Solved forms are
// guaranteed satisfiable in the privileged model.
inline std::optional<Constraint> is_solved(const Theory& th,
                                           const Constraint& c) {
  if (!is_presolved(c)) return std::nullopt;
  if (!is_acyclic(build_graph(c))) return std::nullopt;
  if (!membership_consistent(th, c)) return std::nullopt;
  return c;
}

}  // namespace aggsolve
