#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

class NotGround : public std::runtime_error {
 public:
  explicit NotGround(const std::string& what) : std::runtime_error(what) {}
};

// Canonical form for the word problem of the theory, with variables read as
// free constants. Aggregate spines are flattened and rebuilt per theory:
// lists unchanged, multiset elements sorted (duplicates kept), compact-list
// runs of equal elements collapsed to one, set elements sorted and
// deduplicated. Two terms are equal in the equational theory iff their
// normal forms coincide syntactically.
inline Term normalize(const Theory& th, const Term& t) {
  if (t.is_var() || t.is_constant()) return t;
  if (!is_cons(th, t)) {
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(normalize(th, a));
    return Term::make(t.symbol(), std::move(args));
  }
  std::vector<Term> elems;
  Term cur = t;
  while (is_cons(th, cur)) {
    elems.push_back(normalize(th, cur.args()[0]));
    cur = cur.args()[1];
  }
  Term rest = normalize(th, cur);
  switch (th.kind) {
    case TheoryKind::List:
      break;
    case TheoryKind::MSet:
      std::stable_sort(elems.begin(), elems.end(), TermLess{});
      break;
    case TheoryKind::CList: {
      std::vector<Term> kept;
      for (Term& e : elems) {
        if (kept.empty() || !(kept.back() == e)) kept.push_back(std::move(e));
      }
      elems = std::move(kept);
      break;
    }
    case TheoryKind::Set:
      std::stable_sort(elems.begin(), elems.end(), TermLess{});
      elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
      break;
  }
  return build_aggregate(th, elems, std::move(rest));
}

// Decides E_T |= forall(s = t), variables treated as distinct constants.
inline bool e_equal(const Theory& th, const Term& s, const Term& t) {
  return normalize(th, s) == normalize(th, t);
}

// Ground membership in the privileged model: true iff some element on the
// constructor spine of s is E-equal to t. The kernel below the spine never
// contributes members.
inline bool ground_member(const Theory& th, const Term& t, const Term& s) {
  if (!is_ground(t) || !is_ground(s))
    throw NotGround("ground_member requires ground terms");
  Term nt = normalize(th, t);
  Term cur = normalize(th, s);
  while (is_cons(th, cur)) {
    if (cur.args()[0] == nt) return true;
    cur = cur.args()[1];
  }
  return false;
}

inline bool eval_ground(const Theory& th, const Literal& lit,
                        const Valuation& v) {
  Substitution s = to_substitution(v);
  Term l = s.apply(lit.lhs);
  Term r = s.apply(lit.rhs);
  if (!is_ground(l) || !is_ground(r))
    throw NotGround("valuation does not ground the literal " + lit.lhs.symbol());
  bool truth = lit.rel == Rel::Eq ? e_equal(th, l, r) : ground_member(th, l, r);
  return lit.positive ? truth : !truth;
}

// Conjunction over the literals under the valuation; every free variable of
// the constraint must be grounded.
inline bool eval_ground(const Theory& th, const Constraint& c,
                        const Valuation& v) {
  if (c.failed) return false;
  for (const Literal& lit : c.literals)
    if (!eval_ground(th, lit, v)) return false;
  return true;
}

}  // namespace aggsolve
