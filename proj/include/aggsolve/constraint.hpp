#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aggsolve/term.hpp"

namespace aggsolve {

enum class Rel : uint8_t { Eq, Member };

// Polarity-tagged relation between two terms; the four surface forms are
// =, !=, in, nin.
struct Literal {
  Rel rel = Rel::Eq;
  bool positive = true;
  Term lhs;
  Term rhs;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.rel == b.rel && a.positive == b.positive && a.lhs == b.lhs &&
           a.rhs == b.rhs;
  }
};

inline Literal eq(Term l, Term r) {
  return {Rel::Eq, true, std::move(l), std::move(r)};
}
inline Literal neq(Term l, Term r) {
  return {Rel::Eq, false, std::move(l), std::move(r)};
}
inline Literal member(Term l, Term r) {
  return {Rel::Member, true, std::move(l), std::move(r)};
}
inline Literal not_member(Term l, Term r) {
  return {Rel::Member, false, std::move(l), std::move(r)};
}

// Conjunction of literals. A false conjunct absorbs the whole constraint;
// true literals are erased as rewriting proceeds, so an empty open
// constraint is trivially satisfiable.
struct Constraint {
  std::vector<Literal> literals;
  bool failed = false;

  enum class Status { Open, True, False };
  Status status() const {
    if (failed) return Status::False;
    return literals.empty() ? Status::True : Status::Open;
  }

  static Constraint false_constraint() {
    Constraint c;
    c.failed = true;
    return c;
  }

  friend bool operator==(const Constraint& a, const Constraint& b) {
    return a.failed == b.failed && a.literals == b.literals;
  }
};

// Finite disjunction of constraints, equi-satisfiable with the literal it
// replaced.
using Branches = std::vector<Constraint>;

// Finite map variable -> ground term.
using Valuation = std::map<std::string, Term>;

inline std::set<std::string> free_vars(const Literal& lit) {
  std::set<std::string> out;
  collect_free_vars(lit.lhs, out);
  collect_free_vars(lit.rhs, out);
  return out;
}

inline std::set<std::string> free_vars(const Constraint& c) {
  std::set<std::string> out;
  for (const Literal& lit : c.literals) {
    collect_free_vars(lit.lhs, out);
    collect_free_vars(lit.rhs, out);
  }
  return out;
}

inline bool occurs(const std::string& var, const Literal& lit) {
  return occurs(var, lit.lhs) || occurs(var, lit.rhs);
}

inline Literal apply(const Substitution& s, const Literal& lit) {
  return {lit.rel, lit.positive, s.apply(lit.lhs), s.apply(lit.rhs)};
}

inline Constraint apply(const Substitution& s, const Constraint& c) {
  Constraint out;
  out.failed = c.failed;
  out.literals.reserve(c.literals.size());
  for (const Literal& lit : c.literals) out.literals.push_back(apply(s, lit));
  return out;
}

inline Substitution to_substitution(const Valuation& v) {
  Substitution s;
  for (const auto& [var, term] : v) s.bind(var, term);
  return s;
}

}  // namespace aggsolve
