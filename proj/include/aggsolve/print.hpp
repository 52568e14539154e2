#pragma once

#include <algorithm>
#include <string>

#include "aggsolve/constraint.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

namespace detail {

struct Brackets {
  std::string_view open;
  std::string_view close;
};

// The aggregate functor names are distinct per theory, so printing needs no
// theory parameter.
inline const Brackets* brackets_for(const std::string& functor) {
  static constexpr std::pair<std::string_view, Brackets> table[] = {
      {"[|]", {"[", "]"}},
      {"{[|]}", {"{[", "]}"}},
      {"[[|]]", {"[[", "]]"}},
      {"{|}", {"{", "}"}},
  };
  for (const auto& [name, br] : table)
    if (functor == name) return &br;
  return nullptr;
}

inline bool is_any_cons(const Term& t) {
  return t.is_compound() && t.arity() == 2 && brackets_for(t.symbol());
}

}  // namespace detail

// Canonical concrete syntax: aggregates in [t1,...,tn|r] sugar with nil rests
// elided, everything else as f(args).
inline void print_to(const Term& t, std::string& out) {
  if (t.is_var() || t.is_constant()) {
    out += t.symbol();
    return;
  }
  if (const detail::Brackets* br = detail::brackets_for(t.symbol());
      br && t.arity() == 2) {
    out += br->open;
    Term cur = t;
    bool first = true;
    while (detail::is_any_cons(cur) && cur.symbol() == t.symbol()) {
      if (!first) out += ",";
      print_to(cur.args()[0], out);
      first = false;
      cur = cur.args()[1];
    }
    if (!cur.is_nil()) {
      out += "|";
      print_to(cur, out);
    }
    out += br->close;
    return;
  }
  out += t.symbol();
  out += "(";
  for (size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ",";
    print_to(t.args()[i], out);
  }
  out += ")";
}

inline std::string print(const Term& t) {
  std::string out;
  print_to(t, out);
  return out;
}

inline std::string print(const Literal& lit) {
  std::string out;
  print_to(lit.lhs, out);
  if (lit.rel == Rel::Eq)
    out += lit.positive ? " = " : " != ";
  else
    out += lit.positive ? " in " : " nin ";
  print_to(lit.rhs, out);
  return out;
}

inline std::string print(const Constraint& c) {
  if (c.failed) return "false";
  if (c.literals.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " & ";
    out += print(c.literals[i]);
  }
  return out;
}

// Literal order normalized and duplicates removed; used for fixpoint
// detection and for deduplicating branch states and solved forms.
inline std::string canonical_key(const Constraint& c) {
  if (c.failed) return "false";
  std::vector<std::string> parts;
  parts.reserve(c.literals.size());
  for (const Literal& lit : c.literals) parts.push_back(print(lit));
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " & ";
    out += parts[i];
  }
  return out.empty() ? "true" : out;
}

}  // namespace aggsolve
