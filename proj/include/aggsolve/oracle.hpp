#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/print.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

class BoundExceeded : public std::runtime_error {
 public:
  BoundExceeded() : std::runtime_error("axiom-closure step bound exceeded") {}
};

struct SignatureSymbol {
  std::string name;
  unsigned arity = 0;
};

using Signature = std::vector<SignatureSymbol>;

inline Signature default_signature(bool with_unary = true) {
  Signature sig{{"nil", 0}, {"a", 0}, {"b", 0}};
  if (with_unary) sig.push_back({"f", 1});
  return sig;
}

// Finite fragment of the ground-term universe: every term of bounded
// constructor-nesting depth and bounded size, one representative per
// equivalence class. Deliberately exponential; test-scale only.
struct Universe {
  Theory theory;
  std::vector<Term> terms;  // canonical representatives
  unsigned depth = 0;
  uint64_t size_cap = 0;
};

namespace detail {

inline uint64_t nesting_depth(const Theory& th, const Term& t) {
  if (t.is_var() || t.is_constant()) return 0;
  if (is_cons(th, t))
    return std::max(1 + nesting_depth(th, t.args()[0]),
                    nesting_depth(th, t.args()[1]));
  uint64_t d = 0;
  for (const Term& a : t.args()) d = std::max(d, nesting_depth(th, a));
  return 1 + d;
}

}  // namespace detail

inline Universe enumerate(const Theory& th, const Signature& sig,
                          unsigned depth, uint64_t size_cap = 7) {
  // Terms grouped by exact size; compose larger ones from smaller.
  std::vector<std::vector<Term>> by_size(size_cap + 1);
  for (const SignatureSymbol& s : sig)
    if (s.arity == 0 && 1 <= size_cap) by_size[1].push_back(Term::make(s.name));
  for (uint64_t n = 2; n <= size_cap; ++n) {
    for (const SignatureSymbol& s : sig) {
      if (s.arity == 1) {
        for (const Term& a : by_size[n - 1])
          by_size[n].push_back(Term::make(s.name, {a}));
      }
    }
    for (uint64_t k = 1; k + 2 <= n + 0; ++k) {
      uint64_t m = n - 1 - k;
      if (m < 1 || m > size_cap) continue;
      for (const Term& h : by_size[k])
        for (const Term& r : by_size[m])
          by_size[n].push_back(cons(th, h, r));
    }
  }
  Universe u{th, {}, depth, size_cap};
  std::set<std::string> seen;
  for (const auto& bucket : by_size) {
    for (const Term& t : bucket) {
      if (detail::nesting_depth(th, t) > depth) continue;
      Term canon = normalize(th, t);
      if (seen.insert(print(canon)).second) u.terms.push_back(std::move(canon));
    }
  }
  return u;
}

// Exhaustive satisfiability over the universe, with per-literal pruning:
// literals are checked as soon as their variables are assigned. Visits every
// assignment when the callback keeps returning true.
inline void for_each_solution(const Theory& th, const Constraint& c,
                              const Universe& universe,
                              const std::function<bool(const Valuation&)>& fn) {
  if (c.failed) return;
  std::vector<std::string> vars;
  for (const std::string& v : free_vars(c)) vars.push_back(v);
  std::map<std::string, size_t> var_index;
  for (size_t i = 0; i < vars.size(); ++i) var_index[vars[i]] = i;
  // Literal becomes checkable once its highest-indexed variable is assigned.
  std::vector<std::vector<const Literal*>> ready(vars.size() + 1);
  for (const Literal& lit : c.literals) {
    size_t latest = 0;
    for (const std::string& v : free_vars(lit))
      latest = std::max(latest, var_index[v] + 1);
    ready[latest].push_back(&lit);
  }

  Valuation current;
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    for (const Literal* lit : ready[i])
      if (!eval_ground(th, *lit, current)) return true;
    if (i == vars.size()) return fn(current);
    for (const Term& t : universe.terms) {
      current[vars[i]] = t;
      if (!go(i + 1)) return false;
    }
    current.erase(vars[i]);
    return true;
  };
  go(0);
}

// First satisfying valuation from the universe's assignments, if any.
inline std::optional<Valuation> brute_sat(const Theory& th,
                                          const Constraint& c,
                                          const Universe& universe) {
  std::optional<Valuation> found;
  for_each_solution(th, c, universe, [&](const Valuation& v) {
    found = v;
    return false;
  });
  return found;
}

// Equality decided purely by searching the closure of the theory's
// equational axioms, applied at every position: permutativity swaps adjacent
// spine elements, absorption drops a duplicated one (adjacent duplicates
// only for compact lists). Swap steps preserve size and drop steps shrink,
// so the reachable sets are finite and two terms are equal iff the sets
// intersect. Used only to validate the normalization-based decision.
inline bool closure_e_equal(const Theory& th, const Term& s, const Term& t,
                            uint64_t step_bound = 200000) {
  auto neighbours = [&th](const Term& u, std::vector<Term>& out) {
    std::function<void(const Term&, const std::function<Term(Term)>&)> walk =
        [&](const Term& cur, const std::function<Term(Term)>& rebuild) {
          if (cur.is_var() || cur.is_constant()) return;
          if (is_cons(th, cur)) {
            const Term& x = cur.args()[0];
            const Term& rest = cur.args()[1];
            if (th.permutative() && is_cons(th, rest)) {
              out.push_back(rebuild(
                  cons(th, rest.args()[0], cons(th, x, rest.args()[1]))));
            }
            if (th.absorptive() && is_cons(th, rest) &&
                x == rest.args()[0]) {
              out.push_back(rebuild(rest));
            }
          }
          for (size_t i = 0; i < cur.arity(); ++i) {
            Term head = cur;
            auto nested = [&rebuild, head, i](Term repl) {
              std::vector<Term> args(head.args().begin(), head.args().end());
              args[i] = std::move(repl);
              return rebuild(Term::make(head.symbol(), std::move(args)));
            };
            walk(cur.args()[i], nested);
          }
        };
    walk(u, [](Term x) { return x; });
  };

  auto reach = [&](const Term& start) {
    std::set<std::string> seen{print(start)};
    std::vector<Term> frontier{start};
    uint64_t steps = 0;
    while (!frontier.empty()) {
      Term cur = std::move(frontier.back());
      frontier.pop_back();
      std::vector<Term> next;
      neighbours(cur, next);
      for (Term& n : next) {
        if (++steps > step_bound) throw BoundExceeded();
        if (seen.insert(print(n)).second) frontier.push_back(std::move(n));
      }
    }
    return seen;
  };

  std::set<std::string> rs = reach(s);
  std::set<std::string> rt = reach(t);
  const std::set<std::string>& small = rs.size() <= rt.size() ? rs : rt;
  const std::set<std::string>& large = rs.size() <= rt.size() ? rt : rs;
  for (const std::string& x : small)
    if (large.count(x)) return true;
  return false;
}

}  // namespace aggsolve
