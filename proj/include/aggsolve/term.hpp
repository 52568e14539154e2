#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aggsolve {

enum class TheoryKind { List, MSet, CList, Set };

// A theory fixes the aggregate constructor and the equational axioms that
// identify terms built from it: element order is immaterial for multisets and
// sets (permutativity), duplicated elements are immaterial for sets and --
// adjacent ones only -- for compact lists (absorption).
struct Theory {
  TheoryKind kind = TheoryKind::List;

  std::string_view cons_functor() const {
    switch (kind) {
      case TheoryKind::List: return "[|]";
      case TheoryKind::MSet: return "{[|]}";
      case TheoryKind::CList: return "[[|]]";
      case TheoryKind::Set: return "{|}";
    }
    return "[|]";
  }

  bool permutative() const {
    return kind == TheoryKind::MSet || kind == TheoryKind::Set;
  }
  bool absorptive() const {
    return kind == TheoryKind::CList || kind == TheoryKind::Set;
  }

  std::string_view name() const {
    switch (kind) {
      case TheoryKind::List: return "list";
      case TheoryKind::MSet: return "mset";
      case TheoryKind::CList: return "clist";
      case TheoryKind::Set: return "set";
    }
    return "list";
  }

  friend bool operator==(const Theory&, const Theory&) = default;
};

inline constexpr Theory list_theory{TheoryKind::List};
inline constexpr Theory mset_theory{TheoryKind::MSet};
inline constexpr Theory clist_theory{TheoryKind::CList};
inline constexpr Theory set_theory{TheoryKind::Set};

inline constexpr std::array<Theory, 4> all_theories{list_theory, mset_theory,
                                                    clist_theory, set_theory};

// Immutable first-order term: a variable or a compound f(t1,...,tn).
// Constants are compounds of arity 0. Sharing is safe; rewriting always
// builds new trees.
class Term {
 public:
  Term() : node_(nil_node()) {}

  static Term var(std::string name) {
    assert(!name.empty());
    return Term(std::make_shared<Node>(Node{true, std::move(name), {}}));
  }

  static Term make(std::string functor, std::vector<Term> args = {}) {
    assert(!functor.empty());
    return Term(std::make_shared<Node>(
        Node{false, std::move(functor), std::move(args)}));
  }

  static Term nil() { return Term(nil_node()); }

  bool is_var() const { return node_->var; }
  bool is_compound() const { return !node_->var; }
  bool is_constant() const { return !node_->var && node_->args.empty(); }
  bool is_nil() const { return is_constant() && node_->sym == "nil"; }

  // Variable name or functor.
  const std::string& symbol() const { return node_->sym; }
  std::span<const Term> args() const { return node_->args; }
  size_t arity() const { return node_->args.size(); }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->var != b.node_->var || a.node_->sym != b.node_->sym ||
        a.node_->args.size() != b.node_->args.size())
      return false;
    for (size_t i = 0; i < a.node_->args.size(); ++i)
      if (!(a.node_->args[i] == b.node_->args[i])) return false;
    return true;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    bool var;
    std::string sym;
    std::vector<Term> args;
  };

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static const std::shared_ptr<const Node>& nil_node() {
    static const std::shared_ptr<const Node> n =
        std::make_shared<Node>(Node{false, "nil", {}});
    return n;
  }

  std::shared_ptr<const Node> node_;
};

// Total order on terms: nil < other constants (by name) < variables (by name)
// < compounds (by functor, then arity, then arguments left to right). Any
// fixed total order works for canonical forms; this one is stable and
// printable.
inline int compare_terms(const Term& a, const Term& b) {
  auto category = [](const Term& t) {
    if (t.is_nil()) return 0;
    if (t.is_constant()) return 1;
    if (t.is_var()) return 2;
    return 3;
  };
  int ca = category(a), cb = category(b);
  if (ca != cb) return ca < cb ? -1 : 1;
  if (ca == 0) return 0;
  if (ca == 1 || ca == 2) {
    int c = a.symbol().compare(b.symbol());
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }
  if (int c = a.symbol().compare(b.symbol()); c != 0) return c < 0 ? -1 : 1;
  if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
  for (size_t i = 0; i < a.arity(); ++i)
    if (int c = compare_terms(a.args()[i], b.args()[i]); c != 0) return c;
  return 0;
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const {
    return compare_terms(a, b) < 0;
  }
};

// Number of constant and function symbol occurrences; variables contribute 0.
inline uint64_t size(const Term& t) {
  if (t.is_var()) return 0;
  uint64_t n = 1;
  for (const Term& a : t.args()) n += size(a);
  return n;
}

inline uint64_t tree_depth(const Term& t) {
  uint64_t d = 0;
  for (const Term& a : t.args()) d = std::max(d, 1 + tree_depth(a));
  return d;
}

inline void collect_free_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    out.insert(t.symbol());
    return;
  }
  for (const Term& a : t.args()) collect_free_vars(a, out);
}

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  collect_free_vars(t, out);
  return out;
}

inline bool occurs(const std::string& var, const Term& t) {
  if (t.is_var()) return t.symbol() == var;
  for (const Term& a : t.args())
    if (occurs(var, a)) return true;
  return false;
}

inline bool is_ground(const Term& t) {
  if (t.is_var()) return false;
  for (const Term& a : t.args())
    if (!is_ground(a)) return false;
  return true;
}

inline bool is_cons(const Theory& th, const Term& t) {
  return t.is_compound() && t.arity() == 2 && t.symbol() == th.cons_functor();
}

inline Term cons(const Theory& th, Term head, Term rest) {
  return Term::make(std::string(th.cons_functor()),
                    {std::move(head), std::move(rest)});
}

// Maximal element prefix under the theory's constructor; rest is the first
// non-constructor subterm (a variable, nil, or some other functor).
inline std::pair<std::vector<Term>, Term> split_aggregate(const Theory& th,
                                                          Term t) {
  std::vector<Term> elems;
  while (is_cons(th, t)) {
    elems.push_back(t.args()[0]);
    t = t.args()[1];
  }
  return {std::move(elems), std::move(t)};
}

inline Term build_aggregate(const Theory& th, std::span<const Term> elems,
                            Term rest) {
  Term out = std::move(rest);
  for (size_t i = elems.size(); i-- > 0;) out = cons(th, elems[i], out);
  return out;
}

// Innermost rest of an aggregate spine.
inline Term tail(const Theory& th, Term t) {
  while (is_cons(th, t)) t = t.args()[1];
  return t;
}

// Same spine with a variable rest replaced by nil.
inline Term untail(const Theory& th, const Term& t) {
  if (t.is_var()) return Term::nil();
  if (is_cons(th, t))
    return cons(th, t.args()[0], untail(th, t.args()[1]));
  return t;
}

// Maximum constructor-nesting depth: 0 for non-aggregates, otherwise
// max(1 + rank(element), rank(rest)) along the spine.
inline uint64_t rank(const Theory& th, const Term& t) {
  if (!is_cons(th, t)) return 0;
  return std::max(1 + rank(th, t.args()[0]), rank(th, t.args()[1]));
}

// Depths at which a variable occurs inside a term's aggregate structure.
// Five clauses: constants have no occurrences; the variable itself occurs at
// depth 0; an aggregate with a compound non-constructor rest contributes
// 1 + depths in its head; any other compound contributes 1 + depths in its
// arguments; an aggregate whose rest is a variable or another aggregate
// additionally contributes the depths of the rest at offset 0.
inline std::set<uint64_t> occurrence_depths(const Theory& th,
                                            const std::string& var,
                                            const Term& t) {
  std::set<uint64_t> out;
  if (t.is_var()) {
    if (t.symbol() == var) out.insert(0);
    return out;
  }
  auto shifted = [](const std::set<uint64_t>& s) {
    std::set<uint64_t> r;
    for (uint64_t n : s) r.insert(n + 1);
    return r;
  };
  if (is_cons(th, t)) {
    const Term& head = t.args()[0];
    const Term& rest = t.args()[1];
    out = shifted(occurrence_depths(th, var, head));
    if (rest.is_var() || is_cons(th, rest)) {
      for (uint64_t n : occurrence_depths(th, var, rest)) out.insert(n);
    }
    return out;
  }
  if (t.args().empty()) return out;
  std::set<uint64_t> inner;
  for (const Term& a : t.args())
    for (uint64_t n : occurrence_depths(th, var, a)) inner.insert(n);
  return shifted(inner);
}

class NotStabilizing : public std::runtime_error {
 public:
  NotStabilizing() : std::runtime_error("substitution does not stabilize") {}
};

// Finite map variable -> term. No variable is bound to itself. apply() is
// simultaneous: replaced terms are not rescanned.
class Substitution {
 public:
  Substitution() = default;

  void bind(const std::string& var, Term t) {
    if (t.is_var() && t.symbol() == var) {
      bind_.erase(var);
      return;
    }
    bind_.insert_or_assign(var, std::move(t));
  }

  const Term* lookup(const std::string& var) const {
    auto it = bind_.find(var);
    return it == bind_.end() ? nullptr : &it->second;
  }

  bool empty() const { return bind_.empty(); }
  size_t domain_size() const { return bind_.size(); }
  const std::map<std::string, Term>& bindings() const { return bind_; }

  Term apply(const Term& t) const {
    if (t.is_var()) {
      const Term* b = lookup(t.symbol());
      return b ? *b : t;
    }
    if (t.is_constant()) return t;
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(apply(a));
    return Term::make(t.symbol(), std::move(args));
  }

  friend bool operator==(const Substitution& a, const Substitution& b) {
    if (a.bind_.size() != b.bind_.size()) return false;
    auto ia = a.bind_.begin();
    for (auto ib = b.bind_.begin(); ib != b.bind_.end(); ++ia, ++ib)
      if (ia->first != ib->first || !(ia->second == ib->second)) return false;
    return true;
  }

  // theta^1 = theta, theta^(m+1) = [X_i / theta^m(t_i)] over the original
  // right-hand sides.
  Substitution power(unsigned m) const {
    assert(m >= 1);
    Substitution cur = *this;
    for (unsigned i = 1; i < m; ++i) cur = step(cur);
    return cur;
  }

  // Smallest theta^m with theta^(m+1) == theta^m. The iteration cap is the
  // domain size; acyclic member substitutions stabilize within it.
  Substitution closure() const {
    if (bind_.empty()) return *this;
    Substitution prev = *this;
    size_t cap = bind_.size();
    for (size_t i = 0; i < cap; ++i) {
      Substitution next = step(prev);
      if (next == prev) return prev;
      prev = std::move(next);
    }
    if (step(prev) == prev) return prev;
    throw NotStabilizing();
  }

  // Number of self-composition steps until the fixpoint (diagnostic).
  size_t stabilization_steps() const {
    if (bind_.empty()) return 0;
    Substitution prev = *this;
    size_t cap = bind_.size() + 1;
    for (size_t i = 0; i < cap; ++i) {
      Substitution next = step(prev);
      if (next == prev) return i;
      prev = std::move(next);
    }
    throw NotStabilizing();
  }

 private:
  // One power step: rebind every original X_i to cur(t_i). Identity bindings
  // are kept out of the map, which does not disturb the fixpoint comparison.
  Substitution step(const Substitution& cur) const {
    Substitution next;
    for (const auto& [var, term] : bind_) next.bind(var, cur.apply(term));
    return next;
  }

  std::map<std::string, Term> bind_;
};

// Deterministic source of solver-reserved variables (F_, M_, N_, Z_ plus a
// counter). The parser rejects these prefixes for user input, so generated
// names never collide with parsed constraints.
class FreshSupply {
 public:
  explicit FreshSupply(uint64_t base = 0) : counter_(base) {}

  Term fresh(std::string_view prefix) {
    std::string name(prefix);
    name += "_";
    name += std::to_string(counter_++);
    return Term::var(std::move(name));
  }

  uint64_t counter() const { return counter_; }

  // Bump the counter past any reserved-prefix variable already present, so
  // that newly generated names are genuinely new.
  void advance_past(const std::set<std::string>& vars) {
    for (const std::string& v : vars) {
      if (v.size() < 3 || v[1] != '_') continue;
      char c = v[0];
      if (c != 'F' && c != 'M' && c != 'N' && c != 'Z') continue;
      uint64_t suffix = 0;
      bool numeric = true;
      for (size_t i = 2; i < v.size(); ++i) {
        if (v[i] < '0' || v[i] > '9') {
          numeric = false;
          break;
        }
        suffix = suffix * 10 + uint64_t(v[i] - '0');
      }
      if (numeric && suffix + 1 > counter_) counter_ = suffix + 1;
    }
  }

 private:
  uint64_t counter_;
};

inline bool is_reserved_var_name(std::string_view name) {
  return name.size() >= 2 && name[1] == '_' &&
         (name[0] == 'F' || name[0] == 'M' || name[0] == 'N' ||
          name[0] == 'Z');
}

}  // namespace aggsolve
