#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/equational.hpp"
#include "aggsolve/limits.hpp"
#include "aggsolve/print.hpp"
#include "aggsolve/rewrite.hpp"
#include "aggsolve/solved_form.hpp"
#include "aggsolve/term.hpp"
#include "aggsolve/witness.hpp"

namespace aggsolve {

struct SolveConfig {
  bool member_elim = true;
  bool all_solutions = false;
  bool want_witness = false;
  uint64_t branch_limit = 100000;
  uint64_t step_limit = 0;  // 0: derived from the input size
  uint64_t seed = 0;        // fresh-supply base
};

struct SolvedForm {
  Constraint constraint;
  std::set<std::string> fresh_vars;  // introduced by the rewriting
};

struct SolveOutcome {
  enum class Verdict { Sat, Unsat };
  Verdict verdict = Verdict::Unsat;
  std::vector<SolvedForm> solved_forms;
  // Parallel to solved_forms when witnesses were requested; each valuation
  // grounds its solved form and passes the ground check.
  std::vector<Valuation> witnesses;
  EngineStats stats;

  bool sat() const { return verdict == Verdict::Sat; }
};

namespace detail {

inline uint64_t constraint_size(const Constraint& c) {
  uint64_t n = 0;
  for (const Literal& lit : c.literals)
    n += size(lit.lhs) + size(lit.rhs) + 1;
  return n;
}

// Extends a solved-form witness to the variables of the original constraint.
// Rewriting only drops a variable when the literal it lived in was valid, so
// any ground value will do for the missing ones.
inline Valuation restrict_to(const Valuation& v,
                             const std::set<std::string>& vars) {
  Valuation out;
  for (const std::string& x : vars) {
    auto it = v.find(x);
    out[x] = it == v.end() ? Term::nil() : it->second;
  }
  return out;
}

}  // namespace detail

// The satisfiability procedure: per branch, run the membership,
// non-membership, disequality and unification phases until a full pass
// leaves the constraint unchanged, then apply the solved-form check. The
// constraint is satisfiable in the privileged model iff at least one branch
// reaches a solved form.
inline SolveOutcome sat(const Theory& th, const Constraint& input,
                        const SolveConfig& config = {}) {
  SolveOutcome outcome;
  if (input.failed) return outcome;

  FreshSupply supply(config.seed);
  supply.advance_past(free_vars(input));
  RewriteOptions opts{config.member_elim};
  EngineLimits limits{config.branch_limit, config.step_limit};
  uint64_t step_cap = config.step_limit
                          ? config.step_limit
                          : default_step_limit(detail::constraint_size(input));

  std::set<std::string> seen;
  std::set<std::string> solved_keys;
  std::vector<BranchNode> stack{{input, 0}};
  std::set<std::string> input_vars = free_vars(input);

  constexpr Phase pipeline[] = {Phase::In, Phase::Nin, Phase::Neq, Phase::Eq};
  while (!stack.empty()) {
    BranchNode node = std::move(stack.back());
    stack.pop_back();
    std::string before = canonical_key(node.c);
    std::vector<BranchNode> states{std::move(node)};
    for (Phase phase : pipeline) {
      std::vector<BranchNode> next;
      for (BranchNode& s : states) {
        std::vector<BranchNode> completed =
            run_main_loop_node(th, phase, std::move(s), supply, opts, limits,
                               outcome.stats, step_cap);
        for (BranchNode& n : completed)
          if (!n.c.failed) next.push_back(std::move(n));
      }
      states = std::move(next);
      if (states.empty()) break;
    }
    for (BranchNode& s : states) {
      std::string after = canonical_key(s.c);
      if (after != before) {
        if (seen.insert(after).second) stack.push_back(std::move(s));
        continue;
      }
      // Fixpoint reached; certify or reject the pre-solved constraint.
      std::optional<Constraint> solved = is_solved(th, s.c);
      if (!solved) continue;
      if (!solved_keys.insert(after).second) continue;
      SolvedForm form;
      form.constraint = std::move(*solved);
      for (const std::string& v : free_vars(form.constraint))
        if (!input_vars.count(v)) form.fresh_vars.insert(v);
      outcome.solved_forms.push_back(std::move(form));
      if (!config.all_solutions) {
        stack.clear();
        break;
      }
    }
  }

  outcome.verdict = outcome.solved_forms.empty() ? SolveOutcome::Verdict::Unsat
                                                 : SolveOutcome::Verdict::Sat;
  if (config.want_witness && outcome.sat()) {
    for (const SolvedForm& form : outcome.solved_forms) {
      Valuation full = build_witness(th, form.constraint, supply);
      // Soundness gate: the witness must also satisfy the input constraint.
      Valuation restricted = detail::restrict_to(full, input_vars);
      if (!eval_ground(th, input, restricted))
        throw VerificationFailed(
            "witness for a solved form does not satisfy the input");
      outcome.witnesses.push_back(std::move(restricted));
    }
  }
  return outcome;
}

}  // namespace aggsolve
