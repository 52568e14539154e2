// Command-line front end: decide satisfiability of =, !=, in, nin
// constraints over one aggregate theory, optionally producing solved forms
// and a verified ground witness.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggsolve/aggsolve.hpp"

namespace {

using nlohmann::json;

aggsolve::Theory theory_from_name(const std::string& name) {
  for (const aggsolve::Theory& th : aggsolve::all_theories)
    if (name == th.name()) return th;
  throw CLI::ValidationError("--theory", "unknown theory '" + name + "'");
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open input file '" + path + "'");
  std::ostringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

json outcome_to_json(const aggsolve::SolveOutcome& outcome,
                     bool include_witness) {
  json j;
  j["status"] = outcome.sat() ? "sat" : "unsat";
  j["solved_forms"] = json::array();
  for (const aggsolve::SolvedForm& form : outcome.solved_forms) {
    json f;
    f["literals"] = json::array();
    for (const aggsolve::Literal& lit : form.constraint.literals)
      f["literals"].push_back(aggsolve::print(lit));
    f["fresh_vars"] = json::array();
    for (const std::string& v : form.fresh_vars) f["fresh_vars"].push_back(v);
    j["solved_forms"].push_back(std::move(f));
  }
  if (include_witness && !outcome.witnesses.empty()) {
    json w = json::object();
    for (const auto& [var, term] : outcome.witnesses.front())
      w[var] = aggsolve::print(term);
    j["witness"] = std::move(w);
  }
  j["stats"] = {{"branches", outcome.stats.branches},
                {"rule_applications", outcome.stats.rule_applications}};
  return j;
}

void print_text(const aggsolve::SolveOutcome& outcome, bool include_witness) {
  std::cout << "status: " << (outcome.sat() ? "sat" : "unsat") << "\n";
  for (size_t i = 0; i < outcome.solved_forms.size(); ++i) {
    const aggsolve::SolvedForm& form = outcome.solved_forms[i];
    std::cout << "solved form " << i + 1 << ": "
              << aggsolve::print(form.constraint) << "\n";
    if (!form.fresh_vars.empty()) {
      std::cout << "  fresh:";
      for (const std::string& v : form.fresh_vars) std::cout << " " << v;
      std::cout << "\n";
    }
  }
  if (include_witness && !outcome.witnesses.empty()) {
    std::cout << "witness:";
    if (outcome.witnesses.front().empty()) std::cout << " (empty)";
    std::cout << "\n";
    for (const auto& [var, term] : outcome.witnesses.front())
      std::cout << "  " << var << " = " << aggsolve::print(term) << "\n";
  }
  std::cout << "stats: branches=" << outcome.stats.branches
            << " rule_applications=" << outcome.stats.rule_applications
            << "\n";
}

json limit_json(const aggsolve::EngineStats& stats) {
  return {{"status", "resource_limit"},
          {"solved_forms", json::array()},
          {"stats",
           {{"branches", stats.branches},
            {"rule_applications", stats.rule_applications}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "aggsolve: satisfiability of equality and membership constraints over "
      "lists, multisets, compact lists and sets"};

  std::string theory_name;
  std::string mode = "sat";
  std::string format = "text";
  std::string input_path;
  std::string inline_constraint;
  uint64_t branch_limit = 100000;
  uint64_t seed = 0;
  bool no_member_elim = false;
  int oracle_check_depth = -1;

  app.add_option("--theory", theory_name,
                 "aggregate theory: list | mset | clist | set")
      ->required();
  app.add_option("--mode", mode, "sat | all | witness (default sat)")
      ->check(CLI::IsMember({"sat", "all", "witness"}));
  app.add_option("--format", format, "text | json (default text)")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--branch-limit", branch_limit,
                 "maximum number of branch states per solve");
  app.add_option("--seed", seed, "fresh-variable supply base");
  app.add_flag("--no-member-elim", no_member_elim,
               "keep membership atoms instead of eliminating them "
               "(mset/set only; lists and compact lists always keep them)");
  app.add_option("--oracle-check", oracle_check_depth,
                 "cross-check the verdict against exhaustive enumeration at "
                 "the given depth (debug aid)");
  app.add_option("-e,--constraint", inline_constraint,
                 "constraint text (instead of a file)");
  app.add_option("input", input_path, "input file ('-' or empty: stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  bool json_out = format == "json";
  try {
    aggsolve::Theory theory = theory_from_name(theory_name);
    std::string text =
        inline_constraint.empty() ? read_input(input_path) : inline_constraint;
    aggsolve::Constraint constraint =
        aggsolve::parse_constraint(theory, text);

    aggsolve::SolveConfig config;
    config.member_elim = !no_member_elim;
    config.all_solutions = mode == "all";
    config.want_witness = mode == "witness";
    config.branch_limit = branch_limit;
    config.seed = seed;

    aggsolve::SolveOutcome outcome;
    try {
      outcome = aggsolve::sat(theory, constraint, config);
    } catch (const aggsolve::BranchLimitExceeded& e) {
      std::cerr << "resource limit: " << e.what() << "\n";
      if (json_out) std::cout << limit_json(e.stats).dump(2) << "\n";
      return 2;
    }

    if (oracle_check_depth >= 0) {
      aggsolve::Universe universe = aggsolve::enumerate(
          theory, aggsolve::default_signature(), unsigned(oracle_check_depth));
      std::optional<aggsolve::Valuation> found =
          aggsolve::brute_sat(theory, constraint, universe);
      if (found && !outcome.sat()) {
        std::cerr << "oracle cross-check FAILED: solver says unsat but a "
                     "depth-"
                  << oracle_check_depth << " solution exists\n";
        return 2;
      }
      std::cerr << "oracle cross-check: "
                << (found ? "solution found, consistent with verdict"
                          : "no solution at this depth")
                << "\n";
    }

    if (json_out)
      std::cout << outcome_to_json(outcome, mode == "witness").dump(2) << "\n";
    else
      print_text(outcome, mode == "witness");
    return outcome.sat() ? 0 : 1;
  } catch (const aggsolve::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
