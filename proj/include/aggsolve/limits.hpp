#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace aggsolve {

// Resource guards for the nondeterministic rewriting engines. Exceeding a
// limit raises BranchLimitExceeded; it is reported, never silently truncated,
// and never turned into a sat/unsat verdict.
struct EngineLimits {
  uint64_t branch_limit = 100000;
  uint64_t step_limit_per_branch = 0;  // 0: derived from the input size
};

struct EngineStats {
  uint64_t branches = 0;
  uint64_t rule_applications = 0;
  uint64_t max_branch_steps = 0;
};

class BranchLimitExceeded : public std::runtime_error {
 public:
  explicit BranchLimitExceeded(const std::string& what, EngineStats stats = {})
      : std::runtime_error(what), stats(stats) {}
  EngineStats stats;
};

inline uint64_t default_step_limit(uint64_t input_size) {
  uint64_t n = input_size + 8;
  return 1000 + 100 * n * n;
}

}  // namespace aggsolve
