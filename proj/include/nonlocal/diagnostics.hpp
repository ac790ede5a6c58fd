#pragma once

#include <string>
#include <vector>

#include "nonlocal/scenario.hpp"

namespace nonlocal {

enum class MaxPrincipleBranch { strictly_negative, identically_zero, inconclusive };

const char* to_string(MaxPrincipleBranch b);

/// Grid-level strong maximum principle dichotomy for u <= 0 with
/// M[u] + c u >= -tol.  A grid cannot decide the continuum alternative, so the
/// inconclusive branch exists by design; when the inequality hypothesis fails
/// the report carries hypothesis_ok = false and the violating point.
struct MaxPrincipleReport {
  bool hypothesis_ok = false;
  MaxPrincipleBranch branch = MaxPrincipleBranch::inconclusive;
  double witness_x = 0.0;
  double hypothesis_min = 0.0;  // min of M[u] + c u over the grid
  double mollified_max = 0.0;   // max of u_eps
  double sup_abs_u = 0.0;
};

MaxPrincipleReport strong_max_check(const Kernel& kernel, const GridFunction& c,
                                    const GridFunction& u, double eps, double tol);

enum class CheckStatus { pass, fail, skip };

struct InvariantCheck {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;
  bool all_pass() const;
};

/// Batch-runs the cross-module invariants on one scenario.  Checks that only
/// hold for symmetric kernels are reported as SKIP on asymmetric scenarios.
InvariantReport invariant_suite(const Scenario& sc);

}  // namespace nonlocal
