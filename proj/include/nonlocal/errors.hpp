#pragma once

#include <stdexcept>
#include <string>

namespace nonlocal {

enum class Errc {
  bad_input,
  bad_scenario,
  bad_grid,
  bad_tolerance,
  non_positive_parameter,
  support_excludes_origin,
  resolution_too_coarse,
  iteration_cap,
  tail_tol_too_small,
  epsilon_below_resolution,
  nonpositive_comparator,
  period_mismatch,
  grid_mismatch,
  no_convergence,
  reducible_pattern,
  complex_principal,
  non_positive_eigenvector,
  zero_function,
  certificate_failed,
  symmetry_required,
  hyp_f1_violation,
  no_subsolution_found,
  monotonicity_broken,
  max_iter_exceeded,
  no_radius_found,
  inadmissible_init,
  lambda_sign,
};

const char* errc_name(Errc c);

class Failure : public std::runtime_error {
public:
  Failure(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Failure(code, what); }

// Exit-code class used by the CLI: 3 for malformed input, 1 for solver failures.
bool is_input_error(Errc c);

}  // namespace nonlocal
