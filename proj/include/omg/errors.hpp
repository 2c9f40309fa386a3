#pragma once

#include <stdexcept>
#include <string>

namespace omg {

// One code per failure mode so callers (and tests) can dispatch without
// string matching.  The what() message carries the specifics, e.g. which
// inequality a storage violates.
enum class Errc {
  infeasible_storage,
  non_frequent_acting,
  ramp_violation,
  unbounded_subgradient,
  non_convex_cost,
  empty_interval,
  degenerate_slope,
  numerical_failure,
  not_irreducible,
  parse_error,
  gap_error,
  non_monotone_time,
  missing_column,
  infeasible_step,
  feasibility_violation,
  mismatched_seeds,
  zero_baseline,
  config_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace omg
