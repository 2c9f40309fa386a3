#include "omg/errors.hpp"

namespace omg {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::infeasible_storage: return "infeasible_storage";
    case Errc::non_frequent_acting: return "non_frequent_acting";
    case Errc::ramp_violation: return "ramp_violation";
    case Errc::unbounded_subgradient: return "unbounded_subgradient";
    case Errc::non_convex_cost: return "non_convex_cost";
    case Errc::empty_interval: return "empty_interval";
    case Errc::degenerate_slope: return "degenerate_slope";
    case Errc::numerical_failure: return "numerical_failure";
    case Errc::not_irreducible: return "not_irreducible";
    case Errc::parse_error: return "parse_error";
    case Errc::gap_error: return "gap_error";
    case Errc::non_monotone_time: return "non_monotone_time";
    case Errc::missing_column: return "missing_column";
    case Errc::infeasible_step: return "infeasible_step";
    case Errc::feasibility_violation: return "feasibility_violation";
    case Errc::mismatched_seeds: return "mismatched_seeds";
    case Errc::zero_baseline: return "zero_baseline";
    case Errc::config_error: return "config_error";
  }
  return "unknown";
}

}  // namespace omg
