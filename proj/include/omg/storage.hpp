#pragma once

#include "omg/errors.hpp"

namespace omg {

// Tolerance for level/ramp boundary checks during operation.  Parameter
// validation itself is strict.
inline constexpr double kBoundaryTol = 1e-9;

// Linear storage dynamics s' = lambda*s + u with control u in [u_min, u_max],
// level in [s_min, s_max] and one-way conversion efficiencies mu_c (charge)
// and mu_d (discharge).
struct StorageParams {
  double lambda = 1.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double mu_c = 1.0;
  double mu_d = 1.0;
};

// Storage level together with the 1-based step index of the upcoming decision.
struct StorageState {
  double s = 0.0;
  long t = 1;
};

// Controllable inflow interval; the default collapses to {0} (no inflow).
struct InflowSet {
  double f_min = 0.0;
  double f_max = 0.0;
};

// Throws Errc::infeasible_storage naming the violated inequality, or
// Errc::non_frequent_acting when the control span covers the level span
// (tuning would be impossible).  Returns its argument so call sites can chain.
const StorageParams& validate_storage(const StorageParams& p);

// Bus-side power drawn (u > 0) or injected (u < 0) when the storage applies
// internal control u: h(u) = u/mu_c for u >= 0, mu_d*u for u < 0.
double convert(double u, const StorageParams& p);

// Imbalance left after storage action and inflow: delta - h(u) + f.
double residual_imbalance(double delta, double u, double f, const StorageParams& p);

// Advances the level one step.  Throws Errc::ramp_violation if u leaves
// [u_min, u_max] by more than kBoundaryTol; the level itself is not clamped
// (feasibility is the controller's job and is asserted by the simulator).
StorageState step(const StorageState& state, double u, const StorageParams& p);

void validate_inflow(const InflowSet& f);

}  // namespace omg
