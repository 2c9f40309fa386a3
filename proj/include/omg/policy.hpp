#pragma once

#include <span>
#include <utility>
#include <vector>

#include "omg/tuning.hpp"

namespace omg {

struct Decision {
  double u = 0.0;
  double f = 0.0;
  // Value of the policy's own step program at (u, f): the biased objective
  // lambda*(s+gamma)*u + w*g for the online policy, plain g otherwise.
  double objective = 0.0;
};

// One step of the online policy: minimize lambda*(s+gamma)*u + w*g(u, f) over
// u in [u_min, u_max] (intersected with the level box when
// enforce_level_constraint is set) and f in the inflow interval.  Built-in
// cost families are solved exactly — endpoint shortcuts from the global
// subgradient bounds, then closed forms / breakpoint enumeration of the
// piecewise-linear objective; custom costs fall back to golden-section.
Decision omg_step(const StorageState& state, double delta, double price, const CostSpec& cost,
                  const StorageParams& storage, const InflowSet& inflow, const OmgParams& params,
                  bool enforce_level_constraint = false);

// Myopic minimizer of the stage cost with the level constraint always on;
// ties go to the u of smallest magnitude (then charge).  Throws
// Errc::infeasible_step if the control box is empty (impossible for a
// validated storage).
Decision greedy_step(const StorageState& state, double delta, double price, const CostSpec& cost,
                     const StorageParams& storage, const InflowSet& inflow);

// u = 0, f chosen to minimize the stage cost at u = 0.
Decision no_storage_step(const StorageState& state, double delta, double price,
                         const CostSpec& cost, const StorageParams& storage,
                         const InflowSet& inflow);

struct ClairvoyantGrids {
  int s_points = 401;
  int u_points = 201;
};

// Full-hindsight plan for a realized (delta, price) trace via backward
// induction on a level grid with linear value interpolation, then a forward
// rollout tracking the exact (ungridded) level.  Decision::objective holds
// the realized stage cost.
std::vector<Decision> clairvoyant_plan(std::span<const std::pair<double, double>> trace,
                                       double s1, const CostSpec& cost,
                                       const StorageParams& storage, const InflowSet& inflow,
                                       const ClairvoyantGrids& grids = {});

}  // namespace omg
