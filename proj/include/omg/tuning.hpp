#pragma once

#include <optional>
#include <string>

#include "omg/process.hpp"

namespace omg {

// Admissible bias interval [lo, hi] for a fixed weight.
struct KappaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Offline-tuned controller parameters plus the certified per-step
// sub-optimality bound that comes with them.
struct OmgParams {
  double gamma = 0.0;
  double w = 1.0;
  SubgradientBounds bounds{};
  double certified_bound = 0.0;
  std::string method;  // "maxw", "mins", or "explicit"
};

// [lo, hi] = [(-W*d_lo + u_max - s_max)/lambda, (-W*d_hi - s_min + u_min)/lambda].
// Throws Errc::empty_interval when lo > hi (weight too large) and
// Errc::config_error for w <= 0.
KappaInterval kappa_interval(const StorageParams& p, const SubgradientBounds& d, double w);

// Largest weight with a nonempty bias interval:
// ((s_max - s_min) - (u_max - u_min)) / (d_hi - d_lo).
// Throws Errc::degenerate_slope when d_hi == d_lo.
double w_max(const StorageParams& p, const SubgradientBounds& d);

// Per-step gap bound M(gamma)/w from the drift argument:
// M = 1/2 * max((u_min + (1-lambda)g)^2, (u_max + (1-lambda)g)^2)
//     + lambda*(1-lambda) * max((s_min+g)^2, (s_max+g)^2).
double subopt_bound(const StorageParams& p, double gamma, double w);

// Picks w = w_max, where the bias interval collapses to a point.
OmgParams tune_max_weight(const StorageParams& p, const SubgradientBounds& d);

struct TuneOptions {
  int w_grid_points = 4096;      // log-spaced outer grid
  double w_floor_factor = 1e-9;  // smallest weight searched, relative to w_max
  double w_ceiling = 0.0;        // cap used when d_hi == d_lo; 0 = auto
};

// Minimizes M(gamma)/w jointly: exact piecewise-quadratic minimization in
// gamma for each w on a log grid, then golden-section refinement in w.  At
// lambda == 1 the bound is gamma-free and decreasing in w, so this returns
// tune_max_weight's point exactly.  Throws Errc::numerical_failure if the
// refined value somehow exceeds the grid minimum.
OmgParams tune_min_bound(const StorageParams& p, const SubgradientBounds& d,
                         const TuneOptions& opts = {});

// First/second moments of the inter-return time and E[lambda^dt] for an
// epoch-based bound; (1, 1, lambda) recovers the IID-step bound.
struct EpochStats {
  double mean_dt = 1.0;
  double mean_dt2 = 1.0;
  double mean_lambda_dt = 1.0;
};

// Exact first-passage statistics of returns to return_state, via dense linear
// solves on the chain restricted away from the return state.
EpochStats markov_epoch_stats(const MarkovChain& chain, int return_state, double lambda);

// Monte-Carlo estimate of the same quantities (cross-validation tool).
EpochStats markov_epoch_stats_mc(const MarkovChain& chain, int return_state, double lambda,
                                 long epochs, uint64_t seed);

// Epoch-weighted gap bound:
// (E[dt^2]/E[dt]) * M_u(gamma) + lambda*(1 - E[lambda^dt])/E[dt] * M_b(gamma),
// all divided by w.
double markov_bound(const StorageParams& p, double gamma, double w, const EpochStats& stats);

// [J_ns - J_omg, J_ns - J_omg + bound] brackets the value of storage;
// pct_upper = hi / J_ns when the baseline cost is nonzero.
struct VosEstimate {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> pct_upper;
};

VosEstimate vos_interval(double j_no_storage, double j_omg, double bound);
// Throws Errc::zero_baseline when j_no_storage == 0.
double vos_pct_upper(double j_no_storage, double j_omg, double bound);

}  // namespace omg
