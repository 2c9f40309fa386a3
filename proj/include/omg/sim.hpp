#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omg/policy.hpp"

namespace omg {

struct PolicySpec {
  enum class Type { omg, greedy, no_storage, clairvoyant };
  Type type = Type::greedy;
  // omg only: "maxw" / "mins", or explicit gamma and w.
  std::string method = "maxw";
  std::optional<double> gamma;
  std::optional<double> w;
  bool enforce_level_constraint = false;
  // clairvoyant only
  ClairvoyantGrids grids{};

  std::string label() const;
};

struct ProcessSpec {
  enum class Type { iid, markov, trace };
  Type type = Type::iid;
  IidSpec iid{};
  MarkovChain markov{};
  Trace trace{};
  // Explicit override; otherwise derived where possible (markov emissions,
  // trace data, bounded iid marginals).
  std::optional<SupportBounds> support;
};

// Disturbance supports used for tuning and truncation.  Throws
// Errc::config_error when they cannot be derived (e.g. Laplace marginal with
// no explicit bounds) or when fixed emissions/records fall outside explicit
// bounds.
SupportBounds resolve_support(const ProcessSpec& process);

struct SimConfig {
  StorageParams storage{};
  CostSpec cost{};
  InflowSet inflow{};
  ProcessSpec process{};
  std::vector<PolicySpec> policies;
  long t_steps = 0;  // 0 = whole trace (trace process only)
  double s1 = 0.0;
  uint64_t seed = 0;
  int replications = 1;
  double imbalance_sign = 1.0;  // -1 flips delta on ingestion
  bool keep_trajectories = true;
};

struct TrajectoryPoint {
  long t;
  double s, u, f, delta, price, g;
};

struct PolicyResult {
  std::string name;
  uint64_t seed = 0;
  std::vector<double> rep_costs;  // time-averaged cost per replication; NaN = aborted
  double mean_cost = 0.0;
  double se = 0.0;  // sample SE of the mean across replications
  long violations = 0;
  std::optional<OmgParams> omg_params;
  std::optional<VosEstimate> vos;  // filled when a no-storage baseline ran
  std::vector<TrajectoryPoint> trajectory;  // replication 0, when kept
};

struct SimResult {
  uint64_t seed = 0;
  int replications = 0;
  long t_steps = 0;
  std::vector<PolicyResult> policies;
};

// Runs every policy on identical per-replication disturbance draws
// (stream = replication index), in parallel across replications (capped by
// the OMG_THREADS environment variable).  Output is bit-identical for any
// thread count.
SimResult run(const SimConfig& config);

struct PairwiseComparison {
  std::string a, b;
  double mean_delta = 0.0;  // mean of J_a - J_b over paired replications
  double se_delta = 0.0;
  long a_wins = 0, b_wins = 0, ties = 0;
  double sign_test_p = 0.0;  // one-sided: P(wins >= a_wins) under fair coin
};

struct Comparison {
  std::vector<std::string> ranking;  // by mean cost, best first
  std::vector<PairwiseComparison> pairs;
};

Comparison compare(const SimResult& result);
// Same, for results possibly collected from separate runs; throws
// Errc::mismatched_seeds when seeds or replication counts differ.
Comparison compare(const std::vector<PolicyResult>& results);

// Exact one-sided binomial tail P(X >= k), X ~ Binomial(n, 1/2).
double binomial_tail_p(long n, long k);

}  // namespace omg
