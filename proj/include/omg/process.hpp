#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omg/cost.hpp"
#include "omg/rng.hpp"

namespace omg {

// Scalar sampling distribution.  Samples are clipped to the support bounds by
// the callers, which keeps the subgradient-bound guarantees honest even for
// the unbounded Laplace.
struct Dist {
  enum class Kind { laplace, uniform, point_mass, empirical };
  Kind kind = Kind::point_mass;
  double a = 0.0;  // laplace: mean, uniform: lo, point_mass: value
  double b = 0.0;  // laplace: sigma (std dev), uniform: hi
  std::vector<double> samples;

  static Dist laplace(double mean, double sigma);
  static Dist uniform(double lo, double hi);
  static Dist point_mass(double value);
  static Dist empirical(std::vector<double> samples);

  void validate() const;
  double sample(CounterRng& rng) const;
  // Natural support of the distribution itself, when finite.
  std::optional<std::pair<double, double>> natural_range() const;
};

// IID (delta, price) pairs: either independent marginals or a joint empirical
// list of pairs (for correlated draws).
struct IidSpec {
  Dist delta;
  Dist price;
  std::vector<std::pair<double, double>> joint;
  bool use_joint = false;
  SupportBounds support{};

  void validate() const;
};

// Draws one (delta, price) pair, truncated to the support bounds.
std::pair<double, double> sample_iid(const IidSpec& spec, CounterRng& rng);

// Finite-state chain with per-state (delta, price) emissions.
struct MarkovChain {
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<std::pair<double, double>> emissions;
  int initial = 0;

  int size() const { return static_cast<int>(transition.size()); }
  // Throws Errc::config_error for shape/stochasticity problems and
  // Errc::not_irreducible when some state cannot reach some other state.
  void validate() const;
  SupportBounds derived_support() const;
};

// Samples the successor state using the inverse CDF of the current row.
int markov_next(const MarkovChain& chain, int state, CounterRng& rng);

// Recorded disturbance trace: t must run 1,2,...,N.  Price and penalty
// columns are optional at load; their absence only matters when a cost family
// needs them, which is checked at simulation setup.
struct Trace {
  std::vector<double> delta;
  std::vector<double> price;    // empty when the column is absent
  std::vector<double> q_plus;   // empty when the columns are absent
  std::vector<double> q_minus;
  bool has_price = false;
  bool has_penalties = false;

  long length() const { return static_cast<long>(delta.size()); }
  SupportBounds derived_support() const;
};

// CSV with header `t,delta[,price][,q_plus,q_minus]`.  Errors:
// Errc::parse_error (bad number/shape, with line number), Errc::gap_error
// (skipped step index), Errc::non_monotone_time (index not increasing),
// Errc::missing_column (required header field absent).
Trace load_trace(std::istream& in);
Trace load_trace_file(const std::string& path);

}  // namespace omg
