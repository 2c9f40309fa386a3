#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "omg/storage.hpp"

namespace omg {

// Closed ranges the exogenous disturbances live in.  Samplers truncate to
// these; subgradient bounds are taken over them.
struct SupportBounds {
  double delta_min = 0.0;
  double delta_max = 0.0;
  double price_min = 0.0;
  double price_max = 0.0;
};

void validate_support(const SupportBounds& b);

// Closed interval of stage-cost subgradients in u over the whole domain.
struct SubgradientBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Day window for time-of-day rates: hour in [7, 19), where
// hour = ((t - 1) / steps_per_hour) % 24 and t is 1-based.
bool is_day_step(long t, int steps_per_hour);

// Per-step penalty rate: a constant, a day/night pair, or a per-step series
// (e.g. taken from trace columns).
class PenaltySchedule {
 public:
  enum class Kind { constant, day_night, series, from_trace };

  static PenaltySchedule constant(double v);
  static PenaltySchedule day_night(double day, double night, int steps_per_hour);
  static PenaltySchedule series(std::vector<double> values);
  // Placeholder resolved against trace columns when the simulation is set up.
  static PenaltySchedule from_trace();

  double at(long t) const;
  double max_value() const;
  Kind kind() const { return kind_; }
  double day() const { return day_; }
  double night() const { return night_; }
  int steps_per_hour() const { return steps_per_hour_; }
  const std::vector<double>& values() const { return *values_; }
  void validate() const;  // rates must be >= 0 and resolved

 private:
  Kind kind_ = Kind::constant;
  double day_ = 0.0;
  double night_ = 0.0;
  int steps_per_hour_ = 1;
  std::shared_ptr<const std::vector<double>> values_;
};

// Extension point for caller-supplied convex stage costs.  Subgradient bounds
// cannot be inferred, so they must be provided for tuning to work.
struct CustomCost {
  std::function<double(double u, double f, double delta, double price, long t)> evaluate;
  std::function<SubgradientBounds(double u, double f, double delta, double price, long t)>
      subgradient;
  bool has_bounds = false;
  SubgradientBounds bounds{};
};

enum class CostFamily { arbitrage, balancing, colocated, day_night_deficit, custom };

// Stage cost g(u, f; delta, price, t).  All built-in families are piecewise
// linear in u for fixed disturbances:
//   arbitrage:          price * h(u)
//   balancing:          q_plus(t)*[r]+ + q_minus(t)*[r]-   with r = delta - h(u) + f
//   colocated:          price * [r]-
//   day_night_deficit:  base * (day_multiplier if day else 1) * [r]-
// where [x]+ = max(x,0), [x]- = max(-x,0).
struct CostSpec {
  CostFamily family = CostFamily::balancing;
  PenaltySchedule q_plus = PenaltySchedule::constant(1.0);
  PenaltySchedule q_minus = PenaltySchedule::constant(1.0);
  double day_multiplier = 3.0;
  double base_rate = 1.0;
  int steps_per_hour = 1;
  std::shared_ptr<const CustomCost> custom;

  static CostSpec arbitrage();
  static CostSpec balancing(double q_plus, double q_minus);
  static CostSpec balancing_schedules(PenaltySchedule q_plus, PenaltySchedule q_minus);
  static CostSpec colocated();
  static CostSpec day_night_deficit(double day_multiplier, double base_rate, int steps_per_hour);
  static CostSpec custom_cost(CustomCost cost);

  // True when the cost reads the price / residual imbalance at all.
  bool uses_price() const;
  bool uses_delta() const;
};

void validate_cost(const CostSpec& cost);

double evaluate(const CostSpec& cost, double u, double f, double delta, double price, long t,
                const StorageParams& storage);

// [left derivative, right derivative] of g in u at the given point, ordered.
SubgradientBounds subgradient_interval(const CostSpec& cost, double u, double f, double delta,
                                       double price, long t, const StorageParams& storage);

// Bounds over u in [u_min,u_max], all in-support disturbances and all t.
// Throws Errc::unbounded_subgradient for custom costs without bounds and
// Errc::non_convex_cost for parameter combinations that break convexity in u
// (two-sided balancing with conversion losses; negative prices where the
// family needs price >= 0).
SubgradientBounds global_subgradient_bounds(const CostSpec& cost, const SupportBounds& support,
                                            const StorageParams& storage);

}  // namespace omg
