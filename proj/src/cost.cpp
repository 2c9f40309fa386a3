#include "omg/cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omg {

void validate_support(const SupportBounds& b) {
  if (!(b.delta_min <= b.delta_max) || !(b.price_min <= b.price_max)) {
    std::ostringstream os;
    os << "support intervals empty: delta [" << b.delta_min << ", " << b.delta_max << "], price ["
       << b.price_min << ", " << b.price_max << "]";
    fail(Errc::config_error, os.str());
  }
}

bool is_day_step(long t, int steps_per_hour) {
  long hour = ((t - 1) / steps_per_hour) % 24;
  return hour >= 7 && hour < 19;
}

PenaltySchedule PenaltySchedule::constant(double v) {
  PenaltySchedule s;
  s.kind_ = Kind::constant;
  s.day_ = s.night_ = v;
  return s;
}

PenaltySchedule PenaltySchedule::day_night(double day, double night, int steps_per_hour) {
  PenaltySchedule s;
  s.kind_ = Kind::day_night;
  s.day_ = day;
  s.night_ = night;
  s.steps_per_hour_ = steps_per_hour;
  return s;
}

PenaltySchedule PenaltySchedule::series(std::vector<double> values) {
  PenaltySchedule s;
  s.kind_ = Kind::series;
  s.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  return s;
}

PenaltySchedule PenaltySchedule::from_trace() {
  PenaltySchedule s;
  s.kind_ = Kind::from_trace;
  return s;
}

double PenaltySchedule::at(long t) const {
  switch (kind_) {
    case Kind::constant:
      return day_;
    case Kind::day_night:
      return is_day_step(t, steps_per_hour_) ? day_ : night_;
    case Kind::series: {
      auto idx = static_cast<size_t>(t - 1);
      if (idx >= values_->size())
        fail(Errc::config_error, "penalty series shorter than simulation horizon");
      return (*values_)[idx];
    }
    case Kind::from_trace:
      fail(Errc::config_error, "penalty schedule not resolved against a trace");
  }
  return 0.0;
}

double PenaltySchedule::max_value() const {
  switch (kind_) {
    case Kind::constant:
    case Kind::day_night:
      return std::max(day_, night_);
    case Kind::series:
      return values_->empty() ? 0.0 : *std::max_element(values_->begin(), values_->end());
    case Kind::from_trace:
      fail(Errc::config_error, "penalty schedule not resolved against a trace");
  }
  return 0.0;
}

void PenaltySchedule::validate() const {
  if (kind_ == Kind::from_trace) return;  // checked again once resolved
  double lo = 0.0;
  switch (kind_) {
    case Kind::constant:
    case Kind::day_night:
      lo = std::min(day_, night_);
      break;
    case Kind::series:
      lo = values_->empty() ? 0.0 : *std::min_element(values_->begin(), values_->end());
      break;
    default:
      break;
  }
  if (lo < 0.0) fail(Errc::config_error, "penalty rates must be nonnegative");
  if (kind_ == Kind::day_night && steps_per_hour_ < 1)
    fail(Errc::config_error, "steps_per_hour must be >= 1");
}

CostSpec CostSpec::arbitrage() {
  CostSpec c;
  c.family = CostFamily::arbitrage;
  return c;
}

CostSpec CostSpec::balancing(double q_plus, double q_minus) {
  CostSpec c;
  c.family = CostFamily::balancing;
  c.q_plus = PenaltySchedule::constant(q_plus);
  c.q_minus = PenaltySchedule::constant(q_minus);
  return c;
}

CostSpec CostSpec::balancing_schedules(PenaltySchedule q_plus, PenaltySchedule q_minus) {
  CostSpec c;
  c.family = CostFamily::balancing;
  c.q_plus = std::move(q_plus);
  c.q_minus = std::move(q_minus);
  return c;
}

CostSpec CostSpec::colocated() {
  CostSpec c;
  c.family = CostFamily::colocated;
  return c;
}

CostSpec CostSpec::day_night_deficit(double day_multiplier, double base_rate, int steps_per_hour) {
  CostSpec c;
  c.family = CostFamily::day_night_deficit;
  c.day_multiplier = day_multiplier;
  c.base_rate = base_rate;
  c.steps_per_hour = steps_per_hour;
  return c;
}

CostSpec CostSpec::custom_cost(CustomCost cost) {
  CostSpec c;
  c.family = CostFamily::custom;
  c.custom = std::make_shared<const CustomCost>(std::move(cost));
  return c;
}

bool CostSpec::uses_price() const {
  return family == CostFamily::arbitrage || family == CostFamily::colocated ||
         family == CostFamily::custom;
}

bool CostSpec::uses_delta() const { return family != CostFamily::arbitrage; }

void validate_cost(const CostSpec& cost) {
  switch (cost.family) {
    case CostFamily::balancing:
      cost.q_plus.validate();
      cost.q_minus.validate();
      break;
    case CostFamily::day_night_deficit:
      if (cost.day_multiplier < 0.0 || cost.base_rate < 0.0)
        fail(Errc::config_error, "day/night rates must be nonnegative");
      if (cost.steps_per_hour < 1) fail(Errc::config_error, "steps_per_hour must be >= 1");
      break;
    case CostFamily::custom:
      if (!cost.custom || !cost.custom->evaluate)
        fail(Errc::config_error, "custom cost missing evaluate function");
      break;
    default:
      break;
  }
}

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }
double neg(double x) { return x < 0.0 ? -x : 0.0; }

double day_night_rate(const CostSpec& c, long t) {
  return c.base_rate * (is_day_step(t, c.steps_per_hour) ? c.day_multiplier : 1.0);
}

// One-sided derivatives of the conversion h at u.
double h_left(double u, const StorageParams& p) { return u > 0.0 ? 1.0 / p.mu_c : p.mu_d; }
double h_right(double u, const StorageParams& p) { return u >= 0.0 ? 1.0 / p.mu_c : p.mu_d; }

}  // namespace

double evaluate(const CostSpec& cost, double u, double f, double delta, double price, long t,
                const StorageParams& storage) {
  switch (cost.family) {
    case CostFamily::arbitrage:
      return price * convert(u, storage);
    case CostFamily::balancing: {
      double r = residual_imbalance(delta, u, f, storage);
      return cost.q_plus.at(t) * pos(r) + cost.q_minus.at(t) * neg(r);
    }
    case CostFamily::colocated:
      return price * neg(residual_imbalance(delta, u, f, storage));
    case CostFamily::day_night_deficit:
      return day_night_rate(cost, t) * neg(residual_imbalance(delta, u, f, storage));
    case CostFamily::custom:
      return cost.custom->evaluate(u, f, delta, price, t);
  }
  return 0.0;
}

SubgradientBounds subgradient_interval(const CostSpec& cost, double u, double f, double delta,
                                       double price, long t, const StorageParams& storage) {
  // g(u) = phi(r(u)) with r decreasing in u flips left/right derivatives:
  //   g'-(u) = -phi'+(r) * h'-(u),   g'+(u) = -phi'-(r) * h'+(u).
  auto from_phi = [&](double phi_left, double phi_right) {
    double g_left = -phi_right * h_left(u, storage);
    double g_right = -phi_left * h_right(u, storage);
    return SubgradientBounds{std::min(g_left, g_right), std::max(g_left, g_right)};
  };
  switch (cost.family) {
    case CostFamily::arbitrage: {
      double a = price * h_left(u, storage);
      double b = price * h_right(u, storage);
      return {std::min(a, b), std::max(a, b)};
    }
    case CostFamily::balancing: {
      double r = residual_imbalance(delta, u, f, storage);
      double qp = cost.q_plus.at(t), qm = cost.q_minus.at(t);
      double phi_left = r <= 0.0 ? -qm : qp;
      double phi_right = r < 0.0 ? -qm : qp;
      return from_phi(phi_left, phi_right);
    }
    case CostFamily::colocated:
    case CostFamily::day_night_deficit: {
      double r = residual_imbalance(delta, u, f, storage);
      double c = cost.family == CostFamily::colocated ? price : day_night_rate(cost, t);
      double phi_left = r <= 0.0 ? -c : 0.0;
      double phi_right = r < 0.0 ? -c : 0.0;
      return from_phi(phi_left, phi_right);
    }
    case CostFamily::custom: {
      if (!cost.custom->subgradient)
        fail(Errc::unbounded_subgradient, "custom cost has no subgradient function");
      return cost.custom->subgradient(u, f, delta, price, t);
    }
  }
  return {};
}

SubgradientBounds global_subgradient_bounds(const CostSpec& cost, const SupportBounds& support,
                                            const StorageParams& storage) {
  validate_support(support);
  validate_cost(cost);
  const bool lossy = storage.mu_c < 1.0 || storage.mu_d < 1.0;
  const double h_hi = 1.0 / storage.mu_c;  // largest conversion slope
  const double h_lo = storage.mu_d;
  switch (cost.family) {
    case CostFamily::arbitrage: {
      if (lossy && support.price_min < 0.0)
        fail(Errc::non_convex_cost,
             "arbitrage with conversion losses requires nonnegative prices");
      double corners[] = {support.price_min * h_lo, support.price_min * h_hi,
                          support.price_max * h_lo, support.price_max * h_hi};
      return {*std::min_element(std::begin(corners), std::end(corners)),
              *std::max_element(std::begin(corners), std::end(corners))};
    }
    case CostFamily::balancing: {
      double qp = cost.q_plus.max_value();
      double qm = cost.q_minus.max_value();
      if (lossy && qp > 0.0)
        fail(Errc::non_convex_cost,
             "balancing surplus penalty with conversion losses is non-convex in u");
      return {-qp * h_hi, qm * h_hi};
    }
    case CostFamily::colocated: {
      if (support.price_min < 0.0)
        fail(Errc::non_convex_cost, "co-located cost requires nonnegative prices");
      return {0.0, support.price_max * h_hi};
    }
    case CostFamily::day_night_deficit: {
      double rate = cost.base_rate * std::max(1.0, cost.day_multiplier);
      return {0.0, rate * h_hi};
    }
    case CostFamily::custom: {
      if (!cost.custom->has_bounds)
        fail(Errc::unbounded_subgradient,
             "custom cost needs explicit subgradient bounds for tuning");
      return cost.custom->bounds;
    }
  }
  return {};
}

}  // namespace omg
