#include "omg/storage.hpp"

#include <cmath>
#include <sstream>

namespace omg {

namespace {

[[noreturn]] void infeasible(const std::string& inequality, double lhs, double rhs) {
  std::ostringstream os;
  os << "storage violates " << inequality << " (" << lhs << " vs " << rhs << ")";
  fail(Errc::infeasible_storage, os.str());
}

}  // namespace

const StorageParams& validate_storage(const StorageParams& p) {
  if (!(p.lambda > 0.0) || !(p.lambda <= 1.0)) infeasible("0 < lambda <= 1", p.lambda, 1.0);
  if (!(p.s_min <= p.s_max)) infeasible("s_min <= s_max", p.s_min, p.s_max);
  if (!(p.u_min <= 0.0)) infeasible("u_min <= 0", p.u_min, 0.0);
  if (!(p.u_max >= 0.0)) infeasible("u_max >= 0", p.u_max, 0.0);
  if (!(p.mu_c > 0.0) || !(p.mu_c <= 1.0)) infeasible("0 < mu_c <= 1", p.mu_c, 1.0);
  if (!(p.mu_d > 0.0) || !(p.mu_d <= 1.0)) infeasible("0 < mu_d <= 1", p.mu_d, 1.0);

  // Feasibility: from any admissible level some control keeps the level
  // admissible at the next step.
  if (!(p.lambda * p.s_min + p.u_max >= p.s_min))
    infeasible("lambda*s_min + u_max >= s_min", p.lambda * p.s_min + p.u_max, p.s_min);
  if (!(p.lambda * p.s_max + p.u_min <= p.s_max))
    infeasible("lambda*s_max + u_min <= s_max", p.lambda * p.s_max + p.u_min, p.s_max);
  // Controllability: both level extremes stay reachable.
  if (!(p.lambda * p.s_max + p.u_max >= p.s_max))
    infeasible("lambda*s_max + u_max >= s_max", p.lambda * p.s_max + p.u_max, p.s_max);
  if (!(p.lambda * p.s_min + p.u_min <= p.s_min))
    infeasible("lambda*s_min + u_min <= s_min", p.lambda * p.s_min + p.u_min, p.s_min);

  // Frequent acting: the control span must not cover the level span, else the
  // admissible bias interval is empty for every positive weight.
  if (!(p.u_max - p.u_min < p.s_max - p.s_min)) {
    std::ostringstream os;
    os << "u_max - u_min = " << p.u_max - p.u_min << " must be < s_max - s_min = "
       << p.s_max - p.s_min;
    fail(Errc::non_frequent_acting, os.str());
  }
  return p;
}

double convert(double u, const StorageParams& p) {
  return u >= 0.0 ? u / p.mu_c : p.mu_d * u;
}

double residual_imbalance(double delta, double u, double f, const StorageParams& p) {
  return delta - convert(u, p) + f;
}

StorageState step(const StorageState& state, double u, const StorageParams& p) {
  if (u < p.u_min - kBoundaryTol || u > p.u_max + kBoundaryTol) {
    std::ostringstream os;
    os << "u = " << u << " outside [" << p.u_min << ", " << p.u_max << "] at t = " << state.t;
    fail(Errc::ramp_violation, os.str());
  }
  return StorageState{p.lambda * state.s + u, state.t + 1};
}

void validate_inflow(const InflowSet& f) {
  if (!(f.f_min <= f.f_max)) {
    std::ostringstream os;
    os << "inflow interval empty: [" << f.f_min << ", " << f.f_max << "]";
    fail(Errc::config_error, os.str());
  }
}

}  // namespace omg
