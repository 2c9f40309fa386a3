#include "omg/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "omg/detail/golden.hpp"

namespace omg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// u with h(u) = x: where the residual imbalance crosses zero.
double convert_inv(double x, const StorageParams& p) { return x >= 0.0 ? p.mu_c * x : x / p.mu_d; }

bool residual_family(const CostSpec& cost) {
  return cost.family == CostFamily::balancing || cost.family == CostFamily::colocated ||
         cost.family == CostFamily::day_night_deficit;
}

// Exact inner minimizer over the inflow interval for the built-in families:
// pulls the residual toward zero (deficit-type costs are flat above zero, so
// the clamp is still optimal there); arbitrage ignores f.
double best_inflow(const CostSpec& cost, double u, double delta, const InflowSet& inflow,
                   const StorageParams& p) {
  if (residual_family(cost)) return clamp(convert(u, p) - delta, inflow.f_min, inflow.f_max);
  return clamp(0.0, inflow.f_min, inflow.f_max);
}

struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

Box control_box(const StorageState& state, const StorageParams& p, bool level_constraint) {
  Box b{p.u_min, p.u_max};
  if (level_constraint) {
    b.lo = std::max(b.lo, p.s_min - p.lambda * state.s);
    b.hi = std::min(b.hi, p.s_max - p.lambda * state.s);
    if (b.lo > b.hi) {
      if (b.lo - b.hi <= kBoundaryTol) {
        b.lo = b.hi = 0.5 * (b.lo + b.hi);
      } else {
        fail(Errc::infeasible_step, "empty control interval at t = " + std::to_string(state.t));
      }
    }
  }
  return b;
}

// Stage cost with the inflow already optimized out (golden-section nesting
// for custom costs with a genuine inflow interval).
struct StageEval {
  const CostSpec& cost;
  const StorageParams& storage;
  const InflowSet& inflow;
  double delta, price;
  long t;

  double g_with_f(double u, double f) const {
    return evaluate(cost, u, f, delta, price, t, storage);
  }

  std::pair<double, double> best(double u) const {  // (g, f)
    if (cost.family != CostFamily::custom || inflow.f_min == inflow.f_max) {
      double f = best_inflow(cost, u, delta, inflow, storage);
      return {g_with_f(u, f), f};
    }
    auto by_f = [&](double f) { return g_with_f(u, f); };
    double f = detail::golden_section_min(by_f, inflow.f_min, inflow.f_max);
    double g = by_f(f);
    for (double fc : {inflow.f_min, inflow.f_max}) {
      double gc = by_f(fc);
      if (gc < g) {
        g = gc;
        f = fc;
      }
    }
    return {g, f};
  }
};

// Kinks of the piecewise-linear objective for built-in families, clipped to
// the box.  Includes the box ends.
int collect_candidates(const StageEval& ev, const InflowSet& inflow, const Box& box,
                       std::array<double, 6>& out) {
  int n = 0;
  out[n++] = box.hi;  // listed first: equal-objective ties resolve to charging
  out[n++] = box.lo;
  auto maybe = [&](double u) {
    if (u > box.lo && u < box.hi) out[n++] = u;
  };
  maybe(0.0);
  if (residual_family(ev.cost)) {
    maybe(convert_inv(ev.delta + inflow.f_min, ev.storage));
    maybe(convert_inv(ev.delta + inflow.f_max, ev.storage));
  }
  return n;
}

Decision minimize_over_box(const StageEval& ev, const InflowSet& inflow, const Box& box,
                           double linear_coeff, double w) {
  // objective F(u) = linear_coeff * u + w * min_f g(u, f)
  auto objective = [&](double u) { return linear_coeff * u + w * ev.best(u).first; };

  if (ev.cost.family == CostFamily::custom) {
    double u = detail::golden_section_min(objective, box.lo, box.hi);
    double fu = objective(u);
    for (double uc : {box.hi, box.lo, clamp(0.0, box.lo, box.hi)}) {
      double fc = objective(uc);
      if (fc < fu) {
        fu = fc;
        u = uc;
      }
    }
    auto [g, f] = ev.best(u);
    return {u, f, linear_coeff * u + w * g};
  }

  std::array<double, 6> cands{};
  int n = collect_candidates(ev, inflow, box, cands);
  double best_u = cands[0];
  double best_val = objective(cands[0]);
  for (int i = 1; i < n; ++i) {
    double v = objective(cands[i]);
    if (v < best_val) {
      best_val = v;
      best_u = cands[i];
    }
  }
  auto [g, f] = ev.best(best_u);
  return {best_u, f, best_val};
}

}  // namespace

Decision omg_step(const StorageState& state, double delta, double price, const CostSpec& cost,
                  const StorageParams& storage, const InflowSet& inflow, const OmgParams& params,
                  bool enforce_level_constraint) {
  if (!(params.w > 0.0)) fail(Errc::config_error, "weight w must be > 0");
  const double a = storage.lambda * (state.s + params.gamma);
  const Box box = control_box(state, storage, enforce_level_constraint);
  StageEval ev{cost, storage, inflow, delta, price, state.t};

  auto decide = [&](double u) {
    auto [g, f] = ev.best(u);
    return Decision{u, f, a * u + params.w * g};
  };

  // Endpoint shortcuts: when the biased level term dominates every stage-cost
  // slope, the objective is monotone over the whole box.
  if (a + params.w * params.bounds.lo >= 0.0) return decide(box.lo);
  if (a + params.w * params.bounds.hi <= 0.0) return decide(box.hi);

  const bool ideal = storage.mu_c == 1.0 && storage.mu_d == 1.0;
  if (cost.family == CostFamily::arbitrage && ideal) {
    double slope = a + params.w * price;
    return decide(slope > 0.0 ? box.lo : box.hi);
  }
  if (cost.family == CostFamily::balancing && ideal && inflow.f_min == inflow.f_max) {
    double qp = cost.q_plus.at(state.t), qm = cost.q_minus.at(state.t);
    if (a >= params.w * qp) return decide(box.lo);
    if (a <= -params.w * qm) return decide(box.hi);
    return decide(clamp(delta + inflow.f_min, box.lo, box.hi));
  }
  return minimize_over_box(ev, inflow, box, a, params.w);
}

Decision greedy_step(const StorageState& state, double delta, double price, const CostSpec& cost,
                     const StorageParams& storage, const InflowSet& inflow) {
  const Box box = control_box(state, storage, true);
  StageEval ev{cost, storage, inflow, delta, price, state.t};

  if (cost.family == CostFamily::custom) return minimize_over_box(ev, inflow, box, 0.0, 1.0);

  std::array<double, 6> cands{};
  int n = collect_candidates(ev, inflow, box, cands);
  // Smallest |u| wins ties; between +u and -u prefer charging.
  std::sort(cands.begin(), cands.begin() + n, [](double x, double y) {
    return std::abs(x) != std::abs(y) ? std::abs(x) < std::abs(y) : x > y;
  });
  double best_u = cands[0];
  double best_g = ev.best(cands[0]).first;
  for (int i = 1; i < n; ++i) {
    double g = ev.best(cands[i]).first;
    if (g < best_g) {
      best_g = g;
      best_u = cands[i];
    }
  }
  auto [g, f] = ev.best(best_u);
  return {best_u, f, g};
}

Decision no_storage_step(const StorageState& state, double delta, double price,
                         const CostSpec& cost, const StorageParams& storage,
                         const InflowSet& inflow) {
  StageEval ev{cost, storage, inflow, delta, price, state.t};
  auto [g, f] = ev.best(0.0);
  return {0.0, f, g};
}

std::vector<Decision> clairvoyant_plan(std::span<const std::pair<double, double>> trace,
                                       double s1, const CostSpec& cost,
                                       const StorageParams& storage, const InflowSet& inflow,
                                       const ClairvoyantGrids& grids) {
  validate_storage(storage);
  validate_inflow(inflow);
  const long T = static_cast<long>(trace.size());
  if (T == 0) return {};
  if (s1 < storage.s_min - kBoundaryTol || s1 > storage.s_max + kBoundaryTol)
    fail(Errc::config_error, "initial level outside the admissible range");
  s1 = clamp(s1, storage.s_min, storage.s_max);

  const int ns = std::max(2, grids.s_points);
  const int nu = std::max(2, grids.u_points);
  const double ds = (storage.s_max - storage.s_min) / (ns - 1);
  const double inv_ds = 1.0 / ds;

  std::vector<std::vector<double>> value(static_cast<size_t>(T) + 1,
                                         std::vector<double>(static_cast<size_t>(ns), 0.0));

  auto interp = [&](const std::vector<double>& row, double s) {
    double pos = (clamp(s, storage.s_min, storage.s_max) - storage.s_min) * inv_ds;
    int i = std::min(static_cast<int>(pos), ns - 2);
    double frac = pos - i;
    return row[static_cast<size_t>(i)] * (1.0 - frac) + row[static_cast<size_t>(i) + 1] * frac;
  };

  // Candidate controls shared by every level at a given step: the u grid plus
  // the stage-cost kinks.  Stage costs are level-free, so compute them once.
  std::vector<double> cand_u(static_cast<size_t>(nu) + 3);
  std::vector<double> cand_g(cand_u.size());
  const double du = (storage.u_max - storage.u_min) / (nu - 1);

  auto fill_candidates = [&](long t, double delta, double price) {
    StageEval ev{cost, storage, inflow, delta, price, t};
    size_t n = 0;
    for (int i = 0; i < nu; ++i) cand_u[n++] = storage.u_min + du * i;
    cand_u[n++] = 0.0;
    if (residual_family(cost)) {
      cand_u[n++] = convert_inv(delta + inflow.f_min, storage);
      cand_u[n++] = convert_inv(delta + inflow.f_max, storage);
    }
    for (size_t i = 0; i < n; ++i)
      cand_g[i] = (cand_u[i] >= storage.u_min && cand_u[i] <= storage.u_max)
                      ? ev.best(cand_u[i]).first
                      : kInf;
    return n;
  };

  // Minimum of stage + future value from level s at step index ti (0-based).
  auto best_from = [&](double s, long ti, size_t n_cands, const StageEval& ev, double* out_u) {
    const std::vector<double>& next = value[static_cast<size_t>(ti) + 1];
    Box box{std::max(storage.u_min, storage.s_min - storage.lambda * s),
            std::min(storage.u_max, storage.s_max - storage.lambda * s)};
    if (box.lo > box.hi) box.lo = box.hi = 0.5 * (box.lo + box.hi);
    double base = storage.lambda * s;
    double best = kInf, best_u = box.lo;
    for (size_t i = 0; i < n_cands; ++i) {
      double u = cand_u[i];
      if (u < box.lo || u > box.hi) continue;
      double v = cand_g[i] + interp(next, base + u);
      if (v < best) {
        best = v;
        best_u = u;
      }
    }
    for (double u : {box.lo, box.hi}) {
      double v = ev.best(u).first + interp(next, base + u);
      if (v < best) {
        best = v;
        best_u = u;
      }
    }
    if (out_u) *out_u = best_u;
    return best;
  };

  for (long ti = T - 1; ti >= 0; --ti) {
    auto [delta, price] = trace[static_cast<size_t>(ti)];
    StageEval ev{cost, storage, inflow, delta, price, ti + 1};
    size_t n_cands = fill_candidates(ti + 1, delta, price);
    auto& row = value[static_cast<size_t>(ti)];
    for (int i = 0; i < ns; ++i)
      row[static_cast<size_t>(i)] = best_from(storage.s_min + ds * i, ti, n_cands, ev, nullptr);
  }

  std::vector<Decision> plan;
  plan.reserve(static_cast<size_t>(T));
  double s = s1;
  for (long ti = 0; ti < T; ++ti) {
    auto [delta, price] = trace[static_cast<size_t>(ti)];
    StageEval ev{cost, storage, inflow, delta, price, ti + 1};
    size_t n_cands = fill_candidates(ti + 1, delta, price);
    double u = 0.0;
    best_from(s, ti, n_cands, ev, &u);
    auto [g, f] = ev.best(u);
    plan.push_back({u, f, g});
    s = storage.lambda * s + u;
  }
  return plan;
}

}  // namespace omg
