// Acceptance gate: end-to-end checks with independent oracles, one PASS/FAIL
// line each, exit 0 only when every check passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "omg/config.hpp"
#include "omg/policy.hpp"
#include "omg/presets.hpp"
#include "omg/sim.hpp"
#include "omg/tuning.hpp"

using namespace omg;

namespace {

double unif(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_unit(); }

double sq(double x) { return x * x; }

// Rejection-samples a parameter set that passes validation (leak + asymmetric
// ramp limits can break controllability; retry until they don't).
StorageParams random_storage(CounterRng& rng, double lambda_lo, double lambda_hi) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    double range = unif(rng, 1.0, 10.0);
    StorageParams p;
    p.s_min = -range * unif(rng, 0.3, 0.7);
    p.s_max = p.s_min + range;
    p.u_max = range * unif(rng, 0.05, 0.45);
    p.u_min = -range * unif(rng, 0.05, 0.45);
    p.lambda = unif(rng, lambda_lo, lambda_hi);
    p.mu_c = unif(rng, 0.7, 1.0);
    p.mu_d = unif(rng, 0.7, 1.0);
    try {
      validate_storage(p);
      return p;
    } catch (const Error&) {
    }
  }
  return StorageParams{0.97, 0.0, 100.0, -10.0, 10.0, 1.0, 1.0};
}

// Stage cost written out from scratch so library decisions are judged against
// an implementation that shares no code with them.
struct OracleCost {
  int family = 0;  // 0 arbitrage, 1 balancing, 2 colocated, 3 day/night deficit
  double q_plus = 0.0, q_minus = 0.0;
  double day_mult = 3.0, base_rate = 1.0;
  int steps_per_hour = 1;
};

double oracle_h(double u, const StorageParams& p) { return u >= 0.0 ? u / p.mu_c : p.mu_d * u; }

double oracle_hinv(double x, const StorageParams& p) { return x >= 0.0 ? p.mu_c * x : x / p.mu_d; }

double oracle_g(const OracleCost& c, const StorageParams& p, double u, double f, double delta,
                double price, long t) {
  double r = delta - oracle_h(u, p) + f;
  switch (c.family) {
    case 0: return price * oracle_h(u, p);
    case 1: return c.q_plus * std::max(r, 0.0) + c.q_minus * std::max(-r, 0.0);
    case 2: return price * std::max(-r, 0.0);
    default: {
      long hour = ((t - 1) / c.steps_per_hour) % 24;
      double rate = c.base_rate * (hour >= 7 && hour < 19 ? c.day_mult : 1.0);
      return rate * std::max(-r, 0.0);
    }
  }
}

// Random parameters per family, nudging the storage where a combination would
// be non-convex (two-sided balancing penalties need lossless conversion).
OracleCost random_cost(CounterRng& rng, int family, StorageParams& p) {
  OracleCost c;
  c.family = family;
  if (family == 1) {
    c.q_minus = unif(rng, 0.1, 4.0);
    if (rng.next_unit() < 0.5) {
      c.q_plus = 0.0;
    } else {
      c.q_plus = unif(rng, 0.1, 4.0);
      p.mu_c = p.mu_d = 1.0;
    }
  } else if (family == 3) {
    c.day_mult = unif(rng, 1.0, 5.0);
    c.base_rate = unif(rng, 0.1, 3.0);
    c.steps_per_hour = 1 + static_cast<int>(rng.next_u64() % 4);
  }
  return c;
}

CostSpec lib_cost(const OracleCost& c) {
  switch (c.family) {
    case 0: return CostSpec::arbitrage();
    case 1: return CostSpec::balancing(c.q_plus, c.q_minus);
    case 2: return CostSpec::colocated();
    default: return CostSpec::day_night_deficit(c.day_mult, c.base_rate, c.steps_per_hour);
  }
}

SupportBounds random_support(CounterRng& rng) {
  return SupportBounds{-unif(rng, 0.1, 2.0), unif(rng, 0.1, 2.0), 0.1, 5.0};
}

int g_failures = 0;

void run_check(int idx, const char* name, const std::function<bool(std::string&)>& body) {
  auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s  %d. %-58s %6.1fs%s%s\n", pass ? "PASS" : "FAIL", idx, name, secs,
              detail.empty() ? "" : "  -- ", detail.c_str());
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------

bool check_feasibility(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  for (int k = 0; k < 1000; ++k) {
    CounterRng rng(9000 + k, 0);
    StorageParams p = random_storage(rng, 0.90, 0.9999);
    OracleCost oc = random_cost(rng, k % 4, p);
    CostSpec cost = lib_cost(oc);
    SupportBounds support = random_support(rng);
    InflowSet inflow{};
    if (k % 2) inflow.f_max = unif(rng, 0.0, 0.5);
    SubgradientBounds d = global_subgradient_bounds(cost, support, p);
    OmgParams params = (k % 3 == 0) ? tune_max_weight(p, d) : tune_min_bound(p, d);
    double s = unif(rng, p.s_min, p.s_max);
    for (long t = 1; t <= 500; ++t) {
      double delta = unif(rng, support.delta_min, support.delta_max);
      double price = unif(rng, support.price_min, support.price_max);
      Decision dec = omg_step({s, t}, delta, price, cost, p, inflow, params);
      s = p.lambda * s + dec.u;
      if (s < p.s_min - 1e-9 || s > p.s_max + 1e-9) {
        std::ostringstream os;
        os << "config " << k << ": s = " << s << " outside [" << p.s_min << ", " << p.s_max
           << "] at t = " << t;
        detail = os.str();
        return false;
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 60.0) {
    detail = "runtime budget exceeded (60 s)";
    return false;
  }
  return true;
}

bool check_lossless_closed_form(std::string& detail) {
  for (int k = 0; k < 1000; ++k) {
    CounterRng rng(20000 + k, 0);
    double range = unif(rng, 1.0, 10.0);
    StorageParams p;
    p.s_min = -range * unif(rng, 0.3, 0.7);
    p.s_max = p.s_min + range;
    p.u_max = range * unif(rng, 0.05, 0.45);
    p.u_min = -p.u_max;
    validate_storage(p);
    SubgradientBounds d{-unif(rng, 0.2, 3.0), unif(rng, 0.2, 3.0)};
    double rho = (p.s_max - p.s_min) / (p.u_max - p.u_min);
    double closed = (d.hi - d.lo) * p.u_max / (4.0 * (rho - 1.0));
    double bound = tune_max_weight(p, d).certified_bound;
    if (std::fabs(bound - closed) > 1e-12 * closed) {
      std::ostringstream os;
      os << "config " << k << ": bound " << bound << " vs closed form " << closed;
      detail = os.str();
      return false;
    }
  }
  StorageParams p{1.0, 0.0, 100.0, -10.0, 10.0, 1.0, 1.0};
  double worked = tune_max_weight(p, {-1.0, 1.0}).certified_bound;
  if (std::fabs(worked - 1.25) > 1e-12) {
    detail = "worked example: expected 1.25, got " + std::to_string(worked);
    return false;
  }
  return true;
}

bool check_tuner_vs_grid(std::string& detail) {
  for (int k = 0; k < 50; ++k) {
    CounterRng rng(30000 + k, 0);
    StorageParams p = random_storage(rng, 0.90, 0.995);
    SubgradientBounds d{-unif(rng, 0.2, 3.0), unif(rng, 0.2, 3.0)};
    double wm = ((p.s_max - p.s_min) - (p.u_max - p.u_min)) / (d.hi - d.lo);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2000; ++i) {
      double w = wm * i / 2000.0;
      double klo = (-w * d.lo + p.u_max - p.s_max) / p.lambda;
      double khi = (-w * d.hi - p.s_min + p.u_min) / p.lambda;
      if (klo > khi) continue;
      for (int j = 0; j < 2000; ++j) {
        double gam = klo + (khi - klo) * j / 1999.0;
        double m = 0.5 * std::max(sq(p.u_min + (1.0 - p.lambda) * gam),
                                  sq(p.u_max + (1.0 - p.lambda) * gam)) +
                   p.lambda * (1.0 - p.lambda) * std::max(sq(p.s_min + gam), sq(p.s_max + gam));
        grid_best = std::min(grid_best, m / w);
      }
    }
    OmgParams mins = tune_min_bound(p, d);
    OmgParams maxw = tune_max_weight(p, d);
    if (std::fabs(mins.certified_bound - grid_best) > 0.005 * grid_best) {
      std::ostringstream os;
      os << "config " << k << ": tuner " << mins.certified_bound << " vs grid " << grid_best;
      detail = os.str();
      return false;
    }
    if (mins.certified_bound > maxw.certified_bound + 1e-9) {
      detail = "joint tuner worse than the max-weight point";
      return false;
    }
  }
  for (int k = 0; k < 5; ++k) {
    CounterRng rng(31000 + k, 0);
    StorageParams p = random_storage(rng, 1.0, 1.0);
    SubgradientBounds d{-unif(rng, 0.2, 3.0), unif(rng, 0.2, 3.0)};
    OmgParams mins = tune_min_bound(p, d);
    OmgParams maxw = tune_max_weight(p, d);
    if (mins.gamma != maxw.gamma || mins.w != maxw.w ||
        mins.certified_bound != maxw.certified_bound) {
      detail = "no-leak tuner should coincide with the max-weight point exactly";
      return false;
    }
  }
  return true;
}

bool check_step_vs_numeric(std::string& detail) {
  long fired_lo = 0, fired_hi = 0;
  for (int fam = 0; fam < 4; ++fam) {
    for (int k = 0; k < 10000; ++k) {
      CounterRng rng(40000 + fam * 10000 + k, 0);
      StorageParams p = random_storage(rng, 0.90, 0.9999);
      OracleCost oc = random_cost(rng, fam, p);
      CostSpec cost = lib_cost(oc);
      SupportBounds support = random_support(rng);
      InflowSet inflow{};
      if (k % 2) inflow.f_max = unif(rng, 0.0, 1.0);
      SubgradientBounds d = global_subgradient_bounds(cost, support, p);
      double w = w_max(p, d) * unif(rng, 0.05, 1.0);
      KappaInterval ki = kappa_interval(p, d, w);
      double gamma = unif(rng, ki.lo, ki.hi);
      OmgParams params{gamma, w, d, 0.0, "explicit"};
      long t = 1 + static_cast<long>(rng.next_u64() % 48);
      double s = unif(rng, p.s_min, p.s_max);
      double delta = unif(rng, support.delta_min, support.delta_max);
      double price = unif(rng, support.price_min, support.price_max);
      Decision dec = omg_step({s, t}, delta, price, cost, p, inflow, params);

      double a = p.lambda * (s + gamma);
      auto F = [&](double u) {
        double f_track = std::clamp(oracle_h(u, p) - delta, inflow.f_min, inflow.f_max);
        double best = std::numeric_limits<double>::infinity();
        for (double f : {inflow.f_min, inflow.f_max, f_track})
          best = std::min(best, a * u + w * oracle_g(oc, p, u, f, delta, price, t));
        return best;
      };
      const int n = 2000;
      double best_f = std::numeric_limits<double>::infinity();
      int best_i = 0;
      for (int i = 0; i <= n; ++i) {
        double u = p.u_min + (p.u_max - p.u_min) * i / n;
        double v = F(u);
        if (v < best_f) {
          best_f = v;
          best_i = i;
        }
      }
      for (double u : {0.0, oracle_hinv(delta + inflow.f_min, p),
                       oracle_hinv(delta + inflow.f_max, p)})
        best_f = std::min(best_f, F(std::clamp(u, p.u_min, p.u_max)));
      double lo = p.u_min + (p.u_max - p.u_min) * std::max(0, best_i - 1) / n;
      double hi = p.u_min + (p.u_max - p.u_min) * std::min(n, best_i + 1) / n;
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double v1 = F(x1), v2 = F(x2);
      for (int it = 0; it < 70; ++it) {
        if (v1 <= v2) {
          hi = x2;
          x2 = x1;
          v2 = v1;
          x1 = hi - phi * (hi - lo);
          v1 = F(x1);
        } else {
          lo = x1;
          x1 = x2;
          v1 = v2;
          x2 = lo + phi * (hi - lo);
          v2 = F(x2);
        }
      }
      best_f = std::min({best_f, v1, v2});

      double lib_f = a * dec.u + w * oracle_g(oc, p, dec.u, dec.f, delta, price, t);
      double tol = 1e-8 * std::max(1.0, std::fabs(best_f));
      if (lib_f - best_f > tol) {
        std::ostringstream os;
        os << "family " << fam << " instance " << k << ": step objective " << lib_f
           << " vs numeric " << best_f;
        detail = os.str();
        return false;
      }
      if (a + w * d.lo >= 0.0) {
        ++fired_lo;
        if (dec.u != p.u_min || F(p.u_min) - best_f > tol) {
          detail = "one-sided drift shortcut (discharge) disagrees with the numeric solver";
          return false;
        }
      } else if (a + w * d.hi <= 0.0) {
        ++fired_hi;
        if (dec.u != p.u_max || F(p.u_max) - best_f > tol) {
          detail = "one-sided drift shortcut (charge) disagrees with the numeric solver";
          return false;
        }
      }
    }
  }
  if (fired_lo == 0 || fired_hi == 0) {
    detail = "endpoint shortcuts never fired; instance generator too tame";
    return false;
  }
  return true;
}

bool check_exp1(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  ReproduceReport rep = run_reproduce("exp1");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool bound_ok = false;
  for (const auto& pr : rep.result.policies)
    if (pr.omg_params) bound_ok = std::fabs(pr.omg_params->certified_bound - 0.0125) <= 1e-12;
  if (!bound_ok) {
    detail = "certified bound differs from the hand value 0.0125";
    return false;
  }
  if (secs >= 10.0) {
    detail = "runtime budget exceeded (10 s)";
    return false;
  }
  for (const auto& c : rep.checks)
    if (!c.pass) {
      std::ostringstream os;
      os << c.name << ": " << c.lhs << " vs " << c.rhs;
      detail = os.str();
      return false;
    }
  return !rep.checks.empty();
}

bool check_exp2(std::string& detail) {
  ReproduceReport rep = run_reproduce("exp2");
  for (const auto& c : rep.checks)
    if (!c.pass) {
      std::ostringstream os;
      os << c.name << ": " << c.lhs << " vs " << c.rhs;
      detail = os.str();
      return false;
    }
  return !rep.checks.empty();
}

bool check_markov(std::string& detail) {
  MarkovChain chain;
  chain.transition = {{0.5, 0.5}, {0.5, 0.5}};
  chain.emissions = {{-1.0, 0.0}, {1.0, 0.0}};
  chain.initial = 0;
  EpochStats exact = markov_epoch_stats(chain, 0, 0.97);
  if (std::fabs(exact.mean_dt - 2.0) > 1e-10 || std::fabs(exact.mean_dt2 - 6.0) > 1e-10 ||
      std::fabs(exact.mean_lambda_dt - 0.941747572815534) > 1e-10) {
    std::ostringstream os;
    os << "exact stats {" << exact.mean_dt << ", " << exact.mean_dt2 << ", "
       << exact.mean_lambda_dt << "} off the two-state closed form";
    detail = os.str();
    return false;
  }
  EpochStats mc = markov_epoch_stats_mc(chain, 0, 0.97, 1000000, 2026);
  if (std::fabs(mc.mean_dt - exact.mean_dt) > 0.01 * exact.mean_dt ||
      std::fabs(mc.mean_dt2 - exact.mean_dt2) > 0.01 * exact.mean_dt2 ||
      std::fabs(mc.mean_lambda_dt - exact.mean_lambda_dt) > 0.01 * exact.mean_lambda_dt) {
    detail = "Monte-Carlo epoch stats drifted more than 1% from the exact values";
    return false;
  }
  StorageParams p{0.97, 0.0, 100.0, -10.0, 10.0, 1.0, 1.0};
  EpochStats unit{1.0, 1.0, 0.97};
  for (double w : {5.0, 10.0, 20.0}) {
    KappaInterval ki = kappa_interval(p, {-1.0, 1.0}, w);
    for (int j = 0; j <= 8; ++j) {
      double gam = ki.lo + (ki.hi - ki.lo) * j / 8.0;
      if (markov_bound(p, gam, w, unit) != subopt_bound(p, gam, w)) {
        detail = "unit-epoch bound should reduce to the single-step bound bitwise";
        return false;
      }
    }
  }
  return true;
}

bool check_exp3(std::string& detail) {
  ReproduceReport rep = run_reproduce("exp3-synthetic");
  for (const auto& c : rep.checks)
    if (!c.pass) {
      std::ostringstream os;
      os << c.name << ": " << c.lhs << " vs " << c.rhs;
      detail = os.str();
      return false;
    }
  return !rep.checks.empty();
}

bool check_determinism(std::string& detail) {
  SimConfig cfg;
  cfg.storage = {1.0, 0.0, 100.0, -10.0, 10.0, 1.0, 1.0};
  cfg.cost = CostSpec::balancing(1.0, 2.0);
  cfg.process.iid.delta = Dist::laplace(0.0, 2.0);
  cfg.process.support = SupportBounds{-7.0, 7.0, 0.0, 0.0};
  PolicySpec omg_p;
  omg_p.type = PolicySpec::Type::omg;
  PolicySpec gr;
  gr.type = PolicySpec::Type::greedy;
  PolicySpec ns;
  ns.type = PolicySpec::Type::no_storage;
  cfg.policies = {omg_p, gr, ns};
  cfg.t_steps = 200;
  cfg.s1 = 50.0;
  cfg.seed = 99;
  cfg.replications = 8;

  std::vector<std::string> dumps;
  const char* thread_env[] = {"1", "2", "7", nullptr, "1"};
  for (const char* threads : thread_env) {
    if (threads)
      setenv("OMG_THREADS", threads, 1);
    else
      unsetenv("OMG_THREADS");
    SimResult res = run(cfg);
    dumps.push_back(result_to_json(res, compare(res)).dump());
  }
  unsetenv("OMG_THREADS");
  for (size_t i = 1; i < dumps.size(); ++i)
    if (dumps[i] != dumps[0]) {
      detail = "serialized results differ between thread counts";
      return false;
    }
  return true;
}

}  // namespace

int main() {
  run_check(1, "tuned policy keeps the level inside the box", check_feasibility);
  run_check(2, "no-leak certified bound matches the closed form", check_lossless_closed_form);
  run_check(3, "joint tuner matches a dense parameter grid", check_tuner_vs_grid);
  run_check(4, "per-step decisions match numeric minimization", check_step_vs_numeric);
  run_check(5, "exp1: certified bound brackets the greedy optimum", check_exp1);
  run_check(6, "exp2: beats greedy under day/night deficit penalties", check_exp2);
  run_check(7, "epoch statistics and the epoch-weighted bound", check_markov);
  run_check(8, "exp3-synthetic: hindsight ordering and value interval", check_exp3);
  run_check(9, "bit-identical results across thread counts", check_determinism);
  std::printf("%d/9 checks passed\n", 9 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
