#include "omg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace omg {

std::string PolicySpec::label() const {
  switch (type) {
    case Type::omg: {
      if (gamma && w) {
        std::ostringstream os;
        os << "omg[gamma=" << *gamma << ",w=" << *w << "]";
        return os.str();
      }
      return "omg[" + method + "]";
    }
    case Type::greedy:
      return "greedy";
    case Type::no_storage:
      return "no_storage";
    case Type::clairvoyant:
      return "clairvoyant";
  }
  return "?";
}

SupportBounds resolve_support(const ProcessSpec& process) {
  auto check_contains = [](const SupportBounds& outer, const SupportBounds& inner,
                           const char* what) {
    if (inner.delta_min < outer.delta_min || inner.delta_max > outer.delta_max ||
        inner.price_min < outer.price_min || inner.price_max > outer.price_max)
      fail(Errc::config_error,
           std::string(what) + " fall outside the declared support bounds");
  };
  switch (process.type) {
    case ProcessSpec::Type::iid: {
      if (process.support) {
        validate_support(*process.support);
        return *process.support;
      }
      if (process.iid.use_joint) {
        SupportBounds b{};
        bool first = true;
        for (auto [d, p] : process.iid.joint) {
          if (first) {
            b = {d, d, p, p};
            first = false;
          }
          b.delta_min = std::min(b.delta_min, d);
          b.delta_max = std::max(b.delta_max, d);
          b.price_min = std::min(b.price_min, p);
          b.price_max = std::max(b.price_max, p);
        }
        return b;
      }
      auto dr = process.iid.delta.natural_range();
      auto pr = process.iid.price.natural_range();
      if (!dr || !pr)
        fail(Errc::config_error,
             "support bounds required: a marginal has unbounded support (laplace)");
      return {dr->first, dr->second, pr->first, pr->second};
    }
    case ProcessSpec::Type::markov: {
      SupportBounds derived = process.markov.derived_support();
      if (process.support) {
        validate_support(*process.support);
        check_contains(*process.support, derived, "markov emissions");
        return *process.support;
      }
      return derived;
    }
    case ProcessSpec::Type::trace: {
      SupportBounds derived = process.trace.derived_support();
      if (process.support) {
        validate_support(*process.support);
        check_contains(*process.support, derived, "trace records");
        return *process.support;
      }
      return derived;
    }
  }
  return {};
}

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

int thread_count(int replications) {
  int n = 0;
  if (const char* env = std::getenv("OMG_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::max(1, std::min(n, replications));
}

// Draws (delta, price) for one replication; identical for every policy.
std::vector<std::pair<double, double>> draw_disturbances(const SimConfig& cfg, long t_steps,
                                                         int replication) {
  std::vector<std::pair<double, double>> out(static_cast<size_t>(t_steps));
  switch (cfg.process.type) {
    case ProcessSpec::Type::iid: {
      CounterRng rng(cfg.seed, static_cast<uint64_t>(replication));
      for (auto& dp : out) dp = sample_iid(cfg.process.iid, rng);
      break;
    }
    case ProcessSpec::Type::markov: {
      CounterRng rng(cfg.seed, static_cast<uint64_t>(replication));
      int state = cfg.process.markov.initial;
      for (auto& dp : out) {
        dp = cfg.process.markov.emissions[static_cast<size_t>(state)];
        state = markov_next(cfg.process.markov, state, rng);
      }
      break;
    }
    case ProcessSpec::Type::trace: {
      for (long t = 0; t < t_steps; ++t) {
        out[static_cast<size_t>(t)] = {
            cfg.process.trace.delta[static_cast<size_t>(t)],
            cfg.process.trace.has_price ? cfg.process.trace.price[static_cast<size_t>(t)] : 0.0};
      }
      break;
    }
  }
  if (cfg.imbalance_sign != 1.0)
    for (auto& dp : out) dp.first *= cfg.imbalance_sign;
  return out;
}

struct RepOutcome {
  double cost = 0.0;
  bool violated = false;
};

RepOutcome simulate_policy(const SimConfig& cfg, const PolicySpec& spec,
                           const OmgParams* omg_params, long t_steps,
                           const std::vector<std::pair<double, double>>& draws,
                           std::vector<TrajectoryPoint>* trajectory) {
  const StorageParams& sp = cfg.storage;
  const bool check_level = spec.type != PolicySpec::Type::no_storage;

  std::vector<Decision> plan;
  if (spec.type == PolicySpec::Type::clairvoyant)
    plan = clairvoyant_plan(draws, cfg.s1, cfg.cost, sp, cfg.inflow, spec.grids);

  StorageState state{cfg.s1, 1};
  double total = 0.0;
  for (long t = 1; t <= t_steps; ++t) {
    auto [delta, price] = draws[static_cast<size_t>(t - 1)];
    Decision d;
    switch (spec.type) {
      case PolicySpec::Type::omg:
        d = omg_step(state, delta, price, cfg.cost, sp, cfg.inflow, *omg_params,
                     spec.enforce_level_constraint);
        break;
      case PolicySpec::Type::greedy:
        d = greedy_step(state, delta, price, cfg.cost, sp, cfg.inflow);
        break;
      case PolicySpec::Type::no_storage:
        d = no_storage_step(state, delta, price, cfg.cost, sp, cfg.inflow);
        break;
      case PolicySpec::Type::clairvoyant:
        d = plan[static_cast<size_t>(t - 1)];
        break;
    }
    double g = evaluate(cfg.cost, d.u, d.f, delta, price, t, sp);
    total += g;
    if (trajectory) trajectory->push_back({t, state.s, d.u, d.f, delta, price, g});
    StorageState next = step(state, d.u, sp);
    if (check_level &&
        (next.s < sp.s_min - kBoundaryTol || next.s > sp.s_max + kBoundaryTol)) {
      return {nan_value(), true};
    }
    state = next;
  }
  return {total / static_cast<double>(t_steps), false};
}

}  // namespace

SimResult run(const SimConfig& cfg) {
  validate_storage(cfg.storage);
  validate_inflow(cfg.inflow);
  validate_cost(cfg.cost);
  if (cfg.policies.empty()) fail(Errc::config_error, "at least one policy required");
  if (cfg.replications < 1) fail(Errc::config_error, "replications must be >= 1");
  if (cfg.imbalance_sign != 1.0 && cfg.imbalance_sign != -1.0)
    fail(Errc::config_error, "imbalance_sign must be +1 or -1");
  if (cfg.s1 < cfg.storage.s_min - kBoundaryTol || cfg.s1 > cfg.storage.s_max + kBoundaryTol)
    fail(Errc::config_error, "initial level outside the admissible range");

  SimConfig local = cfg;  // holds resolved schedules / supports

  long t_steps = cfg.t_steps;
  if (local.process.type == ProcessSpec::Type::trace) {
    long len = local.process.trace.length();
    if (t_steps == 0) t_steps = len;
    if (t_steps > len)
      fail(Errc::config_error, "sim.t exceeds trace length (" + std::to_string(len) + ")");
    if (local.cost.uses_price() && !local.process.trace.has_price)
      fail(Errc::missing_column, "cost family needs a price column in the trace");
    // Resolve schedule placeholders against the trace penalty columns.
    bool wants_trace_q =
        local.cost.family == CostFamily::balancing &&
        (local.cost.q_plus.kind() == PenaltySchedule::Kind::from_trace ||
         local.cost.q_minus.kind() == PenaltySchedule::Kind::from_trace);
    if (wants_trace_q) {
      if (!local.process.trace.has_penalties)
        fail(Errc::missing_column, "balancing schedule says from_trace but the trace has no "
                                   "q_plus,q_minus columns");
      if (local.cost.q_plus.kind() == PenaltySchedule::Kind::from_trace)
        local.cost.q_plus = PenaltySchedule::series(local.process.trace.q_plus);
      if (local.cost.q_minus.kind() == PenaltySchedule::Kind::from_trace)
        local.cost.q_minus = PenaltySchedule::series(local.process.trace.q_minus);
      validate_cost(local.cost);
    }
  }
  if (t_steps < 1) fail(Errc::config_error, "sim.t must be >= 1");

  SupportBounds support = resolve_support(local.process);
  if (local.process.type == ProcessSpec::Type::iid) local.process.iid.support = support;
  if (local.process.type == ProcessSpec::Type::iid) local.process.iid.validate();
  if (local.process.type == ProcessSpec::Type::markov) local.process.markov.validate();

  // Resolve controller parameters before any replication runs.
  std::vector<std::optional<OmgParams>> omg_params(local.policies.size());
  for (size_t i = 0; i < local.policies.size(); ++i) {
    const PolicySpec& spec = local.policies[i];
    if (spec.type != PolicySpec::Type::omg) continue;
    SubgradientBounds d = global_subgradient_bounds(local.cost, support, local.storage);
    if (spec.gamma && spec.w) {
      if (!(*spec.w > 0.0)) fail(Errc::config_error, "policy w must be > 0");
      KappaInterval k = kappa_interval(local.storage, d, *spec.w);
      double tol = 1e-9 * std::max({1.0, std::abs(k.lo), std::abs(k.hi)});
      if (*spec.gamma < k.lo - tol || *spec.gamma > k.hi + tol)
        fail(Errc::config_error, "explicit gamma outside the admissible bias interval");
      omg_params[i] = OmgParams{*spec.gamma, *spec.w, d,
                                subopt_bound(local.storage, *spec.gamma, *spec.w), "explicit"};
    } else if (spec.method == "maxw") {
      omg_params[i] = tune_max_weight(local.storage, d);
    } else if (spec.method == "mins") {
      omg_params[i] = tune_min_bound(local.storage, d);
    } else {
      fail(Errc::config_error, "unknown tuning method: " + spec.method);
    }
  }

  const int reps = cfg.replications;
  const size_t n_pol = local.policies.size();
  std::vector<std::vector<double>> costs(n_pol, std::vector<double>(static_cast<size_t>(reps)));
  std::vector<std::vector<char>> violated(n_pol,
                                          std::vector<char>(static_cast<size_t>(reps), 0));
  std::vector<std::vector<TrajectoryPoint>> trajectories(n_pol);
  const bool keep_traj = cfg.keep_trajectories && t_steps <= 100000;

  auto run_rep = [&](int r) {
    auto draws = draw_disturbances(local, t_steps, r);
    for (size_t p = 0; p < n_pol; ++p) {
      std::vector<TrajectoryPoint>* traj = nullptr;
      if (r == 0 && keep_traj) {
        trajectories[p].reserve(static_cast<size_t>(t_steps));
        traj = &trajectories[p];
      }
      RepOutcome out = simulate_policy(local, local.policies[p],
                                       omg_params[p] ? &*omg_params[p] : nullptr, t_steps,
                                       draws, traj);
      costs[p][static_cast<size_t>(r)] = out.cost;
      violated[p][static_cast<size_t>(r)] = out.violated ? 1 : 0;
    }
  };

  const int n_threads = thread_count(reps);
  if (n_threads == 1) {
    for (int r = 0; r < reps; ++r) run_rep(r);
  } else {
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = w; r < reps; r += n_threads) run_rep(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SimResult result;
  result.seed = cfg.seed;
  result.replications = reps;
  result.t_steps = t_steps;
  result.policies.resize(n_pol);

  std::optional<size_t> baseline;
  for (size_t p = 0; p < n_pol; ++p)
    if (local.policies[p].type == PolicySpec::Type::no_storage) baseline = p;

  for (size_t p = 0; p < n_pol; ++p) {
    PolicyResult& pr = result.policies[p];
    pr.name = local.policies[p].label();
    pr.seed = cfg.seed;
    pr.rep_costs = costs[p];
    pr.omg_params = omg_params[p];
    pr.trajectory = std::move(trajectories[p]);
    long n_valid = 0;
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      if (violated[p][static_cast<size_t>(r)]) {
        ++pr.violations;
        continue;
      }
      sum += costs[p][static_cast<size_t>(r)];
      ++n_valid;
    }
    pr.mean_cost = n_valid > 0 ? sum / static_cast<double>(n_valid) : nan_value();
    if (n_valid > 1) {
      double ss = 0.0;
      for (int r = 0; r < reps; ++r) {
        if (violated[p][static_cast<size_t>(r)]) continue;
        double dev = costs[p][static_cast<size_t>(r)] - pr.mean_cost;
        ss += dev * dev;
      }
      pr.se = std::sqrt(ss / static_cast<double>(n_valid - 1) / static_cast<double>(n_valid));
    }
  }

  if (baseline) {
    double j_ns = result.policies[*baseline].mean_cost;
    for (size_t p = 0; p < n_pol; ++p) {
      if (result.policies[p].omg_params && !std::isnan(j_ns) &&
          result.policies[p].violations == 0)
        result.policies[p].vos = vos_interval(j_ns, result.policies[p].mean_cost,
                                              result.policies[p].omg_params->certified_bound);
    }
  }
  return result;
}

double binomial_tail_p(long n, long k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // Exact sum of C(n, i) / 2^n for i = k..n via log-gamma.
  double p = 0.0;
  for (long i = k; i <= n; ++i) {
    double log_c = std::lgamma(static_cast<double>(n) + 1.0) -
                   std::lgamma(static_cast<double>(i) + 1.0) -
                   std::lgamma(static_cast<double>(n - i) + 1.0);
    p += std::exp(log_c - static_cast<double>(n) * std::log(2.0));
  }
  return std::min(1.0, p);
}

namespace {

Comparison compare_impl(const std::vector<PolicyResult>& results, bool check_seeds) {
  if (results.empty()) fail(Errc::config_error, "nothing to compare");
  if (check_seeds) {
    for (const auto& r : results) {
      if (r.seed != results[0].seed || r.rep_costs.size() != results[0].rep_costs.size())
        fail(Errc::mismatched_seeds,
             "policy results come from different seeds or replication counts");
    }
  }
  Comparison cmp;
  std::vector<size_t> order(results.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    double ma = results[a].mean_cost, mb = results[b].mean_cost;
    if (std::isnan(ma)) return false;
    if (std::isnan(mb)) return true;
    return ma < mb;
  });
  for (size_t i : order) cmp.ranking.push_back(results[i].name);

  for (size_t a = 0; a < results.size(); ++a) {
    for (size_t b = a + 1; b < results.size(); ++b) {
      PairwiseComparison pc;
      pc.a = results[a].name;
      pc.b = results[b].name;
      double sum = 0.0, sum_sq = 0.0;
      long n = 0;
      for (size_t r = 0; r < results[a].rep_costs.size(); ++r) {
        double da = results[a].rep_costs[r], db = results[b].rep_costs[r];
        if (std::isnan(da) || std::isnan(db)) continue;
        double d = da - db;
        sum += d;
        sum_sq += d * d;
        ++n;
        if (d < 0.0)
          ++pc.a_wins;
        else if (d > 0.0)
          ++pc.b_wins;
        else
          ++pc.ties;
      }
      if (n > 0) pc.mean_delta = sum / static_cast<double>(n);
      if (n > 1) {
        double var = (sum_sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1);
        pc.se_delta = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
      }
      pc.sign_test_p = binomial_tail_p(pc.a_wins + pc.b_wins, pc.a_wins);
      cmp.pairs.push_back(pc);
    }
  }
  return cmp;
}

}  // namespace

Comparison compare(const SimResult& result) { return compare_impl(result.policies, false); }

Comparison compare(const std::vector<PolicyResult>& results) {
  return compare_impl(results, true);
}

}  // namespace omg
