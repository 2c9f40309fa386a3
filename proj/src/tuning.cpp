#include "omg/tuning.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "omg/detail/golden.hpp"

namespace omg {

namespace {

double m_u_of(const StorageParams& p, double gamma) {
  double c = 1.0 - p.lambda;
  double a = p.u_min + c * gamma;
  double b = p.u_max + c * gamma;
  return 0.5 * std::max(a * a, b * b);
}

double m_b_of(const StorageParams& p, double gamma) {
  double a = p.s_min + gamma;
  double b = p.s_max + gamma;
  return std::max(a * a, b * b);
}

void require_positive_w(double w) {
  if (!(w > 0.0)) fail(Errc::config_error, "weight w must be > 0");
}

void require_ordered(const SubgradientBounds& d) {
  if (!(d.hi >= d.lo)) fail(Errc::config_error, "subgradient bounds inverted (hi < lo)");
}

}  // namespace

KappaInterval kappa_interval(const StorageParams& p, const SubgradientBounds& d, double w) {
  require_positive_w(w);
  require_ordered(d);
  double lo = (-w * d.lo + p.u_max - p.s_max) / p.lambda;
  double hi = (-w * d.hi - p.s_min + p.u_min) / p.lambda;
  if (lo > hi) {
    std::ostringstream os;
    os << "bias interval empty at w = " << w << " (lo = " << lo << " > hi = " << hi
       << "); reduce w below w_max";
    fail(Errc::empty_interval, os.str());
  }
  return {lo, hi};
}

double w_max(const StorageParams& p, const SubgradientBounds& d) {
  require_ordered(d);
  double slope_span = d.hi - d.lo;
  if (slope_span == 0.0)
    fail(Errc::degenerate_slope, "subgradient bounds coincide; every w admits a bias");
  return ((p.s_max - p.s_min) - (p.u_max - p.u_min)) / slope_span;
}

double subopt_bound(const StorageParams& p, double gamma, double w) {
  require_positive_w(w);
  return (m_u_of(p, gamma) + p.lambda * (1.0 - p.lambda) * m_b_of(p, gamma)) / w;
}

OmgParams tune_max_weight(const StorageParams& p, const SubgradientBounds& d) {
  validate_storage(p);
  double w = w_max(p, d);
  double gamma =
      (d.lo * (p.s_min - p.u_min) - d.hi * (p.s_max - p.u_max)) / (p.lambda * (d.hi - d.lo));
  // At w_max the admissible interval is a point; keep gamma inside it despite
  // rounding in either formula.
  double lo = (-w * d.lo + p.u_max - p.s_max) / p.lambda;
  double hi = (-w * d.hi - p.s_min + p.u_min) / p.lambda;
  double a = std::min(lo, hi), b = std::max(lo, hi);
  double tol = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  if (gamma < a - tol || gamma > b + tol)
    fail(Errc::numerical_failure, "closed-form bias fell outside the collapsed interval");
  gamma = std::clamp(gamma, a, b);
  return {gamma, w, d, subopt_bound(p, gamma, w), "maxw"};
}

namespace {

struct InnerMin {
  double gamma = 0.0;
  double m = 0.0;
};

// Exact min of M(gamma) over the admissible interval at weight w.  M is the
// max of four convex quadratics sharing one leading coefficient, so the
// kinks are roots of affine differences and the only other interior
// candidates are the vertices.
InnerMin inner_min_m(const StorageParams& p, const SubgradientBounds& d, double w) {
  double lo = (-w * d.lo + p.u_max - p.s_max) / p.lambda;
  double hi = (-w * d.hi - p.s_min + p.u_min) / p.lambda;
  if (lo > hi) lo = hi = 0.5 * (lo + hi);  // fp collapse right at w_max

  const double c = 1.0 - p.lambda;
  const double k = p.lambda * c;
  const double U[2] = {p.u_min, p.u_max};
  const double S[2] = {p.s_min, p.s_max};
  const double lead = 0.5 * c * c + k;
  auto lin = [&](int i, int j) { return c * U[i] + 2.0 * k * S[j]; };
  auto cst = [&](int i, int j) { return 0.5 * U[i] * U[i] + k * S[j] * S[j]; };

  double cands[16];
  int n_cands = 0;
  cands[n_cands++] = lo;
  cands[n_cands++] = hi;
  if (lead > 0.0)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) cands[n_cands++] = -0.5 * lin(i, j) / lead;
  constexpr int idx[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      double dl = lin(idx[a][0], idx[a][1]) - lin(idx[b][0], idx[b][1]);
      if (dl == 0.0) continue;
      double dc = cst(idx[a][0], idx[a][1]) - cst(idx[b][0], idx[b][1]);
      cands[n_cands++] = -dc / dl;
    }

  InnerMin best{lo, m_u_of(p, lo) + k * m_b_of(p, lo)};
  for (int i = 1; i < n_cands; ++i) {
    double g = cands[i];
    if (g < lo || g > hi) continue;
    double m = m_u_of(p, g) + k * m_b_of(p, g);
    if (m < best.m) best = {g, m};
  }
  return best;
}

}  // namespace

OmgParams tune_min_bound(const StorageParams& p, const SubgradientBounds& d,
                         const TuneOptions& opts) {
  validate_storage(p);
  require_ordered(d);

  bool degenerate = (d.hi == d.lo);
  double wm = 0.0;
  if (degenerate) {
    wm = opts.w_ceiling > 0.0 ? opts.w_ceiling : 1e6 * (p.s_max - p.s_min);
  } else {
    wm = w_max(p, d);
  }

  if (p.lambda == 1.0) {
    // Bound is gamma-free and proportional to 1/w: the cap is optimal.
    if (!degenerate) {
      OmgParams r = tune_max_weight(p, d);
      r.method = "mins";
      return r;
    }
    KappaInterval k = kappa_interval(p, d, wm);
    double gamma = 0.5 * (k.lo + k.hi);
    return {gamma, wm, d, subopt_bound(p, gamma, wm), "mins"};
  }

  const int n = std::max(2, opts.w_grid_points);
  const double w_lo = wm * opts.w_floor_factor;
  const double log_ratio = std::log(wm / w_lo);

  struct Best {
    double phi = std::numeric_limits<double>::infinity();
    double w = 0.0;
    double gamma = 0.0;
  };
  Best best;
  auto consider = [&](double w) {
    InnerMin im = inner_min_m(p, d, w);
    double phi = im.m / w;
    if (phi < best.phi) best = {phi, w, im.gamma};
    return phi;
  };

  int best_k = 0;
  double best_grid_phi = std::numeric_limits<double>::infinity();
  std::vector<double> ws(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double w = (k == n - 1) ? wm : w_lo * std::exp(log_ratio * k / (n - 1));
    ws[static_cast<size_t>(k)] = w;
    double phi = consider(w);
    if (phi < best_grid_phi) {
      best_grid_phi = phi;
      best_k = k;
    }
  }

  double bracket_lo = ws[static_cast<size_t>(std::max(0, best_k - 1))];
  double bracket_hi = ws[static_cast<size_t>(std::min(n - 1, best_k + 1))];
  detail::golden_section_min(consider, bracket_lo, bracket_hi, 1e-10);

  if (!(best.phi <= best_grid_phi))
    fail(Errc::numerical_failure, "refinement worsened the grid minimum");
  return {best.gamma, best.w, d, best.phi, "mins"};
}

EpochStats markov_epoch_stats(const MarkovChain& chain, int return_state, double lambda) {
  chain.validate();
  int n = chain.size();
  if (return_state < 0 || return_state >= n)
    fail(Errc::config_error, "return state out of range");
  if (!(lambda > 0.0 && lambda <= 1.0)) fail(Errc::config_error, "lambda must be in (0, 1]");

  const int m = n - 1;
  // Map states != return_state onto 0..m-1.
  std::vector<int> ids(static_cast<size_t>(n), -1);
  int next = 0;
  for (int i = 0; i < n; ++i)
    if (i != return_state) ids[static_cast<size_t>(i)] = next++;

  Eigen::MatrixXd Q(m, m);
  Eigen::VectorXd to_r(m);
  Eigen::VectorXd from_r(m);
  for (int i = 0; i < n; ++i) {
    if (i == return_state) continue;
    int ii = ids[static_cast<size_t>(i)];
    to_r(ii) = chain.transition[static_cast<size_t>(i)][static_cast<size_t>(return_state)];
    from_r(ii) = chain.transition[static_cast<size_t>(return_state)][static_cast<size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (j == return_state) continue;
      Q(ii, ids[static_cast<size_t>(j)]) =
          chain.transition[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
  }

  double e_dt = 1.0, e_dt2 = 1.0;
  double p_rr =
      chain.transition[static_cast<size_t>(return_state)][static_cast<size_t>(return_state)];
  double e_ldt = lambda * p_rr;
  if (m > 0) {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    auto lu = (I - Q).partialPivLu();
    Eigen::VectorXd h = lu.solve(ones);                       // E[time to hit r | i]
    Eigen::VectorXd h2 = lu.solve(ones + 2.0 * (Q * h));      // E[(time to hit r)^2 | i]
    Eigen::VectorXd z = (I - lambda * Q).partialPivLu().solve(lambda * to_r);
    e_dt = 1.0 + from_r.dot(h);
    e_dt2 = 1.0 + 2.0 * from_r.dot(h) + from_r.dot(h2);
    e_ldt = lambda * (p_rr + from_r.dot(z));
  }
  return {e_dt, e_dt2, e_ldt};
}

EpochStats markov_epoch_stats_mc(const MarkovChain& chain, int return_state, double lambda,
                                 long epochs, uint64_t seed) {
  chain.validate();
  if (return_state < 0 || return_state >= chain.size())
    fail(Errc::config_error, "return state out of range");
  if (epochs < 1) fail(Errc::config_error, "epochs must be >= 1");
  CounterRng rng(seed, 0x4d43);  // dedicated stream for the estimator
  double sum_dt = 0.0, sum_dt2 = 0.0, sum_ldt = 0.0;
  int state = return_state;
  for (long e = 0; e < epochs; ++e) {
    long dt = 0;
    double ldt = 1.0;
    do {
      state = markov_next(chain, state, rng);
      ++dt;
      ldt *= lambda;
    } while (state != return_state);
    sum_dt += static_cast<double>(dt);
    sum_dt2 += static_cast<double>(dt) * static_cast<double>(dt);
    sum_ldt += ldt;
  }
  double inv = 1.0 / static_cast<double>(epochs);
  return {sum_dt * inv, sum_dt2 * inv, sum_ldt * inv};
}

double markov_bound(const StorageParams& p, double gamma, double w, const EpochStats& stats) {
  require_positive_w(w);
  if (!(stats.mean_dt >= 1.0)) fail(Errc::config_error, "mean epoch length must be >= 1");
  double cu = stats.mean_dt2 / stats.mean_dt;
  double cb = p.lambda * (1.0 - stats.mean_lambda_dt) / stats.mean_dt;
  return (cu * m_u_of(p, gamma) + cb * m_b_of(p, gamma)) / w;
}

VosEstimate vos_interval(double j_no_storage, double j_omg, double bound) {
  VosEstimate v;
  v.lo = j_no_storage - j_omg;
  v.hi = v.lo + bound;
  if (j_no_storage != 0.0) v.pct_upper = v.hi / j_no_storage;
  return v;
}

double vos_pct_upper(double j_no_storage, double j_omg, double bound) {
  if (j_no_storage == 0.0)
    fail(Errc::zero_baseline, "percentage savings undefined at zero baseline cost");
  return vos_interval(j_no_storage, j_omg, bound).pct_upper.value();
}

}  // namespace omg
