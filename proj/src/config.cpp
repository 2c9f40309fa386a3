#include "omg/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace omg {

namespace {

void expect_keys(const Json& j, std::initializer_list<const char*> keys, const char* ctx) {
  if (!j.is_object()) fail(Errc::config_error, std::string(ctx) + " must be a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      fail(Errc::config_error, std::string("unknown key '") + item.key() + "' in " + ctx);
  }
}

const Json& require(const Json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end())
    fail(Errc::config_error, std::string(ctx) + " is missing required key '" + key + "'");
  return *it;
}

double as_number(const Json& j, const char* what) {
  if (!j.is_number()) fail(Errc::config_error, std::string(what) + " must be a number");
  return j.get<double>();
}

double num(const Json& j, const char* key, const char* ctx) {
  return as_number(require(j, key, ctx), key);
}

double num_or(const Json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : as_number(*it, key);
}

long int_or(const Json& j, const char* key, long fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) fail(Errc::config_error, std::string(key) + " must be an integer");
  return it->get<long>();
}

bool bool_or(const Json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) fail(Errc::config_error, std::string(key) + " must be a boolean");
  return it->get<bool>();
}

std::string str(const Json& j, const char* key, const char* ctx) {
  const Json& v = require(j, key, ctx);
  if (!v.is_string()) fail(Errc::config_error, std::string(key) + " must be a string");
  return v.get<std::string>();
}

StorageParams parse_storage(const Json& j) {
  expect_keys(j, {"lambda", "s_min", "s_max", "u_min", "u_max", "mu_c", "mu_d"}, "storage");
  StorageParams p;
  p.lambda = num_or(j, "lambda", 1.0);
  p.s_min = num(j, "s_min", "storage");
  p.s_max = num(j, "s_max", "storage");
  p.u_min = num(j, "u_min", "storage");
  p.u_max = num(j, "u_max", "storage");
  p.mu_c = num_or(j, "mu_c", 1.0);
  p.mu_d = num_or(j, "mu_d", 1.0);
  return p;
}

PenaltySchedule parse_schedule(const Json& j, const char* key, int steps_per_hour) {
  if (j.is_number()) return PenaltySchedule::constant(j.get<double>());
  if (j.is_string()) {
    if (j.get<std::string>() == "from_trace") return PenaltySchedule::from_trace();
    fail(Errc::config_error, std::string(key) + ": only the string \"from_trace\" is accepted");
  }
  if (j.is_object()) {
    expect_keys(j, {"day", "night"}, key);
    return PenaltySchedule::day_night(num(j, "day", key), num(j, "night", key), steps_per_hour);
  }
  fail(Errc::config_error, std::string(key) + " must be a number, \"from_trace\", or {day, night}");
}

CostSpec parse_cost(const Json& j, int steps_per_hour) {
  std::string family = str(j, "family", "cost");
  CostSpec c;
  if (family == "arbitrage") {
    expect_keys(j, {"family"}, "cost");
    c = CostSpec::arbitrage();
  } else if (family == "balancing") {
    expect_keys(j, {"family", "q_plus", "q_minus"}, "cost");
    c = CostSpec::balancing_schedules(
        parse_schedule(require(j, "q_plus", "cost"), "q_plus", steps_per_hour),
        parse_schedule(require(j, "q_minus", "cost"), "q_minus", steps_per_hour));
  } else if (family == "colocated") {
    expect_keys(j, {"family"}, "cost");
    c = CostSpec::colocated();
  } else if (family == "day_night_deficit") {
    expect_keys(j, {"family", "day_multiplier", "base_rate"}, "cost");
    c = CostSpec::day_night_deficit(num(j, "day_multiplier", "cost"), num(j, "base_rate", "cost"),
                                    steps_per_hour);
  } else {
    fail(Errc::config_error, "unknown cost family: " + family);
  }
  c.steps_per_hour = steps_per_hour;
  validate_cost(c);
  return c;
}

Dist parse_dist(const Json& j, const char* ctx) {
  std::string kind = str(j, "dist", ctx);
  if (kind == "laplace") {
    expect_keys(j, {"dist", "mean", "sigma"}, ctx);
    return Dist::laplace(num_or(j, "mean", 0.0), num(j, "sigma", ctx));
  }
  if (kind == "uniform") {
    expect_keys(j, {"dist", "lo", "hi"}, ctx);
    return Dist::uniform(num(j, "lo", ctx), num(j, "hi", ctx));
  }
  if (kind == "point") {
    expect_keys(j, {"dist", "value"}, ctx);
    return Dist::point_mass(num(j, "value", ctx));
  }
  if (kind == "empirical") {
    expect_keys(j, {"dist", "samples"}, ctx);
    const Json& s = require(j, "samples", ctx);
    if (!s.is_array() || s.empty())
      fail(Errc::config_error, std::string(ctx) + ".samples must be a non-empty array");
    std::vector<double> samples;
    samples.reserve(s.size());
    for (const auto& v : s) samples.push_back(as_number(v, "sample"));
    return Dist::empirical(std::move(samples));
  }
  fail(Errc::config_error, std::string(ctx) + ": unknown dist kind " + kind);
}

SupportBounds parse_support(const Json& j) {
  expect_keys(j, {"delta", "price"}, "support");
  auto pair_of = [&](const char* key, bool required) -> std::pair<double, double> {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(Errc::config_error, std::string("support needs '") + key + "'");
      return {0.0, 0.0};
    }
    if (!it->is_array() || it->size() != 2)
      fail(Errc::config_error, std::string("support.") + key + " must be [lo, hi]");
    return {as_number((*it)[0], key), as_number((*it)[1], key)};
  };
  auto [dlo, dhi] = pair_of("delta", true);
  auto [plo, phi] = pair_of("price", false);
  SupportBounds b{dlo, dhi, plo, phi};
  validate_support(b);
  return b;
}

ProcessSpec parse_process(const Json& j) {
  std::string type = str(j, "type", "process");
  ProcessSpec p;
  if (type == "iid") {
    expect_keys(j, {"type", "delta", "price", "joint", "support"}, "process");
    p.type = ProcessSpec::Type::iid;
    if (auto it = j.find("joint"); it != j.end()) {
      if (!it->is_array() || it->empty())
        fail(Errc::config_error, "process.joint must be a non-empty array of [delta, price]");
      p.iid.use_joint = true;
      for (const auto& v : *it) {
        if (!v.is_array() || v.size() != 2)
          fail(Errc::config_error, "process.joint entries must be [delta, price]");
        p.iid.joint.emplace_back(as_number(v[0], "joint delta"), as_number(v[1], "joint price"));
      }
    } else {
      p.iid.delta = parse_dist(require(j, "delta", "process"), "process.delta");
      p.iid.price = parse_dist(require(j, "price", "process"), "process.price");
    }
  } else if (type == "markov") {
    expect_keys(j, {"type", "transition", "emissions", "initial", "support"}, "process");
    p.type = ProcessSpec::Type::markov;
    const Json& tr = require(j, "transition", "process");
    if (!tr.is_array()) fail(Errc::config_error, "process.transition must be an array of rows");
    for (const auto& row : tr) {
      std::vector<double> r;
      for (const auto& v : row) r.push_back(as_number(v, "transition entry"));
      p.markov.transition.push_back(std::move(r));
    }
    const Json& em = require(j, "emissions", "process");
    if (!em.is_array()) fail(Errc::config_error, "process.emissions must be an array");
    for (const auto& v : em) {
      if (!v.is_array() || v.size() != 2)
        fail(Errc::config_error, "process.emissions entries must be [delta, price]");
      p.markov.emissions.emplace_back(as_number(v[0], "emission delta"),
                                      as_number(v[1], "emission price"));
    }
    p.markov.initial = static_cast<int>(int_or(j, "initial", 0));
  } else if (type == "trace") {
    expect_keys(j, {"type", "path", "support"}, "process");
    p.type = ProcessSpec::Type::trace;
    p.trace = load_trace_file(str(j, "path", "process"));
  } else {
    fail(Errc::config_error, "unknown process type: " + type);
  }
  if (auto it = j.find("support"); it != j.end()) p.support = parse_support(*it);
  return p;
}

PolicySpec parse_policy(const Json& j) {
  std::string type = str(j, "type", "policy");
  PolicySpec p;
  if (type == "omg") {
    expect_keys(j, {"type", "method", "gamma", "w", "enforce_level_constraint"}, "policy");
    p.type = PolicySpec::Type::omg;
    bool has_gamma = j.contains("gamma"), has_w = j.contains("w");
    if (has_gamma != has_w)
      fail(Errc::config_error, "omg policy needs both gamma and w, or neither");
    if (has_gamma) {
      p.gamma = num(j, "gamma", "policy");
      p.w = num(j, "w", "policy");
      if (j.contains("method"))
        fail(Errc::config_error, "omg policy: give either method or explicit gamma/w, not both");
    } else if (auto it = j.find("method"); it != j.end()) {
      p.method = it->get<std::string>();
      if (p.method != "maxw" && p.method != "mins")
        fail(Errc::config_error, "omg method must be maxw or mins");
    }
    p.enforce_level_constraint = bool_or(j, "enforce_level_constraint", false);
  } else if (type == "greedy") {
    expect_keys(j, {"type"}, "policy");
    p.type = PolicySpec::Type::greedy;
  } else if (type == "no_storage") {
    expect_keys(j, {"type"}, "policy");
    p.type = PolicySpec::Type::no_storage;
  } else if (type == "clairvoyant") {
    expect_keys(j, {"type", "s_grid_points", "u_grid_points"}, "policy");
    p.type = PolicySpec::Type::clairvoyant;
    p.grids.s_points = static_cast<int>(int_or(j, "s_grid_points", 401));
    p.grids.u_points = static_cast<int>(int_or(j, "u_grid_points", 201));
  } else {
    fail(Errc::config_error, "unknown policy type: " + type);
  }
  return p;
}

}  // namespace

SimConfig config_from_json(const Json& j) {
  expect_keys(j,
              {"storage", "cost", "inflow", "process", "policies", "sim", "imbalance_sign",
               "steps_per_hour"},
              "config");
  SimConfig cfg;
  long steps_per_hour = int_or(j, "steps_per_hour", 1);
  if (steps_per_hour < 1) fail(Errc::config_error, "steps_per_hour must be >= 1");

  cfg.storage = parse_storage(require(j, "storage", "config"));
  cfg.cost = parse_cost(require(j, "cost", "config"), static_cast<int>(steps_per_hour));
  if (auto it = j.find("inflow"); it != j.end()) {
    expect_keys(*it, {"f_min", "f_max"}, "inflow");
    cfg.inflow = InflowSet{num(*it, "f_min", "inflow"), num(*it, "f_max", "inflow")};
    validate_inflow(cfg.inflow);
  }
  cfg.process = parse_process(require(j, "process", "config"));
  if (auto it = j.find("policies"); it != j.end()) {
    if (!it->is_array()) fail(Errc::config_error, "policies must be an array");
    for (const auto& pj : *it) cfg.policies.push_back(parse_policy(pj));
  }
  if (auto it = j.find("sim"); it != j.end()) {
    expect_keys(*it, {"t", "s1", "seed", "replications", "keep_trajectories"}, "sim");
    cfg.t_steps = int_or(*it, "t", 0);
    cfg.s1 = num_or(*it, "s1", 0.0);
    cfg.seed = static_cast<uint64_t>(int_or(*it, "seed", 0));
    cfg.replications = static_cast<int>(int_or(*it, "replications", 1));
    cfg.keep_trajectories = bool_or(*it, "keep_trajectories", true);
  }
  cfg.imbalance_sign = num_or(j, "imbalance_sign", 1.0);
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse_error, "cannot open config file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

Json omg_params_to_json(const OmgParams& p) {
  Json j;
  j["gamma"] = p.gamma;
  j["w"] = p.w;
  j["d_lo"] = p.bounds.lo;
  j["d_hi"] = p.bounds.hi;
  j["certified_bound"] = p.certified_bound;
  j["method"] = p.method;
  return j;
}

Json result_to_json(const SimResult& result, const Comparison& comparison) {
  Json j;
  j["seed"] = result.seed;
  j["replications"] = result.replications;
  j["t"] = result.t_steps;
  j["policies"] = Json::array();
  for (const auto& p : result.policies) {
    Json pj;
    pj["name"] = p.name;
    pj["mean_cost"] = p.mean_cost;
    pj["se"] = p.se;
    pj["violations"] = p.violations;
    pj["rep_costs"] = p.rep_costs;
    if (p.omg_params) pj["omg"] = omg_params_to_json(*p.omg_params);
    if (p.vos) {
      Json vj;
      vj["lo"] = p.vos->lo;
      vj["hi"] = p.vos->hi;
      if (p.vos->pct_upper) vj["pct_upper"] = *p.vos->pct_upper;
      pj["vos"] = vj;
    }
    j["policies"].push_back(pj);
  }
  Json cj;
  cj["ranking"] = comparison.ranking;
  cj["pairs"] = Json::array();
  for (const auto& pc : comparison.pairs) {
    Json pj;
    pj["a"] = pc.a;
    pj["b"] = pc.b;
    pj["mean_delta"] = pc.mean_delta;
    pj["se_delta"] = pc.se_delta;
    pj["a_wins"] = pc.a_wins;
    pj["b_wins"] = pc.b_wins;
    pj["ties"] = pc.ties;
    pj["sign_test_p"] = pc.sign_test_p;
    cj["pairs"].push_back(pj);
  }
  j["comparison"] = cj;
  return j;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory) {
  out << "t,s,u,f,delta,price,g\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& p : trajectory) {
    line.str("");
    line << p.t << ',' << p.s << ',' << p.u << ',' << p.f << ',' << p.delta << ',' << p.price
         << ',' << p.g << '\n';
    out << line.str();
  }
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
      out.push_back(c);
    else if (out.empty() || out.back() != '_')
      out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "policy" : out;
}

}  // namespace omg
