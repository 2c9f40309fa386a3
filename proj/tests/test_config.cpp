#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "omg/config.hpp"

using namespace omg;

namespace {

Json base_doc() {
  return Json::parse(R"({
    "storage": {"s_min": 0, "s_max": 100, "u_min": -10, "u_max": 10},
    "cost": {"family": "balancing", "q_plus": 1, "q_minus": 1},
    "process": {"type": "iid",
                "delta": {"dist": "point", "value": 0},
                "price": {"dist": "point", "value": 0}},
    "policies": [{"type": "greedy"}],
    "sim": {"t": 10, "s1": 50}
  })");
}

template <typename E>
Errc code_of(E&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/omg_config_test_" + name) {
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("a full document lands in every config field") {
  Json j = Json::parse(R"({
    "steps_per_hour": 12,
    "imbalance_sign": -1,
    "storage": {"lambda": 0.9975, "s_min": 0, "s_max": 1,
                "u_min": -0.1, "u_max": 0.1, "mu_c": 0.85, "mu_d": 0.9},
    "cost": {"family": "balancing", "q_plus": 1.1, "q_minus": {"day": 3, "night": 1}},
    "inflow": {"f_min": 0, "f_max": 0.2},
    "process": {"type": "iid",
                "delta": {"dist": "laplace", "sigma": 0.149},
                "price": {"dist": "uniform", "lo": 10, "hi": 60},
                "support": {"delta": [-1, 1], "price": [10, 60]}},
    "policies": [
      {"type": "omg", "method": "mins", "enforce_level_constraint": true},
      {"type": "omg", "gamma": -0.6, "w": 2},
      {"type": "greedy"},
      {"type": "no_storage"},
      {"type": "clairvoyant", "s_grid_points": 301, "u_grid_points": 101}
    ],
    "sim": {"t": 500, "s1": 0.5, "seed": 7, "replications": 3, "keep_trajectories": false}
  })");
  SimConfig cfg = config_from_json(j);

  CHECK(cfg.storage.lambda == 0.9975);
  CHECK(cfg.storage.mu_c == 0.85);
  CHECK(cfg.storage.mu_d == 0.9);
  CHECK(cfg.cost.family == CostFamily::balancing);
  CHECK(cfg.cost.steps_per_hour == 12);
  CHECK(cfg.cost.q_plus.at(1) == 1.1);
  CHECK(cfg.cost.q_minus.at(1) == 1.0);        // hour 0: night
  CHECK(cfg.cost.q_minus.at(7 * 12 + 1) == 3.0);  // hour 7: day
  CHECK(cfg.inflow.f_max == 0.2);
  CHECK(cfg.process.type == ProcessSpec::Type::iid);
  REQUIRE(cfg.process.support.has_value());
  CHECK(cfg.process.support->delta_min == -1.0);
  CHECK(cfg.process.support->price_max == 60.0);

  REQUIRE(cfg.policies.size() == 5);
  CHECK(cfg.policies[0].type == PolicySpec::Type::omg);
  CHECK(cfg.policies[0].method == "mins");
  CHECK(cfg.policies[0].enforce_level_constraint);
  REQUIRE(cfg.policies[1].gamma.has_value());
  CHECK(*cfg.policies[1].gamma == -0.6);
  CHECK(*cfg.policies[1].w == 2.0);
  CHECK(cfg.policies[4].grids.s_points == 301);
  CHECK(cfg.policies[4].grids.u_points == 101);

  CHECK(cfg.t_steps == 500);
  CHECK(cfg.s1 == 0.5);
  CHECK(cfg.seed == 7);
  CHECK(cfg.replications == 3);
  CHECK(!cfg.keep_trajectories);
  CHECK(cfg.imbalance_sign == -1.0);
}

TEST_CASE("unknown keys are rejected wherever they appear") {
  auto rejects = [](Json j) { return code_of([&] { config_from_json(j); }) == Errc::config_error; };

  Json j = base_doc();
  j["storag"] = Json::object();
  CHECK(rejects(j));

  j = base_doc();
  j["storage"]["capacity"] = 1;
  CHECK(rejects(j));

  j = base_doc();
  j["cost"]["spread"] = 2;
  CHECK(rejects(j));

  j = base_doc();
  j["process"]["rho"] = 0.5;
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0]["verbose"] = true;
  CHECK(rejects(j));

  j = base_doc();
  j["sim"]["horizon"] = 10;
  CHECK(rejects(j));

  j = base_doc();
  j["inflow"] = Json::parse(R"({"min": 0, "max": 1})");
  CHECK(rejects(j));

  j = base_doc();
  j["process"]["support"] = Json::parse(R"({"delta": [-1, 1], "vol": 2})");
  CHECK(rejects(j));
}

TEST_CASE("scalar type and shape errors are caught") {
  auto rejects = [](Json j) { return code_of([&] { config_from_json(j); }) == Errc::config_error; };

  Json j = base_doc();
  j["storage"]["s_max"] = "high";
  CHECK(rejects(j));

  j = base_doc();
  j["sim"]["t"] = 2.5;
  CHECK(rejects(j));

  j = base_doc();
  j["sim"]["keep_trajectories"] = "yes";
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0]["type"] = 42;
  CHECK(rejects(j));

  j = base_doc();
  j["cost"]["q_plus"] = Json::parse(R"({"day": 2})");  // night missing
  CHECK(rejects(j));

  j = base_doc();
  j["cost"]["q_plus"] = "from_file";
  CHECK(rejects(j));

  j = base_doc();
  j["steps_per_hour"] = 0;
  CHECK(rejects(j));

  j = base_doc();
  j["process"]["support"] = Json::parse(R"({"delta": [1]})");
  CHECK(rejects(j));

  j = base_doc();
  j["process"]["support"] = Json::parse(R"({"delta": [1, -1]})");  // reversed
  CHECK(rejects(j));
}

TEST_CASE("online policies need a method or a full explicit pair") {
  auto rejects = [](Json j) { return code_of([&] { config_from_json(j); }) == Errc::config_error; };

  Json j = base_doc();
  j["policies"][0] = Json::parse(R"({"type": "omg", "gamma": -50})");
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0] = Json::parse(R"({"type": "omg", "w": 2})");
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0] = Json::parse(R"({"type": "omg", "method": "maxw", "gamma": -50, "w": 2})");
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0] = Json::parse(R"({"type": "omg", "method": "genetic"})");
  CHECK(rejects(j));

  j = base_doc();
  j["policies"][0] = Json::parse(R"({"type": "omg", "gamma": -50, "w": 2})");
  SimConfig cfg = config_from_json(j);
  CHECK(cfg.policies[0].label() == "omg[gamma=-50,w=2]");
}

TEST_CASE("joint, markov and trace processes parse") {
  Json j = base_doc();
  j["process"] = Json::parse(R"({"type": "iid", "joint": [[-1, 2], [1, 3]]})");
  SimConfig cfg = config_from_json(j);
  CHECK(cfg.process.iid.use_joint);
  REQUIRE(cfg.process.iid.joint.size() == 2);
  CHECK(cfg.process.iid.joint[1].first == 1.0);

  j = base_doc();
  j["process"] = Json::parse(R"({
    "type": "markov",
    "transition": [[0.5, 0.5], [0.25, 0.75]],
    "emissions": [[-1, 0], [1, 0]],
    "initial": 1
  })");
  cfg = config_from_json(j);
  CHECK(cfg.process.type == ProcessSpec::Type::markov);
  CHECK(cfg.process.markov.initial == 1);
  CHECK(cfg.process.markov.transition[1][0] == 0.25);

  TempFile trace("trace.csv", "t,delta\n1,0.5\n2,-0.5\n");
  j = base_doc();
  j["process"] = Json{{"type", "trace"}, {"path", trace.path}};
  cfg = config_from_json(j);
  CHECK(cfg.process.type == ProcessSpec::Type::trace);
  CHECK(cfg.process.trace.length() == 2);
  CHECK(cfg.process.trace.delta[1] == -0.5);

  j = base_doc();
  j["process"] = Json::parse(R"({"type": "brownian"})");
  CHECK(code_of([&] { config_from_json(j); }) == Errc::config_error);
}

TEST_CASE("config files load strictly") {
  TempFile good("good.json", base_doc().dump());
  SimConfig cfg = load_config_file(good.path);
  CHECK(cfg.t_steps == 10);

  TempFile bad("bad.json", "{ not json");
  CHECK(code_of([&] { load_config_file(bad.path); }) == Errc::parse_error);
  CHECK(code_of([&] { load_config_file("/tmp/omg_config_test_missing.json"); }) ==
        Errc::parse_error);
}

TEST_CASE("result documents carry every reported field") {
  SimConfig cfg;
  cfg.storage = {1.0, 0.0, 100.0, -10.0, 10.0, 1.0, 1.0};
  cfg.cost = CostSpec::balancing(1.0, 1.0);
  cfg.process.type = ProcessSpec::Type::trace;
  cfg.process.trace.delta = {0.5, -0.5};
  PolicySpec omg_policy;
  omg_policy.type = PolicySpec::Type::omg;
  PolicySpec ns;
  ns.type = PolicySpec::Type::no_storage;
  cfg.policies = {omg_policy, ns};
  cfg.s1 = 50.0;
  cfg.seed = 11;
  cfg.replications = 2;

  auto res = run(cfg);
  Json j = result_to_json(res, compare(res));

  CHECK(j["seed"] == 11);
  CHECK(j["replications"] == 2);
  CHECK(j["t"] == 2);
  REQUIRE(j["policies"].size() == 2);
  const Json& pj = j["policies"][0];
  CHECK(pj["name"] == "omg[maxw]");
  CHECK(pj["violations"] == 0);
  CHECK(pj["rep_costs"].size() == 2);
  REQUIRE(pj.contains("omg"));
  CHECK(pj["omg"]["gamma"] == -50.0);
  CHECK(pj["omg"]["w"] == 40.0);  // (s range - u range) / penalty slope range = 80/2
  CHECK(pj["omg"]["method"] == "maxw");
  REQUIRE(pj.contains("vos"));
  CHECK(pj["vos"].contains("lo"));
  CHECK(pj["vos"].contains("hi"));
  CHECK(pj["vos"].contains("pct_upper"));  // baseline cost 0.5 != 0

  const Json& cj = j["comparison"];
  CHECK(cj["ranking"].size() == 2);
  REQUIRE(cj["pairs"].size() == 1);
  for (const char* key : {"a", "b", "mean_delta", "se_delta", "a_wins", "b_wins", "ties",
                          "sign_test_p"})
    CHECK(cj["pairs"][0].contains(key));
}

TEST_CASE("trajectory files are exact") {
  std::vector<TrajectoryPoint> traj{
      {1, 0.5, -0.125, 0.0, 0.25, 30.0, 7.5},
      {2, 0.375, 0.0, 0.5, -0.25, 15.0, 0.0},
  };
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  CHECK(out.str() ==
        "t,s,u,f,delta,price,g\n"
        "1,0.5,-0.125,0,0.25,30,7.5\n"
        "2,0.375,0,0.5,-0.25,15,0\n");
}

TEST_CASE("policy labels map to safe file names") {
  CHECK(sanitize_filename("omg[gamma=-50,w=40]") == "omg_gamma_-50_w_40");
  CHECK(sanitize_filename("no_storage") == "no_storage");
  CHECK(sanitize_filename("greedy") == "greedy");
  CHECK(sanitize_filename("a  b.json") == "a_b.json");
  CHECK(sanitize_filename("???") == "policy");
}
