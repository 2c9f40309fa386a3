#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "omg/config.hpp"
#include "omg/presets.hpp"

namespace py = pybind11;
using namespace omg;

PYBIND11_MODULE(_core, m) {
  m.doc() = "generalized storage control: models, tuning, online policies, simulation";

  py::register_exception<Error>(m, "StorageError");

  py::class_<StorageParams>(m, "StorageParams")
      .def(py::init([](double lambda, double s_min, double s_max, double u_min, double u_max,
                       double mu_c, double mu_d) {
             return StorageParams{lambda, s_min, s_max, u_min, u_max, mu_c, mu_d};
           }),
           py::arg("lambda_") = 1.0, py::arg("s_min") = 0.0, py::arg("s_max") = 0.0,
           py::arg("u_min") = 0.0, py::arg("u_max") = 0.0, py::arg("mu_c") = 1.0,
           py::arg("mu_d") = 1.0)
      .def_readwrite("lambda_", &StorageParams::lambda)
      .def_readwrite("s_min", &StorageParams::s_min)
      .def_readwrite("s_max", &StorageParams::s_max)
      .def_readwrite("u_min", &StorageParams::u_min)
      .def_readwrite("u_max", &StorageParams::u_max)
      .def_readwrite("mu_c", &StorageParams::mu_c)
      .def_readwrite("mu_d", &StorageParams::mu_d);

  py::class_<StorageState>(m, "StorageState")
      .def(py::init([](double s, long t) { return StorageState{s, t}; }), py::arg("s") = 0.0,
           py::arg("t") = 1)
      .def_readwrite("s", &StorageState::s)
      .def_readwrite("t", &StorageState::t);

  py::class_<InflowSet>(m, "InflowSet")
      .def(py::init([](double f_min, double f_max) { return InflowSet{f_min, f_max}; }),
           py::arg("f_min") = 0.0, py::arg("f_max") = 0.0)
      .def_readwrite("f_min", &InflowSet::f_min)
      .def_readwrite("f_max", &InflowSet::f_max);

  py::class_<SupportBounds>(m, "SupportBounds")
      .def(py::init([](double dlo, double dhi, double plo, double phi) {
             return SupportBounds{dlo, dhi, plo, phi};
           }),
           py::arg("delta_min"), py::arg("delta_max"), py::arg("price_min") = 0.0,
           py::arg("price_max") = 0.0)
      .def_readwrite("delta_min", &SupportBounds::delta_min)
      .def_readwrite("delta_max", &SupportBounds::delta_max)
      .def_readwrite("price_min", &SupportBounds::price_min)
      .def_readwrite("price_max", &SupportBounds::price_max);

  py::class_<SubgradientBounds>(m, "SubgradientBounds")
      .def(py::init([](double lo, double hi) { return SubgradientBounds{lo, hi}; }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &SubgradientBounds::lo)
      .def_readwrite("hi", &SubgradientBounds::hi);

  m.def("validate_storage", [](const StorageParams& p) { validate_storage(p); },
        "raise StorageError unless the parameters satisfy the box/feasibility inequalities");
  m.def("convert", &convert, py::arg("u"), py::arg("storage"),
        "grid-side energy h(u) of a storage-side operation");
  m.def("residual_imbalance", &residual_imbalance, py::arg("delta"), py::arg("u"), py::arg("f"),
        py::arg("storage"));
  m.def("step", &step, py::arg("state"), py::arg("u"), py::arg("storage"),
        "advance the level: s' = lambda*s + u, t' = t + 1");

  py::class_<CostSpec>(m, "CostSpec")
      .def_static("arbitrage", &CostSpec::arbitrage)
      .def_static("balancing", &CostSpec::balancing, py::arg("q_plus"), py::arg("q_minus"))
      .def_static("colocated", &CostSpec::colocated)
      .def_static("day_night_deficit", &CostSpec::day_night_deficit, py::arg("day_multiplier"),
                  py::arg("base_rate"), py::arg("steps_per_hour") = 1)
      .def_readwrite("steps_per_hour", &CostSpec::steps_per_hour);

  m.def("evaluate", &evaluate, py::arg("cost"), py::arg("u"), py::arg("f"), py::arg("delta"),
        py::arg("price"), py::arg("t"), py::arg("storage"), "stage cost g(u, f)");
  m.def("subgradient_interval", &subgradient_interval, py::arg("cost"), py::arg("u"),
        py::arg("f"), py::arg("delta"), py::arg("price"), py::arg("t"), py::arg("storage"));
  m.def("global_subgradient_bounds", &global_subgradient_bounds, py::arg("cost"),
        py::arg("support"), py::arg("storage"));

  py::class_<KappaInterval>(m, "KappaInterval")
      .def_readonly("lo", &KappaInterval::lo)
      .def_readonly("hi", &KappaInterval::hi);

  py::class_<OmgParams>(m, "OmgParams")
      .def(py::init([](double gamma, double w, SubgradientBounds d) {
             return OmgParams{gamma, w, d, 0.0, "explicit"};
           }),
           py::arg("gamma"), py::arg("w"), py::arg("bounds"))
      .def_readwrite("gamma", &OmgParams::gamma)
      .def_readwrite("w", &OmgParams::w)
      .def_readwrite("bounds", &OmgParams::bounds)
      .def_readonly("certified_bound", &OmgParams::certified_bound)
      .def_readonly("method", &OmgParams::method);

  m.def("kappa_interval", &kappa_interval, py::arg("storage"), py::arg("bounds"), py::arg("w"));
  m.def("w_max", &w_max, py::arg("storage"), py::arg("bounds"));
  m.def("subopt_bound", &subopt_bound, py::arg("storage"), py::arg("gamma"), py::arg("w"));
  m.def("tune_max_weight", &tune_max_weight, py::arg("storage"), py::arg("bounds"));
  m.def("tune_min_bound",
        [](const StorageParams& p, const SubgradientBounds& d) { return tune_min_bound(p, d); },
        py::arg("storage"), py::arg("bounds"));

  py::class_<MarkovChain>(m, "MarkovChain")
      .def(py::init([](std::vector<std::vector<double>> transition,
                       std::vector<std::pair<double, double>> emissions, int initial) {
             MarkovChain c;
             c.transition = std::move(transition);
             c.emissions = std::move(emissions);
             c.initial = initial;
             c.validate();
             return c;
           }),
           py::arg("transition"), py::arg("emissions"), py::arg("initial") = 0);

  py::class_<EpochStats>(m, "EpochStats")
      .def_readonly("mean_dt", &EpochStats::mean_dt)
      .def_readonly("mean_dt2", &EpochStats::mean_dt2)
      .def_readonly("mean_lambda_dt", &EpochStats::mean_lambda_dt);

  m.def("markov_epoch_stats", &markov_epoch_stats, py::arg("chain"), py::arg("return_state"),
        py::arg("lambda_"));
  m.def("markov_bound", &markov_bound, py::arg("storage"), py::arg("gamma"), py::arg("w"),
        py::arg("stats"));

  py::class_<VosEstimate>(m, "VosEstimate")
      .def_readonly("lo", &VosEstimate::lo)
      .def_readonly("hi", &VosEstimate::hi)
      .def_readonly("pct_upper", &VosEstimate::pct_upper);
  m.def("vos_interval", &vos_interval, py::arg("j_no_storage"), py::arg("j_omg"),
        py::arg("bound"));

  py::class_<Decision>(m, "Decision")
      .def_readonly("u", &Decision::u)
      .def_readonly("f", &Decision::f)
      .def_readonly("objective", &Decision::objective);

  m.def("omg_step", &omg_step, py::arg("state"), py::arg("delta"), py::arg("price"),
        py::arg("cost"), py::arg("storage"), py::arg("inflow"), py::arg("params"),
        py::arg("enforce_level_constraint") = false);
  m.def("greedy_step", &greedy_step, py::arg("state"), py::arg("delta"), py::arg("price"),
        py::arg("cost"), py::arg("storage"), py::arg("inflow"));
  m.def("no_storage_step", &no_storage_step, py::arg("state"), py::arg("delta"),
        py::arg("price"), py::arg("cost"), py::arg("storage"), py::arg("inflow"));
  m.def("clairvoyant_plan",
        [](const std::vector<std::pair<double, double>>& trace, double s1, const CostSpec& cost,
           const StorageParams& storage, const InflowSet& inflow, int s_points, int u_points) {
          return clairvoyant_plan({trace.data(), trace.size()}, s1, cost, storage, inflow,
                                  ClairvoyantGrids{s_points, u_points});
        },
        py::arg("trace"), py::arg("s1"), py::arg("cost"), py::arg("storage"), py::arg("inflow"),
        py::arg("s_points") = 401, py::arg("u_points") = 201);

  m.def("run_simulation_json",
        [](const std::string& config_json) {
          SimConfig cfg = config_from_json(Json::parse(config_json));
          SimResult result = run(cfg);
          return result_to_json(result, compare(result)).dump();
        },
        py::arg("config_json"),
        "run the full simulation described by a JSON config string; returns a JSON result");

  m.def("reproduce_json",
        [](const std::string& name) {
          ReproduceReport rep = run_reproduce(name);
          Json j;
          j["experiment"] = rep.experiment;
          j["all_pass"] = rep.all_pass();
          j["note"] = rep.note;
          j["checks"] = Json::array();
          for (const auto& c : rep.checks)
            j["checks"].push_back(
                {{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}});
          j["result"] = result_to_json(rep.result, rep.comparison);
          return j.dump();
        },
        py::arg("name"), "run a built-in benchmark experiment; returns a JSON report");
}
