// omg: tune storage-control parameters, run simulations, and reproduce the
// built-in benchmark experiments from a JSON config.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "omg/config.hpp"
#include "omg/presets.hpp"
#include "omg/tuning.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(omg::Errc code) {
  switch (code) {
    case omg::Errc::numerical_failure:
    case omg::Errc::feasibility_violation:
    case omg::Errc::zero_baseline:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

// Penalty schedules declared as "from_trace" only have values once the trace
// is attached; resolve them here so tuning sees real numbers.
void resolve_trace_schedules(omg::SimConfig& cfg) {
  using omg::PenaltySchedule;
  if (cfg.cost.family != omg::CostFamily::balancing) return;
  bool wants = cfg.cost.q_plus.kind() == PenaltySchedule::Kind::from_trace ||
               cfg.cost.q_minus.kind() == PenaltySchedule::Kind::from_trace;
  if (!wants) return;
  if (cfg.process.type != omg::ProcessSpec::Type::trace || !cfg.process.trace.has_penalties)
    omg::fail(omg::Errc::missing_column,
              "balancing schedule says from_trace but no trace penalty columns are available");
  if (cfg.cost.q_plus.kind() == PenaltySchedule::Kind::from_trace)
    cfg.cost.q_plus = PenaltySchedule::series(cfg.process.trace.q_plus);
  if (cfg.cost.q_minus.kind() == PenaltySchedule::Kind::from_trace)
    cfg.cost.q_minus = PenaltySchedule::series(cfg.process.trace.q_minus);
  omg::validate_cost(cfg.cost);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) omg::fail(omg::Errc::config_error, "cannot write " + path);
  out << text;
}

int cmd_tune(const std::string& config_path, const std::string& method,
             const std::string& out_path) {
  omg::SimConfig cfg = omg::load_config_file(config_path);
  resolve_trace_schedules(cfg);
  omg::validate_storage(cfg.storage);
  omg::SupportBounds support = omg::resolve_support(cfg.process);
  omg::SubgradientBounds d = omg::global_subgradient_bounds(cfg.cost, support, cfg.storage);
  omg::OmgParams params = method == "mins" ? omg::tune_min_bound(cfg.storage, d)
                                           : omg::tune_max_weight(cfg.storage, d);
  std::string text = omg::omg_params_to_json(params).dump(2) + "\n";
  if (!out_path.empty())
    write_text(out_path, text);
  else
    std::cout << text;
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, std::optional<uint64_t> seed,
                 std::optional<int> replications, const std::string& out_dir,
                 bool enforce_level) {
  omg::SimConfig cfg = omg::load_config_file(config_path);
  if (seed) cfg.seed = *seed;
  if (replications) cfg.replications = *replications;
  if (enforce_level)
    for (auto& p : cfg.policies)
      if (p.type == omg::PolicySpec::Type::omg) p.enforce_level_constraint = true;

  omg::SimResult result = omg::run(cfg);
  omg::Comparison cmp = omg::compare(result);
  std::string text = omg::result_to_json(result, cmp).dump(2) + "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/result.json", text);
    for (const auto& p : result.policies) {
      if (p.trajectory.empty()) continue;
      std::ofstream csv(out_dir + "/trajectory_" + omg::sanitize_filename(p.name) + ".csv");
      omg::write_trajectory_csv(csv, p.trajectory);
    }
  } else {
    std::cout << text;
  }
  long violations = 0;
  for (const auto& p : result.policies) violations += p.violations;
  if (violations > 0) {
    std::cerr << "error: " << violations
              << " replication(s) aborted on a storage-level violation\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_reproduce(const std::string& name) {
  omg::ReproduceReport report = omg::run_reproduce(name);
  std::printf("experiment %s: T=%ld, %d replications, seed %llu\n", report.experiment.c_str(),
              report.result.t_steps, report.result.replications,
              static_cast<unsigned long long>(report.result.seed));
  std::printf("%-24s %14s %12s %12s\n", "policy", "mean_cost", "std_err", "bound");
  for (const auto& p : report.result.policies) {
    if (p.omg_params)
      std::printf("%-24s %14.6f %12.6f %12.6f\n", p.name.c_str(), p.mean_cost, p.se,
                  p.omg_params->certified_bound);
    else
      std::printf("%-24s %14.6f %12.6f %12s\n", p.name.c_str(), p.mean_cost, p.se, "-");
  }
  for (const auto& p : report.result.policies)
    if (p.vos)
      std::printf("value of storage via %s: [%.6f, %.6f]\n", p.name.c_str(), p.vos->lo,
                  p.vos->hi);
  std::printf("\n");
  for (const auto& c : report.checks)
    std::printf("%-50s %s   (%.6g vs %.6g)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.lhs,
                c.rhs);
  if (!report.note.empty()) std::printf("\nnote: %s\n", report.note.c_str());
  return report.all_pass() ? kExitOk : kExitRuntime;
}

int cmd_bound_sweep(const std::string& config_path, const std::string& rho_range,
                    const std::string& method, const std::string& out_path) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  if (std::sscanf(rho_range.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1 || lo <= 1.0 ||
      hi < lo)
    omg::fail(omg::Errc::config_error,
              "--rho-range must be LO:HI:N with 1 < LO <= HI and N >= 1");

  omg::SimConfig cfg = omg::load_config_file(config_path);
  resolve_trace_schedules(cfg);
  omg::SupportBounds support = omg::resolve_support(cfg.process);

  std::string csv = "rho,bound\n";
  double prev = 0.0;
  bool monotone = true;
  for (int i = 0; i < n; ++i) {
    double rho = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    omg::StorageParams sp = cfg.storage;
    sp.s_max = sp.s_min + rho * (sp.u_max - sp.u_min);  // capacity ratio sweep
    omg::validate_storage(sp);
    omg::SubgradientBounds d = omg::global_subgradient_bounds(cfg.cost, support, sp);
    omg::OmgParams params =
        method == "mins" ? omg::tune_min_bound(sp, d) : omg::tune_max_weight(sp, d);
    char line[64];
    std::snprintf(line, sizeof line, "%.10g,%.12g\n", rho, params.certified_bound);
    csv += line;
    if (i > 0 && params.certified_bound > prev + 1e-12) monotone = false;
    prev = params.certified_bound;
  }
  if (!out_path.empty())
    write_text(out_path, csv);
  else
    std::cout << csv;
  if (cfg.storage.lambda == 1.0 && !monotone) {
    std::cerr << "error: bound increased along the capacity sweep despite lambda = 1\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized storage control: tuning, simulation, benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out_path, method = "maxw", rho_range, experiment;
  std::optional<uint64_t> seed;
  std::optional<int> replications;
  bool enforce_level = false;

  CLI::App* tune = app.add_subcommand("tune", "compute control parameters (gamma, w)");
  tune->add_option("--config", config_path, "JSON config")->required();
  tune->add_option("--method", method, "maxw | mins")
      ->check(CLI::IsMember({"maxw", "mins"}));
  tune->add_option("--out", out_path, "write JSON here instead of stdout");

  CLI::App* sim = app.add_subcommand("simulate", "run the configured policies");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--seed", seed, "override sim.seed");
  sim->add_option("--replications", replications, "override sim.replications");
  sim->add_option("--out", out_path, "directory for result.json + trajectory CSVs");
  sim->add_flag("--enforce-level-constraint", enforce_level,
                "clip online decisions to keep the level inside its box");

  CLI::App* rep = app.add_subcommand("reproduce", "run a built-in benchmark experiment");
  rep->add_option("experiment", experiment, "exp1 | exp2 | exp3-synthetic")->required();

  CLI::App* sweep = app.add_subcommand("bound-sweep",
                                       "certified bound vs storage capacity ratio");
  sweep->add_option("--config", config_path, "JSON config")->required();
  sweep->add_option("--rho-range", rho_range, "LO:HI:N capacity ratios")->required();
  sweep->add_option("--method", method, "maxw | mins")
      ->check(CLI::IsMember({"maxw", "mins"}));
  sweep->add_option("--out", out_path, "write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tune->parsed()) return cmd_tune(config_path, method, out_path);
    if (sim->parsed())
      return cmd_simulate(config_path, seed, replications, out_path, enforce_level);
    if (rep->parsed()) return cmd_reproduce(experiment);
    if (sweep->parsed()) return cmd_bound_sweep(config_path, rho_range, method, out_path);
  } catch (const omg::Error& e) {
    std::cerr << "error [" << omg::errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
