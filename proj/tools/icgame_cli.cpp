// icgame: analyze, solve, sweep and simulate power-allocation games on
// Gaussian interference channels.
//
// Exit codes: 0 success, 1 invalid configuration or arguments,
// 2 a solver did not converge (outputs are still written).

#include "icgame/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::string solver;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory (overrides output.dir)");
  cmd->add_option("--format", f.format, "Write only this format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Seed for multi-start and Monte-Carlo draws");
  cmd->add_option("--solver", f.solver, "Solver selection")
      ->check(CLI::IsMember({"iwf", "vi", "pareto", "all"}));
}

icg::ExperimentConfig resolve(const Flags& f) {
  auto cfg = icg::load_config_file(f.config);
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (!f.format.empty()) cfg.output.formats = {f.format};
  if (!f.solver.empty()) cfg.solver = icg::solver_from_string(f.solver);
  if (f.seed) {
    cfg.pareto.seed = *f.seed;
    if (!cfg.simulate) cfg.simulate = icg::SimulateSettings{};
    cfg.simulate->seed = *f.seed;
  }
  return cfg;
}

void write_file(const fs::path& dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << content;
}

void write_json(const icg::ExperimentConfig& cfg, const std::string& name,
                const nlohmann::json& j) {
  if (cfg.output.wants("json")) write_file(cfg.output.dir, name, j.dump(2) + "\n");
}

void write_csv(const icg::ExperimentConfig& cfg, const std::string& name,
               const std::string& csv) {
  if (cfg.output.wants("csv")) write_file(cfg.output.dir, name, csv);
}

void write_solver_csvs(const icg::ExperimentConfig& cfg, const icg::RunResult& r) {
  if (!cfg.output.wants("csv")) return;
  const auto space = icg::enumerate_states(cfg.game, cfg.state_cap);
  write_csv(cfg, "sum_rates.csv", icg::sum_rates_csv(r));
  write_csv(cfg, "rates.csv", icg::rates_csv(r));
  write_csv(cfg, "profiles.csv", icg::profiles_csv(r, space));
  if (r.vi) write_csv(cfg, "eps_path.csv", icg::eps_path_csv(*r.vi));
  if (r.pareto) write_csv(cfg, "pareto_starts.csv", icg::pareto_starts_csv(*r.pareto));
}

void print_summary(const icg::RunResult& r) {
  for (const auto& s : r.summaries) {
    std::cout << s.solver << ": sum rate " << icg::format_number(s.sum_rate)
              << " nats" << (s.converged ? "" : " (not converged)") << "\n";
  }
}

int status(const icg::RunResult& r) {
  if (r.all_converged()) return 0;
  std::cerr << "warning: at least one solver did not converge\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium and Pareto power allocation for Gaussian interference channels"};
  app.require_subcommand(1);
  Flags flags;
  auto* analyze = app.add_subcommand("analyze", "Spectral uniqueness/convergence conditions");
  auto* solve = app.add_subcommand("solve", "Run the selected solvers once");
  auto* sweep = app.add_subcommand("sweep", "Re-solve over a common power budget axis");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo check of a stationary policy");
  for (auto* cmd : {analyze, solve, sweep, simulate}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve(flags);
    if (analyze->parsed()) {
      const auto report = icg::run_analyze(cfg);
      write_json(cfg, "conditions.json", icg::to_json(report));
      write_csv(cfg, "conditions.csv", icg::conditions_csv(report));
      std::cout << icg::conditions_csv(report);
      return 0;
    }
    if (solve->parsed()) {
      const auto r = icg::run_solve(cfg);
      write_json(cfg, "result.json", icg::to_json(r));
      write_solver_csvs(cfg, r);
      print_summary(r);
      return status(r);
    }
    if (sweep->parsed()) {
      auto with_axis = cfg;
      if (!with_axis.sweep) with_axis.sweep = icg::SweepAxis{"pbar", icg::default_sweep_values()};
      const auto r = icg::run_sweep(with_axis);
      write_json(cfg, "result.json", icg::to_json(r));
      write_csv(cfg, "sweep.csv", icg::sum_rates_csv(r));
      std::cout << icg::sum_rates_csv(r);
      return status(r);
    }
    const auto r = icg::run_simulate_experiment(cfg);
    write_json(cfg, "result.json", icg::to_json(r));
    write_csv(cfg, "monte_carlo.csv", icg::monte_carlo_csv(*r.monte_carlo));
    write_csv(cfg, "rates.csv", icg::rates_csv(r));
    std::cout << icg::monte_carlo_csv(*r.monte_carlo);
    return status(r);
  } catch (const icg::ConfigParseError& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
  } catch (const icg::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
  } catch (const icg::StateSpaceTooLarge& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}
