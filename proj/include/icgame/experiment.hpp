#pragma once

// Experiment configuration, orchestration and result emission.

#include "icgame/game.hpp"
#include "icgame/pareto.hpp"
#include "icgame/spectral.hpp"
#include "icgame/vi_solver.hpp"
#include "icgame/waterfill.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace icg {

enum class SolverChoice { iwf, vi, pareto, all };

std::string_view to_string(SolverChoice s);
SolverChoice solver_from_string(std::string_view s);

struct SweepAxis {
  std::string parameter = "pbar";
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

struct SimulateSettings {
  std::uint64_t slots = 1000000;
  std::uint64_t seed = 7;

  bool operator==(const SimulateSettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool wants(std::string_view fmt) const;
  bool operator==(const OutputSettings&) const = default;
};

struct ExperimentConfig {
  GameSpec game;
  std::size_t state_cap = kDefaultStateCap;
  SolverChoice solver = SolverChoice::all;
  IwfOptions iwf;
  ViOptions vi;
  AlConfig pareto;
  std::optional<SweepAxis> sweep;
  std::optional<SimulateSettings> simulate;
  OutputSettings output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Malformed config text; carries the 1-based position of the problem.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Eight common budgets used when a sweep gives no explicit values.
std::vector<double> default_sweep_values();

/// Parses and validates a JSON config (grammar in README.md). Throws
/// ConfigParseError for malformed text and ValidationError naming the
/// offending field for unknown keys, wrong types or invalid values.
ExperimentConfig load_config(std::string_view text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Canonical JSON form; load_config(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& cfg);

struct SolverSummary {
  std::string solver;
  PowerProfile profile;
  std::vector<double> rates;   // nats per player
  std::vector<double> powers;  // average power per player
  double sum_rate = 0.0;
  bool converged = false;
};

struct SumRateRow {
  double sweep_value = 0.0;
  std::optional<double> ne_iwf;
  std::optional<double> ne_vi;
  std::optional<double> pareto;
  bool converged = true;  // every solver run at this point converged
};

struct PlayerMonteCarlo {
  double empirical_rate = 0.0;
  double analytic_rate = 0.0;
  double rate_rel_gap = 0.0;
  double empirical_power = 0.0;
  double analytic_power = 0.0;
  double power_rel_gap = 0.0;
};

struct MonteCarloSummary {
  std::uint64_t slots = 0;
  std::uint64_t seed = 0;
  std::string policy;
  std::vector<PlayerMonteCarlo> players;
};

struct RunResult {
  ConditionReport conditions;
  std::optional<IwfReport> iwf;
  std::optional<ViReport> vi;
  std::optional<ParetoReport> pareto;
  std::vector<SolverSummary> summaries;
  std::vector<SumRateRow> sum_rates;
  std::optional<MonteCarloSummary> monte_carlo;

  bool all_converged() const;
};

/// Budget value shown in sum-rate tables: the common budget when all
/// players share one, otherwise the mean.
double budget_label(const GameSpec& spec);

ConditionReport run_analyze(const ExperimentConfig& cfg);

/// Runs the selected solvers once. Non-convergence is flagged in the
/// result, never thrown.
RunResult run_solve(const ExperimentConfig& cfg);

/// Re-solves at every sweep value (common budget for all players).
/// Throws ValidationError when the config has no sweep section.
RunResult run_sweep(const ExperimentConfig& cfg);

/// Draws i.i.d. channel states slot by slot and applies the stationary
/// policy `profile`, comparing time averages with the analytic values.
MonteCarloSummary run_simulate(const ExperimentConfig& cfg,
                               const PowerProfile& profile);

/// Profile used by the simulate subcommand: the NE from the VI solver,
/// or the solver named by cfg.solver when it is iwf or pareto.
RunResult run_simulate_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const RunResult& r);

std::string conditions_csv(const ConditionReport& r);
std::string sum_rates_csv(const RunResult& r);
std::string rates_csv(const RunResult& r);
std::string profiles_csv(const RunResult& r, const StateSpace& space);
std::string eps_path_csv(const ViReport& r);
std::string pareto_starts_csv(const ParetoReport& r);
std::string monte_carlo_csv(const MonteCarloSummary& m);

/// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_number(double v);

}  // namespace icg
