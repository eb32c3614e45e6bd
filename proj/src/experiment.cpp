#include "icgame/experiment.hpp"

#include "icgame/random.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace icg {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool RunResult::all_converged() const {
  if (iwf && !iwf->converged) return false;
  if (vi && !vi->converged) return false;
  if (pareto && !pareto->converged) return false;
  for (const auto& row : sum_rates)
    if (!row.converged) return false;
  return true;
}

double budget_label(const GameSpec& spec) {
  double total = 0.0;
  for (double b : spec.pbar) total += b;
  return total / static_cast<double>(spec.pbar.size());
}

ConditionReport run_analyze(const ExperimentConfig& cfg) {
  const auto space = enumerate_states(cfg.game, cfg.state_cap);
  return analyze_conditions(cfg.game, build_operator(cfg.game, space));
}

namespace {

bool wants(SolverChoice chosen, SolverChoice s) {
  return chosen == SolverChoice::all || chosen == s;
}

SolverSummary summarize(const std::string& name, const GameSpec& spec,
                        const StateSpace& space, const PowerProfile& prof,
                        bool converged) {
  SolverSummary s;
  s.solver = name;
  s.profile = prof;
  for (int i = 0; i < spec.players; ++i) {
    s.rates.push_back(expected_rate(spec, space, prof, i));
    s.powers.push_back(average_power(space, prof, i));
  }
  s.sum_rate = 0.0;
  for (double r : s.rates) s.sum_rate += r;
  s.converged = converged;
  return s;
}

/// Runs the selected solvers on one game; fills reports, summaries and a
/// single sum-rate row.
void solve_into(const ExperimentConfig& cfg, const GameSpec& spec,
                const StateSpace& space, RunResult& out) {
  SumRateRow row;
  row.sweep_value = budget_label(spec);
  if (wants(cfg.solver, SolverChoice::iwf)) {
    auto rep = iterate_waterfilling(spec, space, constant_profile(spec, space), cfg.iwf);
    out.summaries.push_back(summarize("iwf", spec, space, rep.profile, rep.converged));
    row.ne_iwf = out.summaries.back().sum_rate;
    row.converged = row.converged && rep.converged;
    out.iwf = std::move(rep);
  }
  if (wants(cfg.solver, SolverChoice::vi)) {
    auto rep = solve_regularized(ViProblem::from_game(spec, space), cfg.vi);
    out.summaries.push_back(summarize("vi", spec, space, rep.solution, rep.converged));
    row.ne_vi = out.summaries.back().sum_rate;
    row.converged = row.converged && rep.converged;
    out.vi = std::move(rep);
  }
  if (wants(cfg.solver, SolverChoice::pareto)) {
    auto rep = multi_start(spec, space, cfg.pareto);
    out.summaries.push_back(summarize("pareto", spec, space, rep.best, rep.converged));
    row.pareto = out.summaries.back().sum_rate;
    row.converged = row.converged && rep.converged;
    out.pareto = std::move(rep);
  }
  out.sum_rates.push_back(row);
}

}  // namespace

RunResult run_solve(const ExperimentConfig& cfg) {
  const auto space = enumerate_states(cfg.game, cfg.state_cap);
  RunResult out;
  out.conditions = analyze_conditions(cfg.game, build_operator(cfg.game, space));
  solve_into(cfg, cfg.game, space, out);
  return out;
}

RunResult run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) throw ValidationError("sweep", "config has no sweep section");
  const auto space = enumerate_states(cfg.game, cfg.state_cap);
  RunResult out;
  out.conditions = analyze_conditions(cfg.game, build_operator(cfg.game, space));
  for (double value : cfg.sweep->values) {
    GameSpec spec = cfg.game;
    spec.pbar.assign(spec.pbar.size(), value);
    RunResult point;
    solve_into(cfg, spec, space, point);
    out.sum_rates.push_back(point.sum_rates.front());
  }
  return out;
}

MonteCarloSummary run_simulate(const ExperimentConfig& cfg,
                               const PowerProfile& profile) {
  const GameSpec& spec = cfg.game;
  const auto space = enumerate_states(spec, cfg.state_cap);
  const SimulateSettings settings = cfg.simulate.value_or(SimulateSettings{});
  if (profile.rows() != spec.players ||
      profile.cols() != static_cast<Eigen::Index>(space.size()))
    throw std::invalid_argument("run_simulate: profile shape does not match the game");

  const int n = spec.players;
  Rng rng(settings.seed);
  std::vector<std::size_t> digits(static_cast<std::size_t>(n * n));
  Matrix gains(n, n);
  Vector rate_sum = Vector::Zero(n);
  Vector power_sum = Vector::Zero(n);
  for (std::uint64_t slot = 0; slot < settings.slots; ++slot) {
    for (int rx = 0; rx < n; ++rx) {
      for (int tx = 0; tx < n; ++tx) {
        const std::size_t k = static_cast<std::size_t>(rx * n + tx);
        digits[k] = rng.categorical(spec.dists.link(rx, tx));
        gains(rx, tx) = (rx == tx ? spec.gains.direct : spec.gains.cross)[digits[k]];
      }
    }
    const auto col = static_cast<Eigen::Index>(space.index_of(digits));
    const ChannelState state{gains};
    for (int i = 0; i < n; ++i) {
      rate_sum[i] += std::log1p(sinr(spec, state, profile.col(col), i));
      power_sum[i] += profile(i, col);
    }
  }

  MonteCarloSummary mc;
  mc.slots = settings.slots;
  mc.seed = settings.seed;
  const double slots = static_cast<double>(settings.slots);
  auto rel_gap = [](double emp, double ref) {
    return ref != 0.0 ? std::abs(emp - ref) / std::abs(ref) : std::abs(emp);
  };
  for (int i = 0; i < n; ++i) {
    PlayerMonteCarlo p;
    p.empirical_rate = rate_sum[i] / slots;
    p.analytic_rate = expected_rate(spec, space, profile, i);
    p.rate_rel_gap = rel_gap(p.empirical_rate, p.analytic_rate);
    p.empirical_power = power_sum[i] / slots;
    p.analytic_power = average_power(space, profile, i);
    p.power_rel_gap = rel_gap(p.empirical_power, p.analytic_power);
    mc.players.push_back(p);
  }
  return mc;
}

RunResult run_simulate_experiment(const ExperimentConfig& cfg) {
  ExperimentConfig single = cfg;
  if (single.solver == SolverChoice::all) single.solver = SolverChoice::vi;
  RunResult out = run_solve(single);
  const SolverSummary& chosen = out.summaries.front();
  out.monte_carlo = run_simulate(cfg, chosen.profile);
  out.monte_carlo->policy = chosen.solver;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json profile_json(const PowerProfile& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index h = 0; h < p.cols(); ++h) row.push_back(p(i, h));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const ConditionReport& r) {
  return {{"rho_smax", r.rho_smax},         {"rho_hhat", r.rho_hhat},
          {"ratio_bound", r.ratio_bound},   {"contraction_ok", r.contraction_ok},
          {"htilde_psd", r.htilde_psd},     {"htilde_pd", r.htilde_pd},
          {"min_sym_eig", r.min_sym_eig}};
}

json to_json(const RunResult& r) {
  json out;
  out["units"] = {{"rate", "nats"}, {"power", "same units as pbar"}};
  out["conditions"] = to_json(r.conditions);

  json solvers = json::object();
  for (const auto& s : r.summaries) {
    json j = {{"converged", s.converged},
              {"sum_rate", s.sum_rate},
              {"rates", s.rates},
              {"average_powers", s.powers},
              {"profile", profile_json(s.profile)}};
    if (s.solver == "iwf" && r.iwf) {
      j["scheme"] = std::string(to_string(r.iwf->scheme));
      j["iterations"] = r.iwf->iterations;
      j["residual_history"] = r.iwf->residual_history;
    } else if (s.solver == "vi" && r.vi) {
      json path = json::array();
      for (const auto& e : r.vi->eps_path)
        path.push_back({{"eps", e.eps},
                        {"inner_iterations", e.inner_iterations},
                        {"natural_residual", e.natural_residual}});
      j["eps_path"] = std::move(path);
      j["tau_used"] = r.vi->tau_used;
      j["guaranteed"] = r.vi->guaranteed;
    } else if (s.solver == "pareto" && r.pareto) {
      json starts = json::array();
      for (const auto& st : r.pareto->per_start)
        starts.push_back({{"sum_rate", st.sum_rate},
                          {"outer_iterations", st.outer_iterations},
                          {"residuals", vector_json(st.residuals)},
                          {"multipliers", vector_json(st.lambdas)},
                          {"converged", st.converged},
                          {"feasible", st.feasible}});
      j["per_start"] = std::move(starts);
      j["best_start"] = r.pareto->best_start;
      j["multipliers"] = vector_json(r.pareto->multipliers);
    }
    solvers[s.solver] = std::move(j);
  }
  out["solvers"] = std::move(solvers);

  json table = json::array();
  for (const auto& row : r.sum_rates)
    table.push_back({{"pbar", row.sweep_value},
                     {"ne_iwf", optional_json(row.ne_iwf)},
                     {"ne_vi", optional_json(row.ne_vi)},
                     {"pareto", optional_json(row.pareto)},
                     {"converged", row.converged}});
  out["sum_rates"] = std::move(table);

  if (r.monte_carlo) {
    json players = json::array();
    for (const auto& p : r.monte_carlo->players)
      players.push_back({{"empirical_rate", p.empirical_rate},
                         {"analytic_rate", p.analytic_rate},
                         {"rate_rel_gap", p.rate_rel_gap},
                         {"empirical_power", p.empirical_power},
                         {"analytic_power", p.analytic_power},
                         {"power_rel_gap", p.power_rel_gap}});
    out["monte_carlo"] = {{"slots", r.monte_carlo->slots},
                          {"seed", r.monte_carlo->seed},
                          {"policy", r.monte_carlo->policy},
                          {"players", std::move(players)}};
  }
  out["converged"] = r.all_converged();
  return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string conditions_csv(const ConditionReport& r) {
  std::ostringstream os;
  os << "quantity,value\n"
     << "rho_smax," << format_number(r.rho_smax) << "\n"
     << "rho_hhat," << format_number(r.rho_hhat) << "\n"
     << "ratio_bound," << format_number(r.ratio_bound) << "\n"
     << "contraction_ok," << (r.contraction_ok ? 1 : 0) << "\n"
     << "htilde_psd," << (r.htilde_psd ? 1 : 0) << "\n"
     << "htilde_pd," << (r.htilde_pd ? 1 : 0) << "\n"
     << "min_sym_eig," << format_number(r.min_sym_eig) << "\n";
  return os.str();
}

std::string sum_rates_csv(const RunResult& r) {
  auto cell = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
  };
  std::ostringstream os;
  os << "pbar,ne_iwf,ne_vi,pareto\n";
  for (const auto& row : r.sum_rates)
    os << format_number(row.sweep_value) << ',' << cell(row.ne_iwf) << ','
       << cell(row.ne_vi) << ',' << cell(row.pareto) << '\n';
  return os.str();
}

std::string rates_csv(const RunResult& r) {
  std::ostringstream os;
  os << "solver,player,rate_nats,average_power,converged\n";
  for (const auto& s : r.summaries)
    for (std::size_t i = 0; i < s.rates.size(); ++i)
      os << s.solver << ',' << i << ',' << format_number(s.rates[i]) << ','
         << format_number(s.powers[i]) << ',' << (s.converged ? 1 : 0) << '\n';
  return os.str();
}

std::string profiles_csv(const RunResult& r, const StateSpace& space) {
  std::ostringstream os;
  os << "solver,player,state,probability,power\n";
  for (const auto& s : r.summaries)
    for (Eigen::Index i = 0; i < s.profile.rows(); ++i)
      for (Eigen::Index h = 0; h < s.profile.cols(); ++h)
        os << s.solver << ',' << i << ',' << h << ','
           << format_number(space.probs[h]) << ',' << format_number(s.profile(i, h))
           << '\n';
  return os.str();
}

std::string eps_path_csv(const ViReport& r) {
  std::ostringstream os;
  os << "eps,inner_iterations,natural_residual\n";
  for (const auto& e : r.eps_path)
    os << format_number(e.eps) << ',' << e.inner_iterations << ','
       << format_number(e.natural_residual) << '\n';
  return os.str();
}

std::string pareto_starts_csv(const ParetoReport& r) {
  std::ostringstream os;
  os << "start,sum_rate_nats,outer_iterations,max_abs_residual,converged,feasible\n";
  for (std::size_t k = 0; k < r.per_start.size(); ++k) {
    const auto& s = r.per_start[k];
    const double res = s.residuals.size() ? s.residuals.cwiseAbs().maxCoeff() : 0.0;
    os << k << ',' << format_number(s.sum_rate) << ',' << s.outer_iterations << ','
       << format_number(res) << ',' << (s.converged ? 1 : 0) << ','
       << (s.feasible ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string monte_carlo_csv(const MonteCarloSummary& m) {
  std::ostringstream os;
  os << "player,empirical_rate_nats,analytic_rate_nats,rate_rel_gap,"
        "empirical_power,analytic_power,power_rel_gap\n";
  for (std::size_t i = 0; i < m.players.size(); ++i) {
    const auto& p = m.players[i];
    os << i << ',' << format_number(p.empirical_rate) << ','
       << format_number(p.analytic_rate) << ',' << format_number(p.rate_rel_gap)
       << ',' << format_number(p.empirical_power) << ','
       << format_number(p.analytic_power) << ',' << format_number(p.power_rel_gap)
       << '\n';
  }
  return os.str();
}

}  // namespace icg
