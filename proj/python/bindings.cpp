#include "icgame/experiment.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace icg;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

PowerProfile start_or_default(const GameSpec& spec, const StateSpace& space,
                              const std::optional<PowerProfile>& init) {
  return init ? *init : constant_profile(spec, space);
}

py::dict profile_dict(const PowerProfile& p, const GameSpec& spec, const StateSpace& space) {
  py::dict d;
  d["profile"] = p;
  d["sum_rate"] = sum_rate(spec, space, p);
  std::vector<double> rates;
  for (int i = 0; i < spec.players; ++i) rates.push_back(expected_rate(spec, space, p, i));
  d["rates"] = rates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Power-allocation games on Gaussian interference channels";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<StateSpaceTooLarge>(m, "StateSpaceTooLarge", PyExc_ValueError);
  py::register_exception<ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);

  py::class_<GameSpec>(m, "GameSpec")
      .def(py::init([](int players, std::vector<double> direct, std::vector<double> cross,
                       py::object pbar) {
             const double first = py::isinstance<py::float_>(pbar) || py::isinstance<py::int_>(pbar)
                                      ? pbar.cast<double>()
                                      : 1.0;
             auto s = GameSpec::symmetric(players, {std::move(direct), std::move(cross)}, first);
             if (!py::isinstance<py::float_>(pbar) && !py::isinstance<py::int_>(pbar))
               s.pbar = pbar.cast<std::vector<double>>();
             s.validate();
             return s;
           }),
           py::arg("players"), py::arg("direct_gains"), py::arg("cross_gains"),
           py::arg("pbar") = 1.0,
           "Uniform link distributions, alpha = weights = 1.")
      .def_readonly("players", &GameSpec::players)
      .def_property_readonly("direct_gains", [](const GameSpec& s) { return s.gains.direct; })
      .def_property_readonly("cross_gains", [](const GameSpec& s) { return s.gains.cross; })
      .def_readwrite("pbar", &GameSpec::pbar)
      .def_readwrite("alpha", &GameSpec::alpha)
      .def_readwrite("weights", &GameSpec::weights)
      .def("link_probs", [](const GameSpec& s, int rx, int tx) { return s.dists.link(rx, tx); })
      .def("set_link_probs",
           [](GameSpec& s, int rx, int tx, std::vector<double> p) {
             s.dists.link(rx, tx) = std::move(p);
           })
      .def("validate", &GameSpec::validate);

  py::class_<StateSpace>(m, "StateSpace")
      .def("__len__", &StateSpace::size)
      .def_readonly("probs", &StateSpace::probs)
      .def("gains", [](const StateSpace& s, std::size_t h) {
        if (h >= s.size()) throw py::index_error();
        return s.states[h].gains;
      });

  m.def("enumerate_states", &enumerate_states, py::arg("spec"),
        py::arg("cap") = kDefaultStateCap);
  m.def("expected_rate", &expected_rate, py::arg("spec"), py::arg("space"), py::arg("profile"),
        py::arg("player"));
  m.def("sum_rate", &sum_rate, py::arg("spec"), py::arg("space"), py::arg("profile"));

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("rho_smax", &ConditionReport::rho_smax)
      .def_readonly("rho_hhat", &ConditionReport::rho_hhat)
      .def_readonly("ratio_bound", &ConditionReport::ratio_bound)
      .def_readonly("contraction_ok", &ConditionReport::contraction_ok)
      .def_readonly("htilde_psd", &ConditionReport::htilde_psd)
      .def_readonly("htilde_pd", &ConditionReport::htilde_pd)
      .def_readonly("min_sym_eig", &ConditionReport::min_sym_eig);

  m.def("analyze", [](const GameSpec& spec) {
    const auto space = enumerate_states(spec);
    return analyze_conditions(spec, build_operator(spec, space));
  }, py::arg("spec"));

  m.def("waterfill", [](const Vector& floors, const Vector& probs, double pbar) {
    const auto r = waterfill(floors, probs, pbar);
    return py::make_tuple(r.powers, r.level);
  }, py::arg("floors"), py::arg("probs"), py::arg("pbar"),
     "Returns (powers, level).");
  m.def("best_response", [](const GameSpec& spec, const StateSpace& space,
                            const PowerProfile& profile, int player) {
    const auto r = best_response(spec, space, profile, player);
    return py::make_tuple(r.powers, r.level);
  }, py::arg("spec"), py::arg("space"), py::arg("profile"), py::arg("player"));

  py::class_<IwfOptions>(m, "IwfOptions")
      .def(py::init<>())
      .def_property("scheme",
                    [](const IwfOptions& o) { return std::string(to_string(o.scheme)); },
                    [](IwfOptions& o, const std::string& s) { o.scheme = iwf_scheme_from_string(s); })
      .def_readwrite("tol", &IwfOptions::tol)
      .def_readwrite("max_iter", &IwfOptions::max_iter);

  m.def("iterate_waterfilling", [](const GameSpec& spec, const StateSpace& space,
                                   std::optional<PowerProfile> init, const IwfOptions& opts) {
    const auto r = iterate_waterfilling(spec, space, start_or_default(spec, space, init), opts);
    py::dict d = profile_dict(r.profile, spec, space);
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["residuals"] = r.residual_history;
    return d;
  }, py::arg("spec"), py::arg("space"), py::arg("init") = py::none(),
     py::arg("options") = IwfOptions{});

  py::class_<ViOptions>(m, "ViOptions")
      .def(py::init<>())
      .def_readwrite("eps0", &ViOptions::eps0)
      .def_readwrite("decay", &ViOptions::decay)
      .def_readwrite("outer_tol", &ViOptions::outer_tol)
      .def_readwrite("inner_tol", &ViOptions::inner_tol)
      .def_readwrite("max_outer", &ViOptions::max_outer)
      .def_readwrite("max_inner", &ViOptions::max_inner);

  m.def("solve_vi", [](const GameSpec& spec, const StateSpace& space,
                       std::optional<PowerProfile> init, const ViOptions& opts) {
    const auto problem = ViProblem::from_game(spec, space);
    const auto r = solve_regularized(problem, opts, start_or_default(spec, space, init));
    py::dict d = profile_dict(r.solution, spec, space);
    d["converged"] = r.converged;
    d["guaranteed"] = r.guaranteed;
    d["natural_residual"] = natural_residual(problem, r.solution);
    py::list path;
    for (const auto& e : r.eps_path)
      path.append(py::make_tuple(e.eps, e.inner_iterations, e.natural_residual));
    d["eps_path"] = path;
    return d;
  }, py::arg("spec"), py::arg("space"), py::arg("init") = py::none(),
     py::arg("options") = ViOptions{});

  py::class_<AlConfig>(m, "AlConfig")
      .def(py::init<>())
      .def_readwrite("c", &AlConfig::c)
      .def_readwrite("alpha_mult", &AlConfig::alpha_mult)
      .def_readwrite("delta", &AlConfig::delta)
      .def_readwrite("eps_grad", &AlConfig::eps_grad)
      .def_readwrite("eps_feas", &AlConfig::eps_feas)
      .def_readwrite("max_outer", &AlConfig::max_outer)
      .def_readwrite("max_inner", &AlConfig::max_inner)
      .def_readwrite("starts", &AlConfig::starts)
      .def_readwrite("seed", &AlConfig::seed);

  m.def("multi_start", [](const GameSpec& spec, const StateSpace& space, const AlConfig& cfg) {
    const auto r = multi_start(spec, space, cfg);
    py::dict d = profile_dict(r.best, spec, space);
    d["converged"] = r.converged;
    d["best_start"] = r.best_start;
    d["multipliers"] = r.multipliers;
    std::vector<double> rates;
    for (const auto& s : r.per_start) rates.push_back(s.sum_rate);
    d["start_sum_rates"] = rates;
    return d;
  }, py::arg("spec"), py::arg("space"), py::arg("config") = AlConfig{});

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("game", &ExperimentConfig::game)
      .def_readwrite("pareto", &ExperimentConfig::pareto)
      .def_readwrite("vi", &ExperimentConfig::vi)
      .def_readwrite("iwf", &ExperimentConfig::iwf)
      .def_property("solver",
                    [](const ExperimentConfig& c) { return std::string(to_string(c.solver)); },
                    [](ExperimentConfig& c, const std::string& s) { c.solver = solver_from_string(s); })
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; });

  m.def("load_config", [](const std::string& text) { return load_config(text); }, py::arg("text"));
  m.def("dump_config", &dump_config, py::arg("config"));
  m.def("run_solve", [](const ExperimentConfig& cfg) { return to_python(to_json(run_solve(cfg))); },
        py::arg("config"));
  m.def("run_sweep", [](const ExperimentConfig& cfg) { return to_python(to_json(run_sweep(cfg))); },
        py::arg("config"));
  m.def("simulate", [](const ExperimentConfig& cfg) {
    return to_python(to_json(run_simulate_experiment(cfg)));
  }, py::arg("config"));
}
