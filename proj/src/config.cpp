#include "icgame/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace icg {

using nlohmann::json;

ConfigParseError::ConfigParseError(std::size_t line, std::size_t column,
                                   const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string_view to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::iwf: return "iwf";
    case SolverChoice::vi: return "vi";
    case SolverChoice::pareto: return "pareto";
    case SolverChoice::all: return "all";
  }
  return "all";
}

SolverChoice solver_from_string(std::string_view s) {
  if (s == "iwf") return SolverChoice::iwf;
  if (s == "vi") return SolverChoice::vi;
  if (s == "pareto") return SolverChoice::pareto;
  if (s == "all") return SolverChoice::all;
  throw ValidationError("solver.method",
                        "expected iwf, vi, pareto or all, got '" + std::string(s) + "'");
}

bool OutputSettings::wants(std::string_view fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

std::vector<double> default_sweep_values() {
  return {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
}

namespace {

/// Message of a ValidationError without its "field: " prefix.
std::string bare_message(const ValidationError& e) {
  const std::string msg = e.what();
  const auto pos = msg.find(": ");
  return pos == std::string::npos ? msg : msg.substr(pos + 2);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) throw ValidationError(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(join(path, key), "expected a number");
  return v.get<double>();
}

template <typename Int>
Int get_integer(const json& obj, const std::string& path, const char* key,
                Int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ValidationError(join(path, key), "expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
      throw ValidationError(join(path, key), "must be >= 0");
  }
  return v.get<Int>();
}

std::string get_string(const json& obj, const std::string& path,
                       const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ValidationError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(field, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

/// Scalar broadcast to every player, or an explicit per-player list.
std::vector<double> per_player(const json& obj, const std::string& path,
                               const char* key, int players,
                               std::optional<double> fallback) {
  const std::string field = join(path, key);
  if (!obj.contains(key)) {
    if (!fallback) throw ValidationError(field, "missing required field");
    return std::vector<double>(static_cast<std::size_t>(std::max(players, 0)), *fallback);
  }
  const auto& v = obj.at(key);
  if (v.is_number())
    return std::vector<double>(static_cast<std::size_t>(std::max(players, 0)), v.get<double>());
  return number_list(v, field);
}

LinkDistribution parse_link_probs(const json& v, int players,
                                  const GainAlphabets& gains) {
  const std::string field = "game.link_probs";
  if (v.is_string()) {
    if (v.get<std::string>() != "uniform")
      throw ValidationError(field, "expected \"uniform\" or an object");
    return LinkDistribution::uniform(players, gains);
  }
  reject_unknown(v, field, {"direct", "cross", "per_link"});
  if (v.contains("per_link")) {
    if (v.contains("direct") || v.contains("cross"))
      throw ValidationError(field, "per_link cannot be combined with direct/cross");
    const auto& rows = v.at("per_link");
    if (!rows.is_array() || static_cast<int>(rows.size()) != players)
      throw ValidationError(field + ".per_link", "expected players x players lists");
    LinkDistribution d;
    d.players = players;
    d.probs.resize(static_cast<std::size_t>(players * players));
    for (int rx = 0; rx < players; ++rx) {
      const auto& row = rows.at(static_cast<std::size_t>(rx));
      if (!row.is_array() || static_cast<int>(row.size()) != players)
        throw ValidationError(field + ".per_link", "expected players x players lists");
      for (int tx = 0; tx < players; ++tx)
        d.link(rx, tx) = number_list(row.at(static_cast<std::size_t>(tx)), field + ".per_link");
    }
    return d;
  }
  LinkDistribution d = LinkDistribution::uniform(players, gains);
  for (int rx = 0; rx < players; ++rx) {
    for (int tx = 0; tx < players; ++tx) {
      const char* key = rx == tx ? "direct" : "cross";
      if (v.contains(key)) d.link(rx, tx) = number_list(v.at(key), field + "." + key);
    }
  }
  return d;
}

void parse_game(const json& g, ExperimentConfig& cfg) {
  const std::string path = "game";
  reject_unknown(g, path, {"players", "direct_gains", "cross_gains", "link_probs",
                           "pbar", "alpha", "weights", "state_cap"});
  GameSpec& s = cfg.game;
  if (!g.contains("players")) throw ValidationError("game.players", "missing required field");
  s.players = get_integer<int>(g, path, "players", 0);
  if (s.players < 1) throw ValidationError("game.players", "must be >= 1");
  if (!g.contains("direct_gains"))
    throw ValidationError("game.direct_gains", "missing required field");
  s.gains.direct = number_list(g.at("direct_gains"), "game.direct_gains");
  if (g.contains("cross_gains"))
    s.gains.cross = number_list(g.at("cross_gains"), "game.cross_gains");
  else if (s.players > 1)
    throw ValidationError("game.cross_gains", "missing required field");

  auto positive = [](const std::vector<double>& v, const std::string& field) {
    if (v.empty()) throw ValidationError(field, "must not be empty");
    for (double x : v)
      if (!(x > 0.0)) throw ValidationError(field, "entries must be > 0");
  };
  positive(s.gains.direct, "game.direct_gains");
  if (s.players > 1) positive(s.gains.cross, "game.cross_gains");

  s.dists = g.contains("link_probs")
                ? parse_link_probs(g.at("link_probs"), s.players, s.gains)
                : LinkDistribution::uniform(s.players, s.gains);
  s.pbar = per_player(g, path, "pbar", s.players, std::nullopt);
  s.alpha = per_player(g, path, "alpha", s.players, 1.0);
  s.weights = per_player(g, path, "weights", s.players, 1.0);
  cfg.state_cap = get_integer<std::size_t>(g, path, "state_cap", kDefaultStateCap);
  if (cfg.state_cap == 0) throw ValidationError("game.state_cap", "must be >= 1");

  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("game." + e.field(), bare_message(e));
  }
}

void parse_solver(const json& v, ExperimentConfig& cfg) {
  reject_unknown(v, "solver", {"method", "iwf", "vi", "pareto"});
  cfg.solver = solver_from_string(get_string(v, "solver", "method", "all"));

  if (v.contains("iwf")) {
    const auto& o = v.at("iwf");
    const std::string p = "solver.iwf";
    reject_unknown(o, p, {"scheme", "tol", "max_iter"});
    try {
      cfg.iwf.scheme = iwf_scheme_from_string(get_string(o, p, "scheme", "simultaneous"));
    } catch (const ValidationError& e) {
      throw ValidationError(p + ".scheme", bare_message(e));
    }
    cfg.iwf.tol = get_number(o, p, "tol", cfg.iwf.tol);
    cfg.iwf.max_iter = get_integer<int>(o, p, "max_iter", cfg.iwf.max_iter);
    if (!(cfg.iwf.tol > 0.0)) throw ValidationError(p + ".tol", "must be > 0");
    if (cfg.iwf.max_iter < 0) throw ValidationError(p + ".max_iter", "must be >= 0");
  }
  if (v.contains("vi")) {
    const auto& o = v.at("vi");
    const std::string p = "solver.vi";
    reject_unknown(o, p, {"eps0", "decay", "outer_tol", "inner_tol", "max_outer", "max_inner"});
    auto& vi = cfg.vi;
    vi.eps0 = get_number(o, p, "eps0", vi.eps0);
    vi.decay = get_number(o, p, "decay", vi.decay);
    vi.outer_tol = get_number(o, p, "outer_tol", vi.outer_tol);
    vi.inner_tol = get_number(o, p, "inner_tol", vi.inner_tol);
    vi.max_outer = get_integer<int>(o, p, "max_outer", vi.max_outer);
    vi.max_inner = get_integer<int>(o, p, "max_inner", vi.max_inner);
    if (!(vi.eps0 > 0.0)) throw ValidationError(p + ".eps0", "must be > 0");
    if (!(vi.decay > 0.0 && vi.decay < 1.0))
      throw ValidationError(p + ".decay", "must be in (0, 1)");
    if (!(vi.outer_tol > 0.0)) throw ValidationError(p + ".outer_tol", "must be > 0");
    if (!(vi.inner_tol > 0.0)) throw ValidationError(p + ".inner_tol", "must be > 0");
    if (vi.max_outer < 1) throw ValidationError(p + ".max_outer", "must be >= 1");
    if (vi.max_inner < 1) throw ValidationError(p + ".max_inner", "must be >= 1");
  }
  if (v.contains("pareto")) {
    const auto& o = v.at("pareto");
    const std::string p = "solver.pareto";
    reject_unknown(o, p, {"c", "alpha", "delta", "eps_grad", "eps_feas", "max_outer",
                          "max_inner", "starts", "seed"});
    auto& al = cfg.pareto;
    al.c = get_number(o, p, "c", al.c);
    al.alpha_mult = get_number(o, p, "alpha", al.alpha_mult);
    al.delta = get_number(o, p, "delta", al.delta);
    al.eps_grad = get_number(o, p, "eps_grad", al.eps_grad);
    al.eps_feas = get_number(o, p, "eps_feas", al.eps_feas);
    al.max_outer = get_integer<int>(o, p, "max_outer", al.max_outer);
    al.max_inner = get_integer<int>(o, p, "max_inner", al.max_inner);
    al.starts = get_integer<int>(o, p, "starts", al.starts);
    al.seed = get_integer<std::uint64_t>(o, p, "seed", al.seed);
    try {
      al.validate();
    } catch (const ValidationError& e) {
      const std::string f = e.field() == "alpha_mult" ? "alpha" : e.field();
      throw ValidationError(p + "." + f, bare_message(e));
    }
  }
}

void parse_sweep(const json& v, ExperimentConfig& cfg) {
  reject_unknown(v, "sweep", {"parameter", "values"});
  SweepAxis axis;
  axis.parameter = get_string(v, "sweep", "parameter", "pbar");
  if (axis.parameter != "pbar")
    throw ValidationError("sweep.parameter", "only \"pbar\" is supported");
  axis.values = v.contains("values") ? number_list(v.at("values"), "sweep.values")
                                     : default_sweep_values();
  if (axis.values.empty()) throw ValidationError("sweep.values", "must not be empty");
  for (double x : axis.values)
    if (!(x > 0.0)) throw ValidationError("sweep.values", "entries must be > 0");
  cfg.sweep = std::move(axis);
}

void parse_simulate(const json& v, ExperimentConfig& cfg) {
  reject_unknown(v, "simulate", {"slots", "seed"});
  SimulateSettings s;
  s.slots = get_integer<std::uint64_t>(v, "simulate", "slots", s.slots);
  s.seed = get_integer<std::uint64_t>(v, "simulate", "seed", s.seed);
  if (s.slots < 1) throw ValidationError("simulate.slots", "must be >= 1");
  cfg.simulate = s;
}

void parse_output(const json& v, ExperimentConfig& cfg) {
  reject_unknown(v, "output", {"dir", "formats"});
  cfg.output.dir = get_string(v, "output", "dir", cfg.output.dir);
  if (v.contains("formats")) {
    const auto& f = v.at("formats");
    if (!f.is_array()) throw ValidationError("output.formats", "expected an array");
    cfg.output.formats.clear();
    for (const auto& x : f) {
      if (!x.is_string() || (x != "csv" && x != "json"))
        throw ValidationError("output.formats", "entries must be \"csv\" or \"json\"");
      cfg.output.formats.push_back(x.get<std::string>());
    }
  }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ExperimentConfig load_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigParseError(line, col, e.what());
  }
  reject_unknown(root, "", {"game", "solver", "sweep", "simulate", "output"});
  if (!root.contains("game")) throw ValidationError("game", "missing required section");

  ExperimentConfig cfg;
  parse_game(root.at("game"), cfg);
  if (root.contains("solver")) parse_solver(root.at("solver"), cfg);
  if (root.contains("sweep")) parse_sweep(root.at("sweep"), cfg);
  if (root.contains("simulate")) parse_simulate(root.at("simulate"), cfg);
  if (root.contains("output")) parse_output(root.at("output"), cfg);
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  const GameSpec& s = cfg.game;
  json per_link = json::array();
  for (int rx = 0; rx < s.players; ++rx) {
    json row = json::array();
    for (int tx = 0; tx < s.players; ++tx) row.push_back(s.dists.link(rx, tx));
    per_link.push_back(std::move(row));
  }
  json game = {{"players", s.players},
               {"direct_gains", s.gains.direct},
               {"cross_gains", s.gains.cross},
               {"link_probs", {{"per_link", per_link}}},
               {"pbar", s.pbar},
               {"alpha", s.alpha},
               {"weights", s.weights},
               {"state_cap", cfg.state_cap}};
  json solver = {
      {"method", std::string(to_string(cfg.solver))},
      {"iwf",
       {{"scheme", std::string(to_string(cfg.iwf.scheme))},
        {"tol", cfg.iwf.tol},
        {"max_iter", cfg.iwf.max_iter}}},
      {"vi",
       {{"eps0", cfg.vi.eps0},
        {"decay", cfg.vi.decay},
        {"outer_tol", cfg.vi.outer_tol},
        {"inner_tol", cfg.vi.inner_tol},
        {"max_outer", cfg.vi.max_outer},
        {"max_inner", cfg.vi.max_inner}}},
      {"pareto",
       {{"c", cfg.pareto.c},
        {"alpha", cfg.pareto.alpha_mult},
        {"delta", cfg.pareto.delta},
        {"eps_grad", cfg.pareto.eps_grad},
        {"eps_feas", cfg.pareto.eps_feas},
        {"max_outer", cfg.pareto.max_outer},
        {"max_inner", cfg.pareto.max_inner},
        {"starts", cfg.pareto.starts},
        {"seed", cfg.pareto.seed}}}};
  json root = {{"game", game},
               {"solver", solver},
               {"output", {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}}}};
  if (cfg.sweep)
    root["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  if (cfg.simulate)
    root["simulate"] = {{"slots", cfg.simulate->slots}, {"seed", cfg.simulate->seed}};
  return root.dump(2) + "\n";
}

}  // namespace icg
