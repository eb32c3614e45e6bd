#include "icgame/pareto.hpp"

#include "icgame/random.hpp"

#include <cmath>
#include <stdexcept>

namespace icg {

void AlConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError(name, "must be finite and > 0");
  };
  positive(c, "c");
  positive(alpha_mult, "alpha_mult");
  positive(delta, "delta");
  positive(eps_grad, "eps_grad");
  positive(eps_feas, "eps_feas");
  if (max_outer < 1) throw ValidationError("max_outer", "must be >= 1");
  if (max_inner < 1) throw ValidationError("max_inner", "must be >= 1");
  if (starts < 1) throw ValidationError("starts", "must be >= 1");
}

namespace {

/// Per-state signal and interference terms of the current profile, kept in
/// sync so that gradients and proposal gains cost O(N1 N^2) per step.
class Workspace {
 public:
  Workspace(const GameSpec& spec, const StateSpace& space, PowerProfile prof)
      : spec_(spec), space_(space), p_(std::move(prof)) {
    const int n = spec.players;
    const auto m = static_cast<Eigen::Index>(space.size());
    direct_.resize(n, m);
    signal_.resize(n, m);
    noise_.resize(n, m);
    for (Eigen::Index h = 0; h < m; ++h) {
      const Matrix& g = space.states[static_cast<std::size_t>(h)].gains;
      for (int i = 0; i < n; ++i) direct_(i, h) = spec.effective_direct(i, g(i, i));
    }
    refresh();
  }

  const PowerProfile& profile() const { return p_; }

  double slack(int i) const {
    return spec_.pbar[static_cast<std::size_t>(i)] - p_.row(i).dot(space_.probs);
  }

  /// Gradient of L w.r.t. P_i(h), divided by pi(h).
  Vector scaled_gradient(const Vector& lambdas, double c, int i) const {
    const int n = spec_.players;
    const auto m = p_.cols();
    const double wi = spec_.weights[static_cast<std::size_t>(i)];
    const double constraint = -lambdas[i] + 2.0 * c * slack(i);
    Vector d(m);
    for (Eigen::Index h = 0; h < m; ++h) {
      const Matrix& g = space_.states[static_cast<std::size_t>(h)].gains;
      double v = wi * direct_(i, h) / (noise_(i, h) + signal_(i, h));
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double total = noise_(j, h) + signal_(j, h);
        v -= spec_.weights[static_cast<std::size_t>(j)] * g(j, i) *
             signal_(j, h) / (total * noise_(j, h));
      }
      d[h] = v + constraint;
    }
    return d;
  }

  /// L(Q_i, P_-i) - L(P).
  double gain(int i, const Vector& q, const Vector& lambdas, double c) const {
    const int n = spec_.players;
    double rate_gain = 0.0;
    double spent = 0.0;
    for (Eigen::Index h = 0; h < p_.cols(); ++h) {
      const double dp = q[h] - p_(i, h);
      if (dp == 0.0) continue;
      const double pi = space_.probs[h];
      spent += pi * dp;
      if (pi == 0.0) continue;
      const Matrix& g = space_.states[static_cast<std::size_t>(h)].gains;
      double v = spec_.weights[static_cast<std::size_t>(i)] *
                 std::log1p(direct_(i, h) * dp / (noise_(i, h) + signal_(i, h)));
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double extra = g(j, i) * dp;
        v += spec_.weights[static_cast<std::size_t>(j)] *
             (std::log1p(extra / (noise_(j, h) + signal_(j, h))) -
              std::log1p(extra / noise_(j, h)));
      }
      rate_gain += pi * v;
    }
    const double s_old = slack(i);
    const double s_new = s_old - spent;
    return rate_gain + lambdas[i] * (s_new - s_old) -
           c * (s_new * s_new - s_old * s_old);
  }

  void accept(int i, const Vector& q) {
    p_.row(i) = q.transpose();
    refresh();
  }

 private:
  void refresh() {
    const int n = spec_.players;
    for (Eigen::Index h = 0; h < p_.cols(); ++h) {
      const Matrix& g = space_.states[static_cast<std::size_t>(h)].gains;
      for (int i = 0; i < n; ++i) {
        double noise = 1.0;
        for (int j = 0; j < n; ++j) {
          if (j != i) noise += g(i, j) * p_(j, h);
        }
        noise_(i, h) = noise;
        signal_(i, h) = direct_(i, h) * p_(i, h);
      }
    }
  }

  const GameSpec& spec_;
  const StateSpace& space_;
  PowerProfile p_;
  Matrix direct_;  // alpha_i |h_ii|^2
  Matrix signal_;  // alpha_i |h_ii|^2 P_i(h)
  Matrix noise_;   // 1 + sum_{j != i} |h_ij|^2 P_j(h)
};

}  // namespace

double augmented_lagrangian(const GameSpec& spec, const StateSpace& space,
                            const PowerProfile& prof, const Vector& lambdas,
                            double c) {
  double value = 0.0;
  for (int i = 0; i < spec.players; ++i) {
    const double s =
        spec.pbar[static_cast<std::size_t>(i)] - average_power(space, prof, i);
    value += spec.weights[static_cast<std::size_t>(i)] *
                 expected_rate(spec, space, prof, i) +
             lambdas[i] * s - c * s * s;
  }
  return value;
}

Vector grad_player(const GameSpec& spec, const StateSpace& space,
                   const PowerProfile& prof, const Vector& lambdas, double c,
                   int i) {
  Workspace ws(spec, space, prof);
  return ws.scaled_gradient(lambdas, c, i).cwiseProduct(space.probs);
}

Vector projected_gradient(const Vector& grad,
                          const Eigen::Ref<const Vector>& powers) {
  Vector g = grad;
  for (Eigen::Index h = 0; h < g.size(); ++h) {
    if (powers[h] <= 0.0 && g[h] < 0.0) g[h] = 0.0;
  }
  return g;
}

AscentResult steepest_ascent(const GameSpec& spec, const StateSpace& space,
                             const PowerProfile& prof, const Vector& lambdas,
                             const AlConfig& cfg) {
  const int n = spec.players;
  Workspace ws(spec, space, prof);
  AscentResult res;
  std::vector<Vector> dirs(static_cast<std::size_t>(n));
  std::vector<Vector> proposals(static_cast<std::size_t>(n));

  for (;;) {
    bool stationary = true;
    for (int i = 0; i < n; ++i) {
      auto& d = dirs[static_cast<std::size_t>(i)];
      d = ws.scaled_gradient(lambdas, cfg.c, i);
      const Vector g = projected_gradient(d.cwiseProduct(space.probs),
                                          ws.profile().row(i).transpose());
      if (g.norm() >= cfg.eps_grad) stationary = false;
    }
    if (stationary) {
      res.converged = true;
      break;
    }
    if (res.steps == cfg.max_inner) break;

    int best = -1;
    double best_gain = 0.0;
    for (int i = 0; i < n; ++i) {
      auto& q = proposals[static_cast<std::size_t>(i)];
      q = (ws.profile().row(i).transpose() + cfg.delta * dirs[static_cast<std::size_t>(i)])
              .cwiseMax(0.0);
      const double gain = ws.gain(i, q, lambdas, cfg.c);
      if (best < 0 || gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    if (!(best_gain > 0.0)) {
      res.stalled = true;
      break;
    }
    ws.accept(best, proposals[static_cast<std::size_t>(best)]);
    ++res.steps;
  }
  res.profile = ws.profile();
  return res;
}

OuterResult solve_outer(const GameSpec& spec, const StateSpace& space,
                        const PowerProfile& init, const AlConfig& cfg,
                        const Vector& lambda0) {
  const int n = spec.players;
  OuterResult out;
  out.lambdas = lambda0.size() == n ? lambda0 : Vector::Zero(n);
  out.residuals.resize(n);
  PowerProfile p = init;
  for (int it = 1; it <= cfg.max_outer; ++it) {
    auto asc = steepest_ascent(spec, space, p, out.lambdas, cfg);
    p = std::move(asc.profile);
    out.inner_steps += asc.steps;
    out.iterations = it;
    bool feasible = true;
    for (int i = 0; i < n; ++i) {
      out.residuals[i] =
          spec.pbar[static_cast<std::size_t>(i)] - average_power(space, p, i);
      if (std::abs(out.residuals[i]) >= cfg.eps_feas) feasible = false;
    }
    if (feasible) {
      out.converged = true;
      break;
    }
    for (int i = 0; i < n; ++i)
      out.lambdas[i] = std::max(0.0, out.lambdas[i] - cfg.alpha_mult * out.residuals[i]);
  }
  out.profile = std::move(p);
  return out;
}

PowerProfile random_profile(const GameSpec& spec, const StateSpace& space,
                            std::uint64_t seed) {
  Rng rng(seed);
  PowerProfile p(spec.players, static_cast<Eigen::Index>(space.size()));
  for (int i = 0; i < spec.players; ++i) {
    const double budget = spec.pbar[static_cast<std::size_t>(i)];
    for (Eigen::Index h = 0; h < p.cols(); ++h) p(i, h) = rng.uniform(0.0, budget);
    const double avg = average_power(space, p, i);
    if (avg > 0.0) p.row(i) *= budget / avg;
  }
  return p;
}

PowerProfile restore_budgets(const StateSpace& space, PowerProfile prof,
                             const std::vector<double>& pbar) {
  prof = prof.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < prof.rows(); ++i) {
    const double avg = average_power(space, prof, static_cast<int>(i));
    const double budget = pbar[static_cast<std::size_t>(i)];
    if (avg > budget) prof.row(i) *= budget / avg;
  }
  return prof;
}

ParetoReport multi_start(const GameSpec& spec, const StateSpace& space,
                         const AlConfig& cfg) {
  cfg.validate();
  ParetoReport rep;
  rep.per_start.reserve(static_cast<std::size_t>(cfg.starts));
  for (int k = 0; k < cfg.starts; ++k) {
    const auto init =
        random_profile(spec, space, derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    auto out = solve_outer(spec, space, init, cfg);

    StartRecord rec;
    rec.profile = restore_budgets(space, std::move(out.profile), spec.pbar);
    rec.sum_rate = sum_rate(spec, space, rec.profile);
    rec.outer_iterations = out.iterations;
    rec.residuals = out.residuals;
    rec.lambdas = out.lambdas;
    rec.converged = out.converged;
    rec.feasible = (out.residuals.array().abs() < cfg.eps_feas).all();
    if (rec.feasible && (rep.best_start < 0 || rec.sum_rate > rep.best_sum_rate)) {
      rep.best_start = k;
      rep.best_sum_rate = rec.sum_rate;
    }
    rep.per_start.push_back(std::move(rec));
  }
  if (rep.best_start >= 0) {
    const auto& best = rep.per_start[static_cast<std::size_t>(rep.best_start)];
    rep.best = best.profile;
    rep.multipliers = best.lambdas;
    rep.converged = true;
  } else {
    rep.best = PowerProfile::Zero(spec.players, static_cast<Eigen::Index>(space.size()));
    rep.multipliers = Vector::Zero(spec.players);
  }
  return rep;
}

}  // namespace icg
