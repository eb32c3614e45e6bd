#pragma once

// Local Pareto-optimal allocations by weighted-sum maximization with a
// distributed augmented-Lagrangian method.
//
//   L(P, lambda) = sum_i w_i r_i(P)
//                + sum_i lambda_i s_i(P) - c sum_i s_i(P)^2,
//   s_i(P) = pbar_i - sum_h pi(h) P_i(h).
//
// The inner loop is a Gauss-Southwell style steepest ascent: every player
// proposes a gradient step on its own powers, and only the proposal with
// the largest increase of L is applied. The outer loop updates the
// multipliers from the budget residuals.

#include "icgame/game.hpp"

#include <cstdint>
#include <vector>

namespace icg {

struct AlConfig {
  double c = 1.0;           // penalty coefficient
  double alpha_mult = 2.0;  // multiplier step
  double delta = 0.1;       // ascent step on the pi-scaled gradient
  double eps_grad = 1e-4;   // per-player projected gradient norm
  double eps_feas = 1e-4;   // |s_i| at convergence
  int max_outer = 200;
  int max_inner = 20000;
  int starts = 10;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const AlConfig&) const = default;
};

double augmented_lagrangian(const GameSpec& spec, const StateSpace& space,
                            const PowerProfile& prof, const Vector& lambdas,
                            double c);

/// Gradient of L with respect to (P_i(h))_h.
Vector grad_player(const GameSpec& spec, const StateSpace& space,
                   const PowerProfile& prof, const Vector& lambdas, double c,
                   int i);

/// Gradient with entries at P_i(h) = 0 pointing below zero removed, i.e.
/// the part of the gradient that is feasible for P >= 0.
Vector projected_gradient(const Vector& grad, const Eigen::Ref<const Vector>& powers);

struct AscentResult {
  PowerProfile profile;
  int steps = 0;
  bool converged = false;  // every projected gradient norm < eps_grad
  bool stalled = false;    // no proposal increased L
};

/// Proposals are Q_i = max(0, P_i + delta * grad_i / pi), a gradient step
/// measured in the pi-weighted metric and kept nonnegative. Ties in the
/// best-proposal choice go to the lowest player index.
AscentResult steepest_ascent(const GameSpec& spec, const StateSpace& space,
                             const PowerProfile& prof, const Vector& lambdas,
                             const AlConfig& cfg);

struct OuterResult {
  PowerProfile profile;
  Vector lambdas;
  Vector residuals;  // s_i at the final profile
  int iterations = 0;
  int inner_steps = 0;
  bool converged = false;
};

/// Alternates steepest ascent and lambda_i <- max(0, lambda_i - alpha s_i)
/// until every |s_i| < eps_feas. `lambda0` defaults to zero.
OuterResult solve_outer(const GameSpec& spec, const StateSpace& space,
                        const PowerProfile& init, const AlConfig& cfg,
                        const Vector& lambda0 = Vector());

struct StartRecord {
  PowerProfile profile;  // budget-restored final profile
  double sum_rate = 0.0;
  int outer_iterations = 0;
  Vector residuals;      // s_i before restoration
  Vector lambdas;
  bool converged = false;
  bool feasible = false; // every |s_i| < eps_feas
};

struct ParetoReport {
  PowerProfile best;
  double best_sum_rate = 0.0;
  int best_start = -1;
  std::vector<StartRecord> per_start;
  Vector multipliers;
  bool converged = false;  // some start ended feasible
};

/// Entries uniform on [0, pbar_i], then each row scaled so its average
/// power equals pbar_i.
PowerProfile random_profile(const GameSpec& spec, const StateSpace& space,
                            std::uint64_t seed);

/// Largest violation of the budgets removed by scaling rows down.
PowerProfile restore_budgets(const StateSpace& space, PowerProfile prof,
                             const std::vector<double>& pbar);

/// Runs solve_outer from cfg.starts random profiles; start k is seeded with
/// derive_seed(cfg.seed, k), so the first K starts do not depend on K.
ParetoReport multi_start(const GameSpec& spec, const StateSpace& space,
                         const AlConfig& cfg);

}  // namespace icg
