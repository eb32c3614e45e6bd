#pragma once

// Nash equilibria as solutions of the variational inequality
//
//   find P in A with <F(P), X - P>_pi >= 0 for all X in A,
//   F(P) = hhat + (I + Hhat) P,
//
// solved by the projection method on the regularized operator
// F_eps(P) = F(P) + eps P along a decreasing eps path.
//
// Inner products and projections use the pi-weighted metric
// <a, b>_pi = sum_h pi(h) a(h)^T b(h), and A is the product over players of
// the budget faces {p >= 0, sum_h pi(h) p(h) = pbar_i}. In that metric the
// projection of -f_i onto player i's face is exactly its water-filling
// response, so a VI solution is a fixed point of the best-response map.
// For uniform state probabilities this coincides with the Euclidean setup.

#include "icgame/game.hpp"
#include "icgame/spectral.hpp"

#include <vector>

namespace icg {

struct ViProblem {
  InterferenceOperator op;
  Vector probs;
  std::vector<double> pbar;
  double htilde_norm = 0.0;  // max_h ||I + Hhat(h)||_2
  Definiteness htilde;

  static ViProblem from_game(const GameSpec& spec, const StateSpace& space);

  int players() const { return op.players; }
  Eigen::Index states() const { return probs.size(); }
};

/// Column h: hhat(h) + (I + Hhat(h)) P(h). Throws std::invalid_argument on
/// a profile of the wrong shape.
Matrix eval_F(const ViProblem& problem, const PowerProfile& prof);

Matrix eval_F_eps(const ViProblem& problem, const PowerProfile& prof,
                  double eps);

/// sum_h pi(h) a(:,h) . b(:,h)
double weighted_inner(const Vector& probs, const Matrix& a, const Matrix& b);

enum class BudgetSet {
  at_most,  // {p >= 0, sum_h pi(h) p(h) <= pbar}
  tight,    // {p >= 0, sum_h pi(h) p(h) == pbar}
};

/// Projection of x onto a budget set in the pi-weighted norm. The result
/// has the form max(0, x - nu) with the shift nu found by bisection; for
/// `at_most`, nu = 0 whenever max(0, x) is already within budget.
Vector project_block(const Vector& x, const Vector& probs, double pbar,
                     BudgetSet set = BudgetSet::at_most);

/// Row-wise projection onto the tight budget faces.
PowerProfile project_feasible(const ViProblem& problem, const Matrix& z);

/// ||P - proj(P - F_eps(P))||_inf; zero exactly at solutions.
double natural_residual(const ViProblem& problem, const PowerProfile& prof,
                        double eps = 0.0);

struct StrongSolveResult {
  PowerProfile profile;
  int iterations = 0;
  bool converged = false;
  double tau = 0.0;
};

/// Step size for the projection method on F_eps: mu / L^2 with strong
/// monotonicity modulus mu = eps + max(0, min_sym_eig) and Lipschitz
/// constant L = ||H~||_2 + eps.
double projection_step(const ViProblem& problem, double eps);

/// Projection iterations P <- proj(P - tau F_eps(P)) until both the
/// successive-iterate gap and the natural residual of F_eps are below tol.
StrongSolveResult solve_strong(const ViProblem& problem, double eps,
                               const PowerProfile& init, double tol,
                               int max_iter);

struct ViOptions {
  double eps0 = 1.0;
  double decay = 0.5;
  double outer_tol = 1e-7;
  double inner_tol = 1e-9;
  int max_outer = 80;
  int max_inner = 200000;

  bool operator==(const ViOptions&) const = default;
};

struct EpsStep {
  double eps = 0.0;
  int inner_iterations = 0;
  double natural_residual = 0.0;  // of the unregularized F
};

struct ViReport {
  PowerProfile solution;
  std::vector<EpsStep> eps_path;
  bool converged = false;
  double tau_used = 0.0;
  bool guaranteed = false;  // H~ passed the PSD test
};

/// Regularization path eps_n = eps0 * decay^n with warm starts, stopping
/// once the natural residual of F drops below outer_tol. Runs even when
/// H~ is not PSD; `guaranteed` is then false. Throws std::invalid_argument
/// for eps0 <= 0 or decay outside (0, 1).
ViReport solve_regularized(const ViProblem& problem, const ViOptions& opts,
                           const PowerProfile& init);

/// Same, starting from the constant full-budget policy.
ViReport solve_regularized(const ViProblem& problem, const ViOptions& opts = {});

}  // namespace icg
