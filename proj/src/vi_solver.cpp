#include "icgame/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icg {

ViProblem ViProblem::from_game(const GameSpec& spec, const StateSpace& space) {
  ViProblem p;
  p.op = build_operator(spec, space);
  p.probs = space.probs;
  p.pbar = spec.pbar;
  p.htilde_norm = icg::htilde_norm(p.op);
  p.htilde = definiteness(p.op);
  return p;
}

Matrix eval_F(const ViProblem& problem, const PowerProfile& prof) {
  if (prof.rows() != problem.players() || prof.cols() != problem.states())
    throw std::invalid_argument("eval_F: profile shape does not match problem");
  Matrix f = problem.op.hhat + prof;
  for (Eigen::Index h = 0; h < problem.states(); ++h)
    f.col(h).noalias() += problem.op.blocks[static_cast<std::size_t>(h)] * prof.col(h);
  return f;
}

Matrix eval_F_eps(const ViProblem& problem, const PowerProfile& prof,
                  double eps) {
  Matrix f = eval_F(problem, prof);
  if (eps != 0.0) f += eps * prof;
  return f;
}

double weighted_inner(const Vector& probs, const Matrix& a, const Matrix& b) {
  return (a.cwiseProduct(b).colwise().sum()).dot(probs.transpose());
}

namespace {

double spent(const Vector& x, const Vector& probs, double nu) {
  return (x.array() - nu).max(0.0).matrix().dot(probs);
}

}  // namespace

Vector project_block(const Vector& x, const Vector& probs, double pbar,
                     BudgetSet set) {
  if (set == BudgetSet::at_most && spent(x, probs, 0.0) <= pbar)
    return x.cwiseMax(0.0);

  // spent() is nonincreasing in nu; bracket the budget and bisect
  double lo = set == BudgetSet::at_most ? 0.0 : x.minCoeff() - pbar;
  double hi = x.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (spent(x, probs, mid) > pbar)
      lo = mid;
    else
      hi = mid;
    // once no breakpoint is left inside the bracket the shift is affine
    if (((x.array() > lo) && (x.array() < hi)).count() == 0) break;
  }

  // solve the budget exactly on the active set at the bracket
  const double probe = 0.5 * (lo + hi);
  double mass = 0.0;
  double weighted = 0.0;
  for (Eigen::Index h = 0; h < x.size(); ++h) {
    if (x[h] > probe) {
      mass += probs[h];
      weighted += probs[h] * x[h];
    }
  }
  double nu = probe;
  if (mass > 0.0) nu = std::clamp((weighted - pbar) / mass, lo, hi);
  return (x.array() - nu).max(0.0).matrix();
}

PowerProfile project_feasible(const ViProblem& problem, const Matrix& z) {
  PowerProfile p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    p.row(i) = project_block(z.row(i).transpose(), problem.probs,
                             problem.pbar[static_cast<std::size_t>(i)],
                             BudgetSet::tight)
                   .transpose();
  }
  return p;
}

double natural_residual(const ViProblem& problem, const PowerProfile& prof,
                        double eps) {
  const Matrix step = prof - eval_F_eps(problem, prof, eps);
  return (prof - project_feasible(problem, step)).cwiseAbs().maxCoeff();
}

double projection_step(const ViProblem& problem, double eps) {
  const double mu = eps + std::max(0.0, problem.htilde.min_sym_eig);
  const double lip = problem.htilde_norm + eps;
  return mu / (lip * lip);
}

StrongSolveResult solve_strong(const ViProblem& problem, double eps,
                               const PowerProfile& init, double tol,
                               int max_iter) {
  StrongSolveResult r;
  r.tau = projection_step(problem, eps);
  PowerProfile p = project_feasible(problem, init);
  for (int it = 1; it <= max_iter; ++it) {
    PowerProfile next =
        project_feasible(problem, p - r.tau * eval_F_eps(problem, p, eps));
    const double gap = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    r.iterations = it;
    if (gap < tol && natural_residual(problem, p, eps) < tol) {
      r.converged = true;
      break;
    }
  }
  r.profile = std::move(p);
  return r;
}

ViReport solve_regularized(const ViProblem& problem, const ViOptions& opts,
                           const PowerProfile& init) {
  if (!(opts.eps0 > 0.0))
    throw std::invalid_argument("solve_regularized: eps0 must be > 0");
  if (!(opts.decay > 0.0 && opts.decay < 1.0))
    throw std::invalid_argument("solve_regularized: decay must be in (0, 1)");

  ViReport rep;
  rep.guaranteed = problem.htilde.psd;
  PowerProfile p = init;
  double eps = opts.eps0;
  for (int n = 0; n < opts.max_outer; ++n) {
    auto inner = solve_strong(problem, eps, p, opts.inner_tol, opts.max_inner);
    p = std::move(inner.profile);
    const double res = natural_residual(problem, p);
    rep.eps_path.push_back({eps, inner.iterations, res});
    rep.tau_used = inner.tau;
    if (res < opts.outer_tol) {
      rep.converged = true;
      break;
    }
    eps *= opts.decay;
  }
  rep.solution = std::move(p);
  return rep;
}

ViReport solve_regularized(const ViProblem& problem, const ViOptions& opts) {
  PowerProfile init(problem.players(), problem.states());
  for (int i = 0; i < problem.players(); ++i)
    init.row(i).setConstant(problem.pbar[static_cast<std::size_t>(i)]);
  return solve_regularized(problem, opts, init);
}

}  // namespace icg
