#pragma once

// Interference operator of the game written as an affine map and the
// spectral conditions that control uniqueness of the equilibrium and
// convergence of the NE solvers.

#include "icgame/game.hpp"

namespace icg {

/// Per-state pieces of F(P) = hhat + (I + Hhat) P. The block-diagonal Hhat
/// is kept as one N x N block per state and never densified.
struct InterferenceOperator {
  int players = 0;
  Matrix hhat;                // N x N1, column h = (1 / (alpha_i |h_ii|^2))_i
  std::vector<Matrix> blocks; // Hhat(h)_ij = |h_ij|^2 / (alpha_i |h_ii|^2), zero diagonal
  Matrix smax;                // entrywise max of the blocks

  std::size_t states() const { return blocks.size(); }
};

InterferenceOperator build_operator(const GameSpec& spec,
                                    const StateSpace& space);

/// Spectral radius of a square nonnegative matrix.
///
/// Power iteration on A + I from the all-ones vector, run separately on each
/// strongly connected component of A (single components when every
/// off-diagonal entry is positive). The Collatz-Wielandt bounds
/// min_i (Av)_i / v_i <= rho(A) <= max_i (Av)_i / v_i bracket the answer at
/// every step; iteration stops once they meet. An irreducible matrix with
/// equal row sums r returns r on the first step. Throws
/// std::invalid_argument for non-square input or negative entries.
double spectral_radius(const Matrix& a, int max_iter = 10000);

/// rho(Hhat) as the max over per-state blocks.
double rho_blockdiag(const InterferenceOperator& op);

struct ContractionCheck {
  double ratio = 0.0;  // (N-1) * max cross gain / min effective direct gain
  bool ok = true;      // ratio < 1
};

ContractionCheck contraction_condition(const GameSpec& spec);

struct Definiteness {
  bool psd = false;
  bool pd = false;
  double min_sym_eig = 0.0;  // min over blocks of lambda_min(I + (B + B^T)/2)
};

inline constexpr double kDefinitenessTol = 1e-10;

Definiteness definiteness(const InterferenceOperator& op);

/// max over blocks of ||I + Hhat(h)||_2, via power iteration on the Gram
/// matrix of each block.
double htilde_norm(const InterferenceOperator& op);

struct ConditionReport {
  double rho_smax = 0.0;
  double rho_hhat = 0.0;
  double ratio_bound = 0.0;
  bool contraction_ok = true;
  bool htilde_psd = false;
  bool htilde_pd = false;
  double min_sym_eig = 0.0;
};

ConditionReport analyze_conditions(const GameSpec& spec,
                                   const InterferenceOperator& op);

}  // namespace icg
