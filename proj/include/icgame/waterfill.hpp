#pragma once

// Water-filling best responses and iterative water-filling.

#include "icgame/game.hpp"

#include <string_view>

namespace icg {

struct WaterfillResult {
  Vector powers;          // powers(h) = max(0, level - floors(h))
  double level = 0.0;     // water level chosen so the budget binds
  int active_states = 0;  // states with positive power
};

/// Exact water-filling of `pbar` over per-state floors weighted by `probs`.
///
/// States are sorted by floor (ties by index). For k = 1, 2, ... the level
/// solving sum_{m<=k} probs_m (level - floor_m) = pbar is accepted as soon
/// as it lies below the next floor, so the budget holds with equality.
/// Throws std::invalid_argument on empty or mismatched input or pbar <= 0.
WaterfillResult waterfill(const Vector& floors, const Vector& probs,
                          double pbar);

/// f_i(h) = (1 + sum_{j != i} |h_ij|^2 P_j(h)) / (alpha_i |h_ii|^2).
Vector interference_floor(const GameSpec& spec, const StateSpace& space,
                          const PowerProfile& prof, int i);

WaterfillResult best_response(const GameSpec& spec, const StateSpace& space,
                              const PowerProfile& prof, int i);

/// Simultaneous best response WF(P): every player responds to `prof`.
PowerProfile waterfill_map(const GameSpec& spec, const StateSpace& space,
                           const PowerProfile& prof);

/// ||P - WF(P)||_inf
double waterfill_residual(const GameSpec& spec, const StateSpace& space,
                          const PowerProfile& prof);

enum class IwfScheme { simultaneous, sequential };

std::string_view to_string(IwfScheme s);
IwfScheme iwf_scheme_from_string(std::string_view s);

struct IwfOptions {
  IwfScheme scheme = IwfScheme::simultaneous;
  double tol = 1e-8;
  int max_iter = 500;

  bool operator==(const IwfOptions&) const = default;
};

struct IwfReport {
  PowerProfile profile;
  int iterations = 0;  // best-response rounds applied
  std::vector<double> residual_history;
  bool converged = false;
  IwfScheme scheme = IwfScheme::simultaneous;
};

/// Repeats best responses until ||P - WF(P)||_inf < tol. The returned
/// profile is the last iterate whose residual was measured; iterations
/// counts the update rounds applied to reach it. Non-convergence is
/// reported, not thrown.
IwfReport iterate_waterfilling(const GameSpec& spec, const StateSpace& space,
                               const PowerProfile& init,
                               const IwfOptions& opts = {});

}  // namespace icg
