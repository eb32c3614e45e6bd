#include "icgame/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace icg {

WaterfillResult waterfill(const Vector& floors, const Vector& probs,
                          double pbar) {
  const Eigen::Index n = floors.size();
  if (n == 0) throw std::invalid_argument("waterfill: empty state list");
  if (probs.size() != n)
    throw std::invalid_argument("waterfill: floors/probs size mismatch");
  if (!(pbar > 0.0)) throw std::invalid_argument("waterfill: pbar must be > 0");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return floors[a] < floors[b];
  });

  double mass = 0.0;
  double weighted_floor = 0.0;
  double level = floors[order.back()];
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Eigen::Index s = order[k];
    mass += probs[s];
    weighted_floor += probs[s] * floors[s];
    if (mass <= 0.0) continue;
    level = (pbar + weighted_floor) / mass;
    if (k + 1 == order.size() || level < floors[order[k + 1]]) break;
  }

  WaterfillResult r;
  r.level = level;
  r.powers = (level - floors.array()).max(0.0).matrix();
  r.active_states = static_cast<int>((r.powers.array() > 0.0).count());
  return r;
}

Vector interference_floor(const GameSpec& spec, const StateSpace& space,
                          const PowerProfile& prof, int i) {
  Vector f(static_cast<Eigen::Index>(space.size()));
  for (std::size_t h = 0; h < space.size(); ++h) {
    const Matrix& g = space.states[h].gains;
    const auto col = static_cast<Eigen::Index>(h);
    double noise = 1.0;
    for (int j = 0; j < spec.players; ++j) {
      if (j != i) noise += g(i, j) * prof(j, col);
    }
    f[col] = noise / spec.effective_direct(i, g(i, i));
  }
  return f;
}

WaterfillResult best_response(const GameSpec& spec, const StateSpace& space,
                              const PowerProfile& prof, int i) {
  return waterfill(interference_floor(spec, space, prof, i), space.probs,
                   spec.pbar[static_cast<std::size_t>(i)]);
}

PowerProfile waterfill_map(const GameSpec& spec, const StateSpace& space,
                           const PowerProfile& prof) {
  PowerProfile next(prof.rows(), prof.cols());
  for (int i = 0; i < spec.players; ++i)
    next.row(i) = best_response(spec, space, prof, i).powers.transpose();
  return next;
}

double waterfill_residual(const GameSpec& spec, const StateSpace& space,
                          const PowerProfile& prof) {
  return (prof - waterfill_map(spec, space, prof)).cwiseAbs().maxCoeff();
}

std::string_view to_string(IwfScheme s) {
  return s == IwfScheme::simultaneous ? "simultaneous" : "sequential";
}

IwfScheme iwf_scheme_from_string(std::string_view s) {
  if (s == "simultaneous") return IwfScheme::simultaneous;
  if (s == "sequential") return IwfScheme::sequential;
  throw ValidationError("scheme", "expected simultaneous or sequential, got '" +
                                      std::string(s) + "'");
}

IwfReport iterate_waterfilling(const GameSpec& spec, const StateSpace& space,
                               const PowerProfile& init,
                               const IwfOptions& opts) {
  IwfReport rep;
  rep.scheme = opts.scheme;
  PowerProfile p = init;
  for (int round = 0;; ++round) {
    PowerProfile wf = waterfill_map(spec, space, p);
    const double residual = (p - wf).cwiseAbs().maxCoeff();
    rep.residual_history.push_back(residual);
    if (residual < opts.tol) {
      rep.converged = true;
      break;
    }
    if (round == opts.max_iter) break;

    if (opts.scheme == IwfScheme::simultaneous) {
      p = std::move(wf);
    } else {
      for (int i = 0; i < spec.players; ++i)
        p.row(i) = best_response(spec, space, p, i).powers.transpose();
    }
    rep.iterations = round + 1;
  }
  rep.profile = std::move(p);
  return rep;
}

}  // namespace icg
