#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#include "icgame/game.hpp"
#include "icgame/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <vector>

namespace icg::oracle {

inline GameSpec example1(double pbar = 1.0) {
  return GameSpec::symmetric(3, {{3.0, 1.5}, {0.1, 0.5}}, pbar);
}

inline GameSpec example2(double pbar = 1.0) {
  return GameSpec::symmetric(3, {{0.3, 1.0}, {0.2, 0.1}}, pbar);
}

/// Instance showing positive definiteness without contraction.
inline GameSpec counterexample(double pbar = 1.0) {
  return GameSpec::symmetric(3, {{0.3, 0.6}, {0.2, 0.1}}, pbar);
}

/// Visits every channel state by recursion over links, in row-major link
/// order with the first link varying slowest.
inline void for_each_state(
    const GameSpec& spec,
    const std::function<void(const Matrix& gains, double prob)>& visit) {
  const int n = spec.players;
  Matrix g(n, n);
  std::function<void(int, double)> rec = [&](int link, double prob) {
    if (link == n * n) {
      visit(g, prob);
      return;
    }
    const int rx = link / n;
    const int tx = link % n;
    const auto& alphabet = rx == tx ? spec.gains.direct : spec.gains.cross;
    const auto& probs = spec.dists.link(rx, tx);
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      g(rx, tx) = alphabet[a];
      rec(link + 1, prob * probs[a]);
    }
  };
  rec(0, 1.0);
}

/// E[log(1 + SINR_i)] by re-enumerating the channel from scratch.
inline double brute_force_rate(const GameSpec& spec, const PowerProfile& prof,
                               int i) {
  double total = 0.0;
  long state = 0;
  for_each_state(spec, [&](const Matrix& g, double prob) {
    double denom = 1.0;
    for (int j = 0; j < spec.players; ++j)
      if (j != i) denom += g(i, j) * prof(j, state);
    const double gamma = spec.alpha[static_cast<std::size_t>(i)] * g(i, i) * prof(i, state) / denom;
    if (prob > 0.0) total += prob * std::log(1.0 + gamma);
    ++state;
  });
  return total;
}

/// Water level by bisection on the budget equation.
inline double waterfill_level_bisection(const Vector& floors, const Vector& probs,
                                        double pbar) {
  auto spent = [&](double level) {
    return (level - floors.array()).max(0.0).matrix().dot(probs);
  };
  double lo = floors.minCoeff();
  double hi = floors.maxCoeff() + pbar / probs.maxCoeff() + 1.0;
  while (spent(hi) < pbar) hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spent(mid) < pbar ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// max |lambda| from a general dense eigensolver.
inline double dense_spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double jacobi_min_eigenvalue(Matrix a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  return a.diagonal().minCoeff();
}

/// Random game with N <= max_players, alphabets of size <= 3 and at most
/// `cap` states. alpha = weights = 1.
inline GameSpec random_spec(Rng& rng, int max_players = 4, bool uniform = true,
                            double cap = 20000) {
  for (;;) {
    GameSpec s;
    s.players = 1 + static_cast<int>(rng.uniform() * max_players);
    const auto n1 = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    const auto n2 = 1 + static_cast<std::size_t>(rng.uniform() * 3);
    for (std::size_t k = 0; k < n1; ++k) s.gains.direct.push_back(rng.uniform(0.1, 3.0));
    for (std::size_t k = 0; k < n2; ++k) s.gains.cross.push_back(rng.uniform(0.01, 1.5));
    s.dists = LinkDistribution::uniform(s.players, s.gains);
    if (!uniform) {
      for (auto& p : s.dists.probs) {
        double total = 0.0;
        for (auto& x : p) total += (x = rng.uniform(0.05, 1.0));
        for (auto& x : p) x /= total;
      }
    }
    s.pbar.resize(static_cast<std::size_t>(s.players));
    for (auto& b : s.pbar) b = rng.uniform(0.2, 3.0);
    s.alpha.assign(static_cast<std::size_t>(s.players), 1.0);
    s.weights.assign(static_cast<std::size_t>(s.players), 1.0);
    if (state_count(s) <= cap) return s;
  }
}

/// Random profile on the budget faces: uniform entries, rows rescaled.
inline PowerProfile random_tight_profile(const GameSpec& spec, const Vector& probs,
                                         Rng& rng) {
  PowerProfile p(spec.players, probs.size());
  for (int i = 0; i < spec.players; ++i) {
    for (Eigen::Index h = 0; h < probs.size(); ++h)
      p(i, h) = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 3.0);
    if (p.row(i).dot(probs) <= 0.0) p(i, 0) = 1.0 / probs[0];
    p.row(i) *= spec.pbar[static_cast<std::size_t>(i)] / p.row(i).dot(probs);
  }
  return p;
}

}  // namespace icg::oracle
