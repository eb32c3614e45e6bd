#include "icgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace icg {

namespace {

void require_positive(const std::vector<double>& v, const std::string& field) {
  if (v.empty()) throw ValidationError(field, "must not be empty");
  for (double x : v) {
    if (!std::isfinite(x) || x <= 0.0)
      throw ValidationError(field, "entries must be finite and > 0");
  }
}

void require_size(const std::vector<double>& v, int n,
                  const std::string& field) {
  if (static_cast<int>(v.size()) != n) {
    std::ostringstream os;
    os << "expected " << n << " entries, got " << v.size();
    throw ValidationError(field, os.str());
  }
}

}  // namespace

StateSpaceTooLarge::StateSpaceTooLarge(double required, std::size_t cap)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "state space too large: " << required << " states required, cap is "
           << cap;
        return os.str();
      }()),
      required_(required),
      cap_(cap) {}

LinkDistribution LinkDistribution::uniform(int players,
                                           const GainAlphabets& gains) {
  LinkDistribution d;
  d.players = players;
  d.probs.resize(static_cast<std::size_t>(players * players));
  for (int rx = 0; rx < players; ++rx) {
    for (int tx = 0; tx < players; ++tx) {
      const std::size_t n = rx == tx ? gains.direct.size() : gains.cross.size();
      d.link(rx, tx).assign(n, 1.0 / static_cast<double>(n));
    }
  }
  return d;
}

GameSpec GameSpec::symmetric(int players, GainAlphabets gains, double pbar) {
  GameSpec s;
  s.players = players;
  s.dists = LinkDistribution::uniform(players, gains);
  s.gains = std::move(gains);
  s.pbar.assign(static_cast<std::size_t>(players), pbar);
  s.alpha.assign(static_cast<std::size_t>(players), 1.0);
  s.weights.assign(static_cast<std::size_t>(players), 1.0);
  return s;
}

void GameSpec::validate() const {
  if (players < 1) throw ValidationError("players", "must be >= 1");
  require_positive(gains.direct, "direct_gains");
  if (players > 1) require_positive(gains.cross, "cross_gains");
  require_size(pbar, players, "pbar");
  require_positive(pbar, "pbar");
  require_size(alpha, players, "alpha");
  require_positive(alpha, "alpha");
  require_size(weights, players, "weights");
  require_positive(weights, "weights");

  if (dists.players != players ||
      dists.probs.size() != static_cast<std::size_t>(players * players))
    throw ValidationError("link_probs", "dimension does not match players");
  for (int rx = 0; rx < players; ++rx) {
    for (int tx = 0; tx < players; ++tx) {
      const auto& p = dists.link(rx, tx);
      const std::size_t n =
          rx == tx ? gains.direct.size() : gains.cross.size();
      if (p.size() != n)
        throw ValidationError("link_probs",
                              "length does not match alphabet size");
      double total = 0.0;
      for (double x : p) {
        if (!std::isfinite(x) || x < 0.0)
          throw ValidationError("link_probs", "entries must be >= 0");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("link_probs", "each link must sum to 1");
    }
  }
}

double state_count(const GameSpec& spec) {
  const double n = spec.players;
  return std::pow(static_cast<double>(spec.gains.direct.size()), n) *
         std::pow(static_cast<double>(spec.gains.cross.size()), n * (n - 1));
}

std::size_t StateSpace::index_of(const std::vector<std::size_t>& digits) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) idx += digits[k] * strides[k];
  return idx;
}

StateSpace enumerate_states(const GameSpec& spec, std::size_t cap) {
  spec.validate();
  const double required = state_count(spec);
  if (required > static_cast<double>(cap)) throw StateSpaceTooLarge(required, cap);

  const int n = spec.players;
  const std::size_t links = static_cast<std::size_t>(n * n);
  const std::size_t total = static_cast<std::size_t>(required);

  StateSpace space;
  space.players = n;
  space.radices.resize(links);
  space.strides.resize(links);
  for (std::size_t k = 0; k < links; ++k) {
    const bool diag = (k / n) == (k % n);
    space.radices[k] = diag ? spec.gains.direct.size() : spec.gains.cross.size();
  }
  std::size_t stride = 1;
  for (std::size_t k = links; k-- > 0;) {
    space.strides[k] = stride;
    stride *= space.radices[k];
  }

  space.states.resize(total);
  space.probs.resize(static_cast<Eigen::Index>(total));
  std::vector<std::size_t> digits(links, 0);
  for (std::size_t s = 0; s < total; ++s) {
    Matrix g(n, n);
    double p = 1.0;
    for (std::size_t k = 0; k < links; ++k) {
      const int rx = static_cast<int>(k) / n;
      const int tx = static_cast<int>(k) % n;
      const auto& alphabet = rx == tx ? spec.gains.direct : spec.gains.cross;
      g(rx, tx) = alphabet[digits[k]];
      p *= spec.dists.link(rx, tx)[digits[k]];
    }
    space.states[s].gains = std::move(g);
    space.probs[static_cast<Eigen::Index>(s)] = p;

    // odometer increment, last link fastest
    for (std::size_t k = links; k-- > 0;) {
      if (++digits[k] < space.radices[k]) break;
      digits[k] = 0;
    }
  }
  return space;
}

double sinr(const GameSpec& spec, const ChannelState& state,
            const Eigen::Ref<const Vector>& powers, int i) {
  double interference = 0.0;
  for (int j = 0; j < spec.players; ++j) {
    if (j != i) interference += state.gains(i, j) * powers[j];
  }
  return spec.effective_direct(i, state.gains(i, i)) * powers[i] /
         (1.0 + interference);
}

double expected_rate(const GameSpec& spec, const StateSpace& space,
                     const PowerProfile& prof, int i) {
  double r = 0.0;
  for (std::size_t h = 0; h < space.size(); ++h) {
    const auto col = static_cast<Eigen::Index>(h);
    const double p = space.probs[col];
    if (p == 0.0) continue;
    r += p * std::log1p(sinr(spec, space.states[h], prof.col(col), i));
  }
  return r;
}

double average_power(const StateSpace& space, const PowerProfile& prof, int i) {
  return prof.row(i).dot(space.probs);
}

double sum_rate(const GameSpec& spec, const StateSpace& space,
                const PowerProfile& prof) {
  double total = 0.0;
  for (int i = 0; i < spec.players; ++i)
    total += expected_rate(spec, space, prof, i);
  return total;
}

std::vector<bool> is_feasible(const StateSpace& space, const PowerProfile& prof,
                              const std::vector<double>& pbar) {
  std::vector<bool> ok(pbar.size(), false);
  for (std::size_t i = 0; i < pbar.size(); ++i) {
    const auto row = prof.row(static_cast<Eigen::Index>(i));
    ok[i] = (row.array() >= 0.0).all() &&
            average_power(space, prof, static_cast<int>(i)) <=
                pbar[i] + kFeasibilityTol;
  }
  return ok;
}

bool all_feasible(const StateSpace& space, const PowerProfile& prof,
                  const std::vector<double>& pbar) {
  const auto ok = is_feasible(space, prof, pbar);
  return std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
}

PowerProfile constant_profile(const GameSpec& spec, const StateSpace& space) {
  PowerProfile p(spec.players, static_cast<Eigen::Index>(space.size()));
  for (int i = 0; i < spec.players; ++i)
    p.row(i).setConstant(spec.pbar[static_cast<std::size_t>(i)]);
  return p;
}

}  // namespace icg
