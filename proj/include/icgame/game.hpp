#pragma once

// Channel model and power policies for the stochastic interference game.
//
// N transmitter/receiver pairs share a channel whose power gains are drawn
// i.i.d. per slot from finite alphabets. A stationary policy assigns every
// player a transmit power per channel state; PowerProfile stores these as
// an N x N1 matrix (row = player, column = state in StateSpace order).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace icg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row i holds player i's policy P_i(h); column h follows StateSpace order.
using PowerProfile = Eigen::MatrixXd;

/// Tolerance used when checking average-power budgets.
inline constexpr double kFeasibilityTol = 1e-9;

/// Default limit on the number of enumerated channel states.
inline constexpr std::size_t kDefaultStateCap = 100000;

/// Thrown when a game or configuration violates an invariant. `field()`
/// names the offending parameter.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class StateSpaceTooLarge : public std::runtime_error {
 public:
  StateSpaceTooLarge(double required, std::size_t cap);
  double required() const noexcept { return required_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  double required_;
  std::size_t cap_;
};

struct GainAlphabets {
  std::vector<double> direct;  // |h_ii|^2 values
  std::vector<double> cross;   // |h_ij|^2 values, i != j

  bool operator==(const GainAlphabets&) const = default;
};

/// Categorical distribution per ordered link (rx, tx): over the direct
/// alphabet when rx == tx, over the cross alphabet otherwise.
struct LinkDistribution {
  int players = 0;
  std::vector<std::vector<double>> probs;  // index rx * players + tx

  static LinkDistribution uniform(int players, const GainAlphabets& gains);

  const std::vector<double>& link(int rx, int tx) const {
    return probs[static_cast<std::size_t>(rx * players + tx)];
  }
  std::vector<double>& link(int rx, int tx) {
    return probs[static_cast<std::size_t>(rx * players + tx)];
  }

  bool operator==(const LinkDistribution&) const = default;
};

struct GameSpec {
  int players = 0;
  GainAlphabets gains;
  LinkDistribution dists;
  std::vector<double> pbar;     // average power budgets
  std::vector<double> alpha;    // modulation/coding constants
  std::vector<double> weights;  // weighted-sum (Pareto) weights

  /// Uniform link distributions, alpha = weights = 1.
  static GameSpec symmetric(int players, GainAlphabets gains, double pbar);

  /// Throws ValidationError naming the first inconsistent field.
  void validate() const;

  /// alpha_i * g: the direct gain as seen in the SINR numerator.
  double effective_direct(int i, double direct_gain) const {
    return alpha[static_cast<std::size_t>(i)] * direct_gain;
  }

  bool operator==(const GameSpec&) const = default;
};

/// gains(i, j) = |h_ij|^2, power gain from transmitter j to receiver i.
struct ChannelState {
  Matrix gains;
};

/// All channel states with their probabilities. The state index is a
/// mixed-radix number over links in row-major (rx, tx) order, link (0,0)
/// being the most significant digit, so ordering is lexicographic in
/// (link index, alphabet index).
struct StateSpace {
  int players = 0;
  std::vector<ChannelState> states;
  Vector probs;
  std::vector<std::size_t> radices;  // alphabet size per link
  std::vector<std::size_t> strides;  // index weight per link

  std::size_t size() const { return states.size(); }

  /// Index of the state whose link k takes alphabet entry digits[k].
  std::size_t index_of(const std::vector<std::size_t>& digits) const;
};

/// Number of states n1^N * n2^(N(N-1)) as a double (no overflow).
double state_count(const GameSpec& spec);

StateSpace enumerate_states(const GameSpec& spec,
                            std::size_t cap = kDefaultStateCap);

/// Gamma_i with unit noise power. `powers` holds one power per player.
double sinr(const GameSpec& spec, const ChannelState& state,
            const Eigen::Ref<const Vector>& powers, int i);

/// E_h[log(1 + Gamma_i)] in nats.
double expected_rate(const GameSpec& spec, const StateSpace& space,
                     const PowerProfile& prof, int i);

double average_power(const StateSpace& space, const PowerProfile& prof,
                     int i);

double sum_rate(const GameSpec& spec, const StateSpace& space,
                const PowerProfile& prof);

/// Per player: all entries >= 0 and average power <= budget + 1e-9.
std::vector<bool> is_feasible(const StateSpace& space,
                              const PowerProfile& prof,
                              const std::vector<double>& pbar);

bool all_feasible(const StateSpace& space, const PowerProfile& prof,
                  const std::vector<double>& pbar);

/// Constant policy P_i(h) = pbar_i.
PowerProfile constant_profile(const GameSpec& spec, const StateSpace& space);

}  // namespace icg
