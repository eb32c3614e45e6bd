#pragma once

// Portable random numbers: std::mt19937_64 (fully specified by the
// standard) with hand-rolled conversions, so a seed reproduces the same
// stream on every platform and standard library. std::*_distribution is
// deliberately not used because its output is implementation-defined.

#include <cstdint>
#include <random>
#include <vector>

namespace icg {

/// splitmix64 finalizer; derives independent per-stream seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Index drawn from a categorical distribution by inverse CDF.
  std::size_t categorical(const std::vector<double>& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    // rounding left u above the accumulated mass: last nonzero entry
    for (std::size_t k = probs.size(); k-- > 0;) {
      if (probs[k] > 0.0) return k;
    }
    return 0;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace icg
