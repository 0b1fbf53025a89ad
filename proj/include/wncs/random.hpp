#pragma once

#include <cstdint>
#include <random>

namespace wncs {

// SplitMix64 finalizer; used only to derive well-separated seeds from
// (base seed, trial, subsystem, stream) tuples.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named substreams of a trial. Plant and measurement noise are separate from
// the channel so that schemes compared on one trial index see identical noise.
enum class Substream : std::uint64_t { kPlant = 1, kMeasurement = 2, kChannel = 3 };

constexpr std::uint64_t derive_seed(std::uint64_t trial_seed, std::uint64_t subsystem,
                                    Substream stream) noexcept {
  return mix_seed(mix_seed(trial_seed ^ mix_seed(subsystem + 1)) +
                  static_cast<std::uint64_t>(stream));
}

// Trial seeds are a pure function of (base seed, trial index), so adding
// trials never perturbs existing ones.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) noexcept {
  return mix_seed(base_seed + trial_index);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  double standard_normal() { return normal_(engine_); }

  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  // Always consumes exactly one draw so stream positions do not depend on p.
  bool bernoulli(double p) {
    const double u = uniform();
    return p >= 1.0 || u < p;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace wncs
