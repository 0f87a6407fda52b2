#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace oamnet {

/// Deterministic random stream. Every stochastic operation in the simulator
/// draws from an explicitly seeded Rng; there is no ambient entropy, so a
/// session replays bit-identically from its seed. Draw recipes use fixed bit
/// manipulation on the mt19937_64 word stream (which the standard pins down),
/// so transcripts are also stable across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * kInv53; }

  int bit() { return static_cast<int>(next_u64() & 1u); }

  /// True with probability p. Exact at the endpoints: p=0 never, p=1 always.
  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n). Multiply-shift reduction; bias < 2^-64.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  static constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  std::mt19937_64 engine_;
};

}  // namespace oamnet
