#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace formspace {

/// std::mt19937_64 with distribution code fixed here rather than left to the
/// standard library, so a seed pins every drawn value on any platform.
/// uniform(): top 53 bits scaled to [0, 1). normal(): Box-Muller, one value
/// per call (the sine partner is discarded).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

  /// Engine state in the textual form of operator<< on std::mt19937_64.
  std::string save_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace formspace
