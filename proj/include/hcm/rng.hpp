#pragma once

// Counter-based random number generation for reproducible parallel
// simulation. Every stream is keyed by a (seed, point, trial) tuple, so
// results do not depend on how trials are scheduled across workers.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hcm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Hash a key tuple into a stream key.
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

// Stateless-per-step generator: output i is splitmix64(key + i). Cheap to
// fork, trivially reproducible, no sequence overlap between distinct keys.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64(key_ + counter_++); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bit() { return (next_u64() & 1ull) != 0; }

  std::uint32_t uniform_below(std::uint32_t n) {
    // Modulo bias is negligible for the small n used here (n <= 2^20).
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  // Standard normal via Box-Muller; second sample of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hcm
