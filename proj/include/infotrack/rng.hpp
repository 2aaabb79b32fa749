#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "infotrack/angles.hpp"

namespace infotrack {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent stream seed from a master seed, a stream name and an
/// index. All randomness in a run flows from one master seed through this
/// function; streams are identified by (name, index) pairs.
inline std::uint64_t derive_stream(std::uint64_t master, std::string_view name,
                                   std::uint64_t index = 0) {
  return splitmix64(master ^ splitmix64(fnv1a64(name) + 0x9e3779b97f4a7c15ULL * (index + 1)));
}

/// Deterministic random source. Distribution transforms are implemented here
/// (not via std:: distributions) so draws are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    int k = static_cast<int>(uniform01() * n);
    return k < n ? k : n - 1;
  }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace infotrack
