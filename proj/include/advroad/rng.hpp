#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace advroad {

// Deterministic splittable RNG. All randomness in the pipeline flows from one
// root seed split into named component streams, so individual components can be
// re-seeded and re-run independently of each other. Portable: no libstdc++
// distribution internals, identical sequences on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform in [0,1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  long uniform_int(long lo, long hi_inclusive) {
    const auto span = static_cast<std::uint64_t>(hi_inclusive - lo) + 1;
    return lo + static_cast<long>(next_u64() % span);
  }

  // Standard normal via Box-Muller; one fresh pair per call keeps the stream
  // position independent of caller parity.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  // Derive an independent stream for a named component (and optional index).
  Rng split(std::string_view tag, std::uint64_t index = 0) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : tag) h = (h ^ std::uint64_t(static_cast<unsigned char>(c))) * 0x100000001b3ull;
    h ^= mix(index + 0x632be59bd9b4e019ull);
    return Rng(mix(state_ ^ h));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static std::uint64_t splitmix(std::uint64_t z) { return mix(z + 0x9e3779b97f4a7c15ull); }

  std::uint64_t state_;
};

}  // namespace advroad
