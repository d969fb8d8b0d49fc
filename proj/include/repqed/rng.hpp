#pragma once

#include <cmath>
#include <cstdint>

namespace repqed {

// Counter-based generator (splitmix64).  State advances by a fixed odd
// constant, so stream position i is a pure function of (seed, i); the same
// seed reproduces the same doubles on every platform, which keeps Monte Carlo
// results and CSV output byte-identical across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Haar-uniform point on the Bloch sphere: cos(theta) uniform in [-1, 1],
// phi uniform in [0, 2*pi).
struct BlochSample {
  double cos_theta;
  double phi;
};

inline BlochSample haar_bloch_sample(Rng& rng) {
  return {rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * M_PI)};
}

}  // namespace repqed
