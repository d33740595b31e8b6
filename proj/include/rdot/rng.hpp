#ifndef RDOT_RNG_HPP
#define RDOT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rdot {

// Fully specified PRNG stack so generated datasets are reproducible
// byte-for-byte: SplitMix64 (Steele et al.) seeds xoshiro256++ (Blackman &
// Vigna), and Gaussians come from Box-Muller on 53-bit uniforms.

struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  /// Counter-based stream: block `index` of dataset `seed` always sees the
  /// same state regardless of generation order or thread count.
  static Xoshiro256pp for_block(uint64_t seed, uint64_t index) {
    SplitMix64 sm(seed);
    const uint64_t base = sm.next();
    return Xoshiro256pp(base + (index + 1) * 0x9E3779B97F4A7C15ULL);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in (0, 1]: 53 high bits, shifted off zero so log() is safe.
  double uniform() { return double((next() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the cosine branch of each pair is
  /// returned first and the sine branch cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rdot

#endif  // RDOT_RNG_HPP
