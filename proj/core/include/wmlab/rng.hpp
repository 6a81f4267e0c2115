// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>

namespace wmlab {

// splitmix64: tiny, fast, and identical on every platform.  All randomness
// in the library is derived from it so that runs are reproducible bit for
// bit regardless of the standard library in use.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless mix of a seed and a stream index, used to derive independent
// substreams (per clip, per iteration, ...) from one master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
  splitmix64(s);
  return splitmix64(s);
}

// FNV-1a, used for content digests (oracle logs, config hashes).
inline uint64_t fnv1a(const void* data, size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Small counter-based generator.  Draws are a pure function of the seed and
// the draw index, which makes checkpoint/resume trivially exact.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) { splitmix64(state_); }
  Rng(uint64_t seed, uint64_t stream) : state_(mix_seed(seed, stream)) {}

  uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

  int bit() { return static_cast<int>(next_u64() & 1u); }

  // Box-Muller; we do not use std::normal_distribution because its output
  // sequence is not pinned by the standard.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t state_;
};

}  // namespace wmlab
