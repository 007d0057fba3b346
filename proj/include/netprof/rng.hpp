#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace netprof {

// splitmix64 step; also used to mix substream ids into seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent substream seed from (seed, id). Used for
// per-fold and per-tree streams so parallel and serial runs agree.
inline uint64_t substream(uint64_t seed, uint64_t id) {
  return mix64(seed ^ mix64(id + 0x632be59bd9b4e019ULL));
}

// Small deterministic generator. We avoid std:: distributions because
// their output is implementation-defined; every draw here is pinned.
class Rng {
 public:
  explicit Rng(uint64_t seed = 1) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // uniform on [0, n)
  uint64_t uniform(uint64_t n) { return n ? next_u64() % n : 0; }

  // uniform integer on [lo, hi] inclusive
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(uniform(static_cast<uint64_t>(hi - lo + 1)));
  }

  // uniform real on [0, 1)
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform real on [lo, hi)
  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  bool bernoulli(double p) { return uniform_real() < p; }

  // standard normal via Box-Muller
  double normal() {
    double u1 = uniform_real();
    double u2 = uniform_real();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // first k of a Fisher-Yates shuffle over [0, n)
  std::vector<int> sample_without_replacement(int n, int k, std::vector<int>& scratch) {
    scratch.resize(n);
    for (int i = 0; i < n; ++i) scratch[i] = i;
    if (k > n) k = n;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(uniform(static_cast<uint64_t>(n - i)));
      std::swap(scratch[i], scratch[j]);
    }
    return std::vector<int>(scratch.begin(), scratch.begin() + k);
  }

 private:
  uint64_t state_;
};

}  // namespace netprof
