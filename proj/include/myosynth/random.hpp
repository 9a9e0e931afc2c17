#pragma once

#include <cmath>
#include <cstdint>

namespace myosynth {

/// SplitMix64 finalizer; the building block of every stateless hash here.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ mix64(v + 0x632be59bd9b4e019ULL));
}

/// Counter-based hash of a lattice coordinate under a stream seed.
constexpr std::uint64_t hash_cell(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return hash_combine(hash_combine(seed, static_cast<std::uint64_t>(i)), static_cast<std::uint64_t>(j));
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Small sequential generator with a fully specified output mapping, so
/// sampled values do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  double uniform() { return to_unit(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next() % span);
  }
  bool bernoulli(double p) { return uniform() < p; }

  /// Box-Muller; consumes exactly two draws.
  double normal(double mean, double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Normal restricted to [lo, hi] by rejection.
  double truncated_normal(double mean, double stddev, double lo, double hi) {
    if (stddev <= 0.0) return std::fmin(std::fmax(mean, lo), hi);
    for (int i = 0; i < 10000; ++i) {
      double v = normal(mean, stddev);
      if (v >= lo && v <= hi) return v;
    }
    return std::fmin(std::fmax(mean, lo), hi);
  }

  /// Knuth's method for small means, normal approximation above 60.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 60.0) {
      double v = std::round(normal(mean, std::sqrt(mean)));
      return v < 0.0 ? 0 : static_cast<int>(v);
    }
    double limit = std::exp(-mean);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }

 private:
  std::uint64_t state_;
};

}  // namespace myosynth
