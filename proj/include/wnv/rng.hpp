#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "wnv/errors.hpp"

namespace wnv {

// Deterministic pseudo-random generator. Everything that consumes randomness
// in the toolkit (multi-start jitter, QA sampling, forecast simulation) goes
// through this class so that a seed fully determines every output file.
//
// The generator is splitmix64; the distribution algorithms are implemented
// here instead of delegating to <random> because the standard distributions
// are not bit-reproducible across library implementations, and the
// seed-to-sample mapping is part of the output contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream derived from (seed, stream). Used to give each
  // multi-start index or simulation replicate its own substream.
  Rng split(std::uint64_t stream) const {
    Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased (rejection).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw Error("uniform_below: n must be positive");
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Marsaglia polar method (caches the spare deviate).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  // Poisson by inversion (sequential search). Means in this toolkit are
  // weekly case counts, far below the ~700 where exp(-mean) underflows;
  // beyond that a rounded normal is close enough for forecast bands.
  long poisson(double mean) {
    if (!(mean >= 0.0)) throw Error("poisson: mean must be non-negative");
    if (mean == 0.0) return 0;
    if (mean > 600.0) {
      double draw = mean + std::sqrt(mean) * normal();
      return draw < 0.0 ? 0 : static_cast<long>(std::llround(draw));
    }
    double p = std::exp(-mean);
    double cdf = p;
    double u = uniform01();
    long k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (k > 100000) break;  // guards against u landing on lost mass
    }
    return k;
  }

  // Gamma(shape, scale) via Marsaglia-Tsang, with the usual boost for
  // shape < 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw Error("gamma: shape and scale must be positive");
    if (shape < 1.0) {
      double u = uniform01();
      while (u <= 0.0) u = uniform01();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v * scale;
    }
  }

  // NB2 count: variance mean + mean^2/size, sampled as a gamma-Poisson
  // mixture.
  long negbin(double mean, double size) {
    if (!(mean >= 0.0)) throw Error("negbin: mean must be non-negative");
    if (!(size > 0.0)) throw Error("negbin: size must be positive");
    if (mean == 0.0) return 0;
    double lambda = gamma(size, mean / size);
    return poisson(lambda);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wnv
