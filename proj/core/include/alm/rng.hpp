#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace alm {

// SplitMix64 stream keyed by (seed, scenario, step, stream). Every key gives an
// independent sequence, so draws never depend on thread scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t scenario, std::uint64_t step, std::uint64_t stream)
      : state_(mix(mix(mix(mix(seed) ^ scenario) ^ step) ^ stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

inline double keyed_normal(std::uint64_t seed, std::uint64_t scenario, std::uint64_t step,
                           std::uint64_t stream) {
  CounterRng rng(seed, scenario, step, stream);
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace alm
