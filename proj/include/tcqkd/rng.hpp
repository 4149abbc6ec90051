// Counter-based random draws. Every value is a pure function of
// (seed, round, counter), so any round can be regenerated on its own and
// sessions split across workers reproduce the serial result exactly.

#pragma once

#include <cstdint>

namespace tcqkd {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t bits(std::uint64_t round, std::uint64_t counter) const {
    const std::uint64_t key = mix64(seed_ ^ mix64(round));
    return mix64(key ^ mix64(counter ^ 0x632be59bd9b4e019ULL));
  }

  /// Uniform in [0,1) with 53 bits of resolution.
  constexpr double uniform(std::uint64_t round, std::uint64_t counter) const {
    return static_cast<double>(bits(round, counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Sequential view of one round's substream.
class RoundStream {
 public:
  constexpr RoundStream(const CounterRng& rng, std::uint64_t round) : rng_(&rng), round_(round) {}

  double next() { return rng_->uniform(round_, counter_++); }
  int next_bit() { return static_cast<int>(rng_->bits(round_, counter_++) >> 63); }

  std::uint64_t round() const { return round_; }
  std::uint64_t position() const { return counter_; }

 private:
  const CounterRng* rng_;
  std::uint64_t round_;
  std::uint64_t counter_ = 0;
};

}  // namespace tcqkd
