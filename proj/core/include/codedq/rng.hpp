#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace codedq {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One independent random stream, keyed by (base_seed, stream_id). The
// simulator gives arrivals and every storage unit their own stream so that
// paired-seed runs of different schedulers share the same randomness sources.
// mt19937_64 output is fully specified by the standard and the exponential
// transform below avoids the implementation-defined std distributions, so
// results are bit-reproducible across platforms.
class RandomStream {
 public:
  RandomStream(std::uint64_t base_seed, std::uint64_t stream_id)
      : engine_(splitmix64(splitmix64(base_seed) ^
                           splitmix64(stream_id + 0x632be59bd9b4e019ULL))) {}

  // Uniform in (0, 1]; never returns 0 so log() below stays finite.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::mt19937_64 engine_;
};

// Seed for replication `rep` of a run keyed by base_seed.
inline std::uint64_t replication_seed(std::uint64_t base_seed, int rep) {
  return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(rep) +
                                           0x9e3779b97f4a7c15ULL));
}

}  // namespace codedq
