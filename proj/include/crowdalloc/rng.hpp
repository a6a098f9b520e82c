#pragma once

#include <cstdint>
#include <string_view>

namespace crowdalloc {

// SplitMix64 generator.  Chosen over std::mt19937_64 because its output is
// bit-identical across standard libraries and a new independent stream can be
// derived for any key, which is what the per-(seed, run, tweet, round)
// stream scheme needs.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound), bound > 0.  Rejection keeps it unbiased.
  uint64_t below(uint64_t bound) {
    const uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

 private:
  uint64_t state_;
};

inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL));
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Independent consumers of randomness for the same (seed, run, tweet) tuple.
enum class StreamPurpose : uint64_t {
  FirstRound = 1,
  SecondRound = 2,
  TieBreak = 3,
  Generate = 4,
  Pool = 5,
};

// Stream keyed by (master seed, run index, tweet id, purpose).  Results of a
// parallel experiment stay identical under any scheduling because every tweet
// owns its streams.
inline Rng stream_rng(uint64_t master_seed, uint64_t run_index,
                      std::string_view tweet_id, StreamPurpose purpose) {
  uint64_t h = mix64(master_seed + 0x9e3779b97f4a7c15ULL);
  h = hash_combine(h, run_index);
  h = hash_combine(h, fnv1a(tweet_id));
  h = hash_combine(h, static_cast<uint64_t>(purpose));
  return Rng(h);
}

}  // namespace crowdalloc
