#pragma once

#include "mjpot/graph.hpp"

#include <cstdint>
#include <vector>

namespace mjpot::sim {

struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ with SplitMix64 state expansion. Small, fast, and pinned so
/// seeded runs reproduce bit for bit across platforms.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1); never returns an endpoint, so
  /// exponential draws are always positive and finite.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

/// Independent stream for one sample index: the index is folded into the
/// seed before state expansion, so estimates are order-independent and any
/// sample can be reproduced alone.
inline Xoshiro256pp sample_stream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 sm(seed ^ ((index + 1) * 0xD1B54A32D192ED03ULL));
  return Xoshiro256pp(sm.next());
}

enum class StopKind { Horizon, Hit, Escape };

struct StopRule {
  StopKind kind = StopKind::Horizon;
  double horizon = 0.0;
  int target = -1;
  std::vector<char> inside;  // membership mask for escape stops

  static StopRule at_horizon(double T);
  static StopRule on_hit(int target);
  static StopRule on_escape(const std::vector<int>& interior, int n_states);
};

enum class Termination { Horizon, Hit, Escaped };

struct Jump {
  double holding = 0.0;
  int to = -1;
};

struct Trajectory {
  int initial = -1;
  std::vector<Jump> jumps;
  int terminal = -1;
  Termination reason = Termination::Horizon;
  double elapsed = 0.0;
};

/// One exact jump-process path: exponential holding times from the exit
/// rate, next state by cumulative rate scan, stopped by the rule.
Trajectory sample_path(const RateGraph& g, int start, const StopRule& rule, Xoshiro256pp& rng);

/// Single path from its own stream; sample_path(g, x, rule, seed) is the
/// first path of estimate runs with the same seed.
Trajectory sample_path(const RateGraph& g, int start, const StopRule& rule, std::uint64_t seed);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t count = 0;
  std::uint64_t seed = 0;
};

McEstimate estimate_mfpt(const RateGraph& g, int from, int to, std::int64_t samples,
                         std::uint64_t seed);

/// Mean accumulated f until escaping the interior, started inside it.
McEstimate estimate_stopped_accumulation(const RateGraph& g, int start,
                                         const std::vector<int>& interior, const ScalarField& f,
                                         std::int64_t samples, std::uint64_t seed);

/// Mean accumulated centered f from x until first hitting y.
McEstimate estimate_pair_accumulation(const RateGraph& g, const ScalarField& f, int x, int y,
                                      std::int64_t samples, std::uint64_t seed);

/// Mean accumulated centered f over a fixed horizon; the horizon must cover
/// several mixing times of the generator.
McEstimate estimate_excess(const RateGraph& g, const ScalarField& f, int start, double horizon,
                           std::int64_t samples, std::uint64_t seed);

}  // namespace mjpot::sim
