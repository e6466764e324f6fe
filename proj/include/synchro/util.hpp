#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace synchro {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

// Letters are small integers in [0, k); a word is a sequence applied left to right.
using Word = std::vector<u32>;

struct NotSynchronizingError : std::runtime_error {
  NotSynchronizingError() : std::runtime_error("automaton is not synchronizing") {}
};

struct OutOfMemoryError : std::runtime_error {
  explicit OutOfMemoryError(const std::string& what = "memory budget exhausted")
      : std::runtime_error(what) {}
};

struct TimeoutError : std::runtime_error {
  TimeoutError() : std::runtime_error("time limit exceeded") {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Seedable generator used for all randomized construction. The algorithm
// identifier below is reported by the experiment runner so results can be
// reproduced exactly.
inline constexpr const char* kRngId = "splitmix64-rej";

class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    u64 z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform over [0, bound) via rejection sampling, so the distribution does
  // not depend on the standard library.
  u64 below(u64 bound) {
    if (bound <= 1) return 0;
    const u64 rem = (std::numeric_limits<u64>::max() % bound + 1) % bound;
    const u64 limit = std::numeric_limits<u64>::max() - rem;
    u64 x = next();
    while (rem != 0 && x > limit) x = next();
    return x % bound;
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  u64 state_;
};

inline u64 mix_u64(u64 x) {
  SplitMix64 g(x);
  return g.next();
}

// Byte accounting for the search engine. A StateSet is charged
// ceil(n/64) machine words; every live list adds a fixed overhead.
class MemoryLedger {
 public:
  static constexpr u64 kListOverhead = 64;

  explicit MemoryLedger(u64 budget) : budget_(budget) {}

  u64 budget() const { return budget_; }
  u64 used() const { return used_; }
  u64 peak() const { return peak_; }
  u64 available() const { return used_ >= budget_ ? 0 : budget_ - used_; }

  bool try_charge(u64 bytes) {
    if (bytes > budget_ || used_ > budget_ - bytes) return false;
    used_ += bytes;
    if (used_ > peak_) peak_ = used_;
    return true;
  }

  void charge_or_throw(u64 bytes) {
    if (!try_charge(bytes)) throw OutOfMemoryError();
  }

  void release(u64 bytes) { used_ = bytes > used_ ? 0 : used_ - bytes; }

 private:
  u64 budget_;
  u64 used_ = 0;
  u64 peak_ = 0;
};

class Deadline {
 public:
  Deadline() = default;

  static Deadline none() { return Deadline(); }

  static Deadline after_seconds(double s) {
    Deadline d;
    d.at_ = std::chrono::steady_clock::now() +
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(s));
    return d;
  }

  static Deadline from_limit(const std::optional<double>& seconds) {
    return seconds && *seconds > 0 ? after_seconds(*seconds) : none();
  }

  bool expired() const { return at_ && std::chrono::steady_clock::now() >= *at_; }

  void check() const {
    if (expired()) throw TimeoutError();
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> at_;
};

}  // namespace synchro
