#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace quantclt {

// Stream classes keep the variates of structurally different draws
// (path increments, additive shifts, jump marks, ...) on disjoint streams
// even when they share a master seed.
enum class StreamClass : std::uint64_t {
  BasePath = 0x9e01,
  Shift = 0x9e02,
  JumpMarks = 0x9e03,
  Scratch = 0x9e04,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Derives one 64-bit stream key per (master, replication, path, class) tuple.
// Each path owns its engine, so batch contents do not depend on how the
// path loop is scheduled across threads.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t replication,
                                   std::uint64_t path, StreamClass cls) {
  std::uint64_t k = detail::splitmix64(master);
  k = detail::splitmix64(k ^ (0x517cc1b727220a95ULL + replication));
  k = detail::splitmix64(k ^ (0x2545f4914f6cdd1dULL + path));
  k = detail::splitmix64(k ^ static_cast<std::uint64_t>(cls));
  return k;
}

// Counter-seeded engine with explicit uniform/normal draws. The normal
// sampler is Box-Muller with a cached spare, so a given engine always
// produces the same sequence regardless of the calling pattern upstream.
class Rng {
 public:
  explicit Rng(std::uint64_t stream_key) : eng_(stream_key) {}

  Rng(std::uint64_t master, std::uint64_t replication, std::uint64_t path,
      StreamClass cls = StreamClass::BasePath)
      : eng_(derive_stream(master, replication, path, cls)) {}

  // Uniform on (0,1): 53 random bits, never exactly 0 or 1.
  double uniform() {
    const std::uint64_t bits = eng_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace quantclt
