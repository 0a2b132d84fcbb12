#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace videval {

// A metric value plus a degenerate-denominator marker. Conventions in this
// toolkit return 0 with the flag set instead of throwing on empty supports.
struct Scored {
  double value = 0.0;
  bool flagged = false;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable per-key uniform draw in [0,1). Keyed hashing, not a stream: the
// value depends only on (seed, key parts), never on evaluation order.
inline double keyed_uniform(std::uint64_t seed, std::string_view a, std::string_view b) {
  std::uint64_t h = fnv1a64(a);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(b, h);
  h = splitmix64(h ^ splitmix64(seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Counter-based generator for Monte Carlo substreams: chunk i of a seeded
// job always produces the same draws regardless of thread count.
class SplitMixRng {
 public:
  explicit SplitMixRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  bool next_bool() { return (next_u64() & 1ULL) != 0; }
  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_unit() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t state_;
};

inline SplitMixRng substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMixRng(splitmix64(seed ^ splitmix64(index + 0x9e3779b97f4a7c15ULL)));
}

// Half-up rounding to `decimals` places; campaign tables round 88.445 -> 88.45.
inline double round_half_up(double x, int decimals) {
  const long double scale = std::pow(10.0L, decimals);
  const long double scaled = static_cast<long double>(x) * scale;
  const long double r = std::floor(scaled + 0.5L);
  return static_cast<double>(r / scale);
}

inline std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, round_half_up(x, decimals));
  return buf;
}

inline std::vector<std::string_view> split_view(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Runs fn(i) for i in [0, n) over `jobs` threads. Each index is independent;
// callers merge by index so the result never depends on the degree.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace videval
