#pragma once

// Statistical post-analysis: paired randomization significance testing,
// Pearson correlation, and direct-assessment standardization/aggregation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "videval/submission.hpp"
#include "videval/util.hpp"

namespace videval {

struct PairedScores {
  std::vector<std::string> topics;
  std::vector<double> a;
  std::vector<double> b;
};

enum class RandStatistic {
  MeanDiff,
  // Under paired sign flips sum(d^2) is invariant, which makes |t| a strictly
  // increasing function of |mean(d)|: both statistics order every assignment
  // identically and yield the same p-value. The flag exists for explicitness.
  TStat,
};

struct RandomizationResult {
  double p = 1.0;
  bool exhaustive = false;
  long assignments = 0;  // 2^n when exhaustive, draws+1 otherwise
};

// Two-sided paired randomization test on the mean difference. All 2^n sign
// assignments are enumerated when n <= exhaustive_limit; larger n uses seeded
// Monte Carlo with p = (qualifying draws + 1)/(iterations + 1), the +1
// counting the identity assignment. Counter-based substreams per fixed-size
// chunk keep the count independent of the thread count.
inline RandomizationResult randomization_test(const PairedScores& pairs,
                                              long iterations = 100000,
                                              std::uint64_t seed = 0,
                                              RandStatistic stat = RandStatistic::MeanDiff,
                                              int jobs = 1,
                                              int exhaustive_limit = 20) {
  (void)stat;  // see RandStatistic: both statistics induce the same test
  if (pairs.a.size() != pairs.b.size())
    throw std::invalid_argument("randomization_test: length mismatch");
  const int n = static_cast<int>(pairs.a.size());
  if (n < 2) throw std::invalid_argument("randomization_test: need at least 2 pairs");

  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = pairs.a[i] - pairs.b[i];
  double observed = 0.0;
  for (double v : d) observed += v;
  observed = std::abs(observed / n);
  const double cutoff = observed - 1e-12;  // absorb round-off ties

  if (exhaustive_limit > 62) throw std::invalid_argument("randomization_test: limit too large");
  RandomizationResult out;
  if (n <= exhaustive_limit) {
    const std::uint64_t total = 1ull << n;
    long count = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += (mask >> i) & 1 ? -d[i] : d[i];
      if (std::abs(sum / n) >= cutoff) ++count;
    }
    out.p = static_cast<double>(count) / static_cast<double>(total);
    out.exhaustive = true;
    out.assignments = static_cast<long>(total);
    return out;
  }

  if (iterations < 1) throw std::invalid_argument("randomization_test: iterations < 1");
  constexpr long kChunk = 4096;
  const long chunks = (iterations + kChunk - 1) / kChunk;
  std::atomic<long> count{0};
  parallel_for(static_cast<std::size_t>(chunks), jobs, [&](std::size_t c) {
    SplitMixRng rng = substream(seed, c);
    const long begin = static_cast<long>(c) * kChunk;
    const long end = std::min(begin + kChunk, iterations);
    long local = 0;
    for (long it = begin; it < end; ++it) {
      double sum = 0.0;
      std::uint64_t bits = 0;
      int left = 0;
      for (int i = 0; i < n; ++i) {
        if (left == 0) {
          bits = rng.next_u64();
          left = 64;
        }
        sum += bits & 1 ? -d[i] : d[i];
        bits >>= 1;
        --left;
      }
      if (std::abs(sum / n) >= cutoff) ++local;
    }
    count += local;
  });
  out.p = static_cast<double>(count.load() + 1) / static_cast<double>(iterations + 1);
  out.exhaustive = false;
  out.assignments = iterations + 1;
  return out;
}

// ---------------------------------------------------------------------------
// Pearson correlation

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("pearson: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Direct-assessment aggregation

struct DaWorkerStats {
  long count = 0;
  double mean = 0.0;
  double sd = 0.0;     // sample sd (n-1)
  bool flagged = false;  // fewer than 2 ratings or zero sd: z pinned to 0
};

struct DaTable {
  std::map<std::string, DaWorkerStats> workers;
  // system -> video -> micro-averaged value over that caption's ratings
  std::map<std::string, std::map<std::string, double>> z_by_system_video;
  std::map<std::string, std::map<std::string, double>> raw_by_system_video;
  std::map<std::string, double> system_z;    // mean over the system's videos
  std::map<std::string, double> system_raw;
};

// z = (rating - worker mean)/worker sd per worker, micro-averaged per
// (system, video), then averaged over videos per system. Workers with fewer
// than 2 ratings or zero sd are flagged and contribute z = 0. The optional
// include list drops all other workers' ratings up front.
inline DaTable da_aggregate(const DaRatingFile& ratings,
                            const std::set<std::string>* include_workers = nullptr) {
  std::vector<const DaRating*> records;
  for (const auto& r : ratings.records)
    if (!include_workers || include_workers->count(r.worker_id)) records.push_back(&r);
  if (records.empty()) throw std::invalid_argument("da_aggregate: no ratings");

  DaTable table;
  std::map<std::string, std::vector<double>> by_worker;
  for (const auto* r : records) by_worker[r->worker_id].push_back(r->rating);
  for (const auto& [worker, values] : by_worker) {
    DaWorkerStats ws;
    ws.count = static_cast<long>(values.size());
    for (double v : values) ws.mean += v;
    ws.mean /= static_cast<double>(values.size());
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - ws.mean) * (v - ws.mean);
      ws.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    ws.flagged = values.size() < 2 || !(ws.sd > 0.0);
    table.workers[worker] = ws;
  }

  std::map<std::string, std::map<std::string, std::pair<double, long>>> z_sum, raw_sum;
  for (const auto* r : records) {
    const DaWorkerStats& ws = table.workers[r->worker_id];
    double z = ws.flagged ? 0.0 : (r->rating - ws.mean) / ws.sd;
    auto& zs = z_sum[r->system_id][r->video_id];
    zs.first += z;
    zs.second += 1;
    auto& rs = raw_sum[r->system_id][r->video_id];
    rs.first += r->rating;
    rs.second += 1;
  }
  for (const auto& [system, videos] : z_sum) {
    double sum = 0.0;
    for (const auto& [video, acc] : videos) {
      double micro = acc.first / static_cast<double>(acc.second);
      table.z_by_system_video[system][video] = micro;
      sum += micro;
    }
    table.system_z[system] = sum / static_cast<double>(videos.size());
  }
  for (const auto& [system, videos] : raw_sum) {
    double sum = 0.0;
    for (const auto& [video, acc] : videos) {
      double micro = acc.first / static_cast<double>(acc.second);
      table.raw_by_system_video[system][video] = micro;
      sum += micro;
    }
    table.system_raw[system] = sum / static_cast<double>(videos.size());
  }
  return table;
}

}  // namespace videval
