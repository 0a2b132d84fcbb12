#pragma once

// Assessment-pool construction via the two-stratum dedup-and-sample workflow,
// plus pool/judging statistics and uniqueness reports.
//
// Sampling uses a keyed generator over (seed, topic, item) so that pool
// membership is independent of run-list order and of how work is divided
// across threads.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "videval/submission.hpp"
#include "videval/util.hpp"

namespace videval {

struct PoolSpec {
  std::map<int, StratumDef> strata;  // ascending stratum id, disjoint rank ranges
  int chunk_size = 1000;
  std::uint64_t seed = 0;
};

struct PoolItem {
  std::string item_id;
  int stratum_id = 0;
};

struct PoolChunk {
  std::string file_name;  // pool.<topic>.<index>.txt
  int stratum_id = 0;
  std::vector<std::string> items;  // sorted lexicographically
};

struct PoolSet {
  std::map<std::string, std::vector<PoolItem>> topics;   // sorted by (stratum, item)
  std::map<std::string, std::vector<PoolChunk>> chunks;  // chunk order follows strata
};

inline void validate_pool_spec(const PoolSpec& spec) {
  if (spec.strata.empty()) throw std::invalid_argument("pool spec: no strata");
  if (spec.chunk_size < 1) throw std::invalid_argument("pool spec: chunk_size < 1");
  int prev_hi = 0;
  for (const auto& [id, def] : spec.strata) {
    if (def.rank_lo < 1 || def.rank_hi < def.rank_lo)
      throw std::invalid_argument("pool spec: bad rank range in stratum " + std::to_string(id));
    if (def.rank_lo <= prev_hi)
      throw std::invalid_argument("pool spec: stratum " + std::to_string(id) +
                                  " overlaps or is out of order");
    if (!(def.sampling_rate > 0.0 && def.sampling_rate <= 1.0))
      throw std::invalid_argument("pool spec: sampling rate outside (0,1]");
    prev_hi = def.rank_hi;
  }
}

// Stratum 1 takes every item ranked inside its range by any run, deduplicated.
// Each later stratum samples its dedup union (minus items already pooled by
// earlier strata) per item at its sampling rate.
inline PoolSet build_pools(const std::vector<RankedRun>& runs, const PoolSpec& spec) {
  if (runs.empty()) throw std::invalid_argument("build_pools: empty run set");
  validate_pool_spec(spec);

  std::set<std::string> topics;
  for (const auto& run : runs)
    for (const auto& [topic, list] : run.entries) topics.insert(topic);

  PoolSet pools;
  for (const auto& topic : topics) {
    // Dedup union of submitted items per stratum range.
    std::map<int, std::set<std::string>> candidates;
    for (const auto& run : runs) {
      const auto* list = run.topic_entries(topic);
      if (!list) continue;
      for (const auto& e : *list)
        for (const auto& [sid, def] : spec.strata)
          if (e.rank >= def.rank_lo && e.rank <= def.rank_hi) {
            candidates[sid].insert(e.item_id);
            break;
          }
    }
    std::set<std::string> pooled;
    auto& items = pools.topics[topic];
    auto& chunk_list = pools.chunks[topic];
    int chunk_index = 0;
    for (const auto& [sid, def] : spec.strata) {
      std::vector<std::string> kept;
      for (const auto& item : candidates[sid]) {
        if (pooled.count(item)) continue;  // already pooled by an earlier stratum
        if (def.sampling_rate < 1.0 &&
            keyed_uniform(spec.seed, topic, item) >= def.sampling_rate)
          continue;
        pooled.insert(item);
        kept.push_back(item);
      }
      for (const auto& item : kept) items.push_back(PoolItem{item, sid});
      for (std::size_t off = 0; off < kept.size(); off += spec.chunk_size) {
        PoolChunk chunk;
        chunk.file_name = "pool." + topic + "." + std::to_string(++chunk_index) + ".txt";
        chunk.stratum_id = sid;
        chunk.items.assign(kept.begin() + off,
                           kept.begin() + std::min(off + spec.chunk_size, kept.size()));
        chunk_list.push_back(std::move(chunk));
      }
    }
  }
  return pools;
}

inline nlohmann::ordered_json pool_manifest(const PoolSet& pools, const PoolSpec& spec) {
  nlohmann::ordered_json doc;
  doc["sampling"] = "bernoulli-per-item";
  doc["seed"] = spec.seed;
  doc["chunk_size"] = spec.chunk_size;
  auto& strata = doc["strata"] = nlohmann::ordered_json::object();
  for (const auto& [sid, def] : spec.strata)
    strata[std::to_string(sid)] = {{"rank_lo", def.rank_lo},
                                   {"rank_hi", def.rank_hi},
                                   {"sampling_rate", def.sampling_rate}};
  auto& topics = doc["topics"] = nlohmann::ordered_json::object();
  for (const auto& [topic, chunk_list] : pools.chunks) {
    auto& arr = topics[topic] = nlohmann::ordered_json::array();
    for (const auto& chunk : chunk_list)
      arr.push_back({{"file", chunk.file_name},
                     {"stratum", chunk.stratum_id},
                     {"items", chunk.items.size()}});
  }
  return doc;
}

inline void write_pool_files(const PoolSet& pools, const PoolSpec& spec,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [topic, chunk_list] : pools.chunks) {
    for (const auto& chunk : chunk_list) {
      std::ofstream out(dir / chunk.file_name, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + (dir / chunk.file_name).string());
      for (const auto& item : chunk.items) out << item << "\n";
    }
  }
  std::ofstream manifest(dir / "manifest.json", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest.json");
  manifest << pool_manifest(pools, spec).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Pool and judging statistics

struct PoolTopicStats {
  std::string topic_id;
  long total_submitted = 0;
  long unique_submitted = 0;
  double pct_unique = 0.0;  // 100 * unique/total, 2-decimal half-up
  long judged = 0;
  double pct_unique_judged = 0.0;  // 100 * judged/unique
  long relevant = 0;
  double pct_judged_relevant = 0.0;  // 100 * relevant/judged
};

inline double pct(long num, long den) {
  if (den == 0) return 0.0;  // degenerate denominators print 0.00
  return round_half_up(100.0 * static_cast<double>(num) / static_cast<double>(den), 2);
}

inline std::vector<PoolTopicStats> pool_stats(const std::vector<RankedRun>& runs,
                                              const PoolSet& pools,
                                              const JudgmentSet& judgments) {
  for (const auto& [topic, list] : judgments.topics)
    if (!pools.topics.count(topic))
      throw std::invalid_argument("pool_stats: judged topic " + topic + " not in pool");
  std::vector<PoolTopicStats> table;
  for (const auto& [topic, pooled] : pools.topics) {
    PoolTopicStats row;
    row.topic_id = topic;
    std::set<std::string> unique;
    for (const auto& run : runs) {
      const auto* list = run.topic_entries(topic);
      if (!list) continue;
      row.total_submitted += static_cast<long>(list->size());
      for (const auto& e : *list) unique.insert(e.item_id);
    }
    row.unique_submitted = static_cast<long>(unique.size());
    row.pct_unique = pct(row.unique_submitted, row.total_submitted);
    auto jt = judgments.topics.find(topic);
    if (jt != judgments.topics.end()) {
      row.judged = static_cast<long>(jt->second.size());
      for (const auto& j : jt->second)
        if (j.relevant) ++row.relevant;
    }
    row.pct_unique_judged = pct(row.judged, row.unique_submitted);
    row.pct_judged_relevant = pct(row.relevant, row.judged);
    table.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Uniqueness report

struct UniquenessReport {
  // topic -> (team-unique relevant hits, shared relevant hits)
  std::map<std::string, std::pair<long, long>> per_topic;
  std::map<std::string, long> per_team_unique;
};

// A relevant item is team-unique for a topic iff exactly one team submitted
// it there, at any rank in any of its runs. Runs missing from team_of count
// as their own single-run team.
inline UniquenessReport uniqueness_report(const std::vector<RankedRun>& runs,
                                          const JudgmentSet& judgments,
                                          const std::map<std::string, std::string>& team_of) {
  auto team_for = [&](const std::string& run_tag) {
    auto it = team_of.find(run_tag);
    return it == team_of.end() ? run_tag : it->second;
  };
  UniquenessReport report;
  for (const auto& [topic, judged] : judgments.topics) {
    std::set<std::string> relset = judgments.relevant_items(topic);
    std::map<std::string, std::set<std::string>> teams_with;  // item -> teams
    for (const auto& run : runs) {
      const auto* list = run.topic_entries(topic);
      if (!list) continue;
      for (const auto& e : *list)
        if (relset.count(e.item_id)) teams_with[e.item_id].insert(team_for(run.run_tag));
    }
    auto& [unique, shared] = report.per_topic[topic];
    for (const auto& [item, teams] : teams_with) {
      if (teams.size() == 1) {
        ++unique;
        ++report.per_team_unique[*teams.begin()];
      } else if (teams.size() > 1) {
        ++shared;
      }
    }
  }
  return report;
}

}  // namespace videval
