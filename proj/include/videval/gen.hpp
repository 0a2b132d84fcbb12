#pragma once

// Seeded synthetic fixture generators. Every output is a pure function of
// (seed, sizes): regenerating with the same arguments is byte-identical.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "videval/pooling.hpp"
#include "videval/submission.hpp"
#include "videval/util.hpp"

namespace videval {

namespace gendetail {

inline std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// Ground-truth relevance is a property of (topic, item), independent of which
// runs retrieve it.
inline bool item_relevant(std::uint64_t seed, const std::string& topic, const std::string& item) {
  return keyed_uniform(seed ^ 0x72656c6576616e74ull, topic, item) < 0.08;
}

}  // namespace gendetail

struct AvsGenSpec {
  int runs = 33;
  int topics = 30;
  int depth = 1000;
  int universe = 5000;  // candidate items per topic
  std::uint64_t seed = 0;
};

// Emits runs/runNN.tsv, strata.tsv and judgments.tsv under dir. Judgments
// follow the standard two-stratum pool (ranks 1-300 at 1.0, 301-depth at
// 0.25) built over the generated runs. The last run is marked novelty so the
// novelty reporting path has a subject.
inline void gen_avs(const std::filesystem::path& dir, const AvsGenSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "runs");

  std::vector<RankedRun> runs;
  for (int r = 0; r < spec.runs; ++r) {
    RankedRun run;
    run.run_tag = "run" + gendetail::pad(r + 1, 2);
    run.task = Task::AVS;
    run.run_kind = (r == spec.runs - 1) ? RunKind::Novelty : RunKind::Common;
    run.training_type = static_cast<TrainingType>(r % 7);
    for (int t = 0; t < spec.topics; ++t) {
      std::string topic = std::to_string(1701 + t);
      SplitMixRng rng = substream(spec.seed, static_cast<std::uint64_t>(r) * 1000 + t);
      std::set<int> chosen;
      auto& list = run.entries[topic];
      while (static_cast<int>(list.size()) < spec.depth) {
        int k = 1 + static_cast<int>(rng.next_below(spec.universe));
        if (!chosen.insert(k).second) continue;
        RunEntry e;
        e.item_id = "shot" + topic + "_" + std::to_string(k);
        e.rank = static_cast<int>(list.size()) + 1;
        e.score = static_cast<double>(spec.depth - e.rank + 1) / spec.depth;
        list.push_back(std::move(e));
      }
      run.processing_time[topic] = round_half_up(5.0 + 55.0 * rng.next_unit(), 3);
    }
    runs.push_back(std::move(run));
  }

  for (const auto& run : runs) {
    std::ofstream out(dir / "runs" / (run.run_tag + ".tsv"), std::ios::binary);
    serialize_run(run, out);
  }

  PoolSpec pool_spec;
  int hi1 = std::min(300, spec.depth);
  pool_spec.strata[1] = StratumDef{1, hi1, 1.0};
  if (spec.depth > hi1) pool_spec.strata[2] = StratumDef{hi1 + 1, spec.depth, 0.25};
  pool_spec.seed = spec.seed;
  PoolSet pools = build_pools(runs, pool_spec);

  JudgmentSet judgments;
  judgments.strata = pool_spec.strata;
  for (const auto& [topic, items] : pools.topics)
    for (const auto& p : items)
      judgments.topics[topic].push_back(
          Judgment{p.item_id, p.stratum_id, gendetail::item_relevant(spec.seed, topic, p.item_id)});

  {
    std::ofstream out(dir / "strata.tsv", std::ios::binary);
    serialize_strata(pool_spec.strata, out);
  }
  {
    std::ofstream out(dir / "judgments.tsv", std::ios::binary);
    serialize_judgments(judgments, out);
  }
}

struct ActevGenSpec {
  int activities = 20;
  int videos = 10;
  bool with_objects = false;  // per-frame boxes for AOD scoring
  std::uint64_t seed = 0;
};

// Emits reference.json and system.json under dir. The system detects most
// reference instances with jittered spans and graded confidences, plus a few
// spurious instances per activity.
inline void gen_actev(const std::filesystem::path& dir, const ActevGenSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  ActivityInstanceSet ref, sys;
  for (int v = 0; v < spec.videos; ++v) {
    std::string vid = "video" + gendetail::pad(v + 1, 3);
    double minutes = 10.0 + static_cast<double>((v * 7) % 20);
    ref.video_durations[vid] = minutes;
    sys.video_durations[vid] = minutes;
  }

  auto add_boxes = [&](ActivityInstance& inst, SplitMixRng& rng, bool jitter) {
    for (int t = inst.begin_frame; t <= inst.end_frame; t += 10) {
      int boxes = 1 + static_cast<int>(rng.next_below(2));
      for (int b = 0; b < boxes; ++b) {
        Box box;
        box.x = 10.0 + 500.0 * rng.next_unit();
        box.y = 10.0 + 300.0 * rng.next_unit();
        box.w = 40.0 + 80.0 * rng.next_unit();
        box.h = 40.0 + 80.0 * rng.next_unit();
        if (jitter) {
          box.x += 4.0 * rng.next_unit() - 2.0;
          box.y += 4.0 * rng.next_unit() - 2.0;
          box.conf = 0.3 + 0.7 * rng.next_unit();
        } else {
          box.conf = 1.0;
        }
        inst.objects[t].push_back(box);
      }
    }
  };

  for (int a = 0; a < spec.activities; ++a) {
    std::string activity = "ACT_" + gendetail::pad(a + 1, 2);
    for (int v = 0; v < spec.videos; ++v) {
      std::string vid = "video" + gendetail::pad(v + 1, 3);
      SplitMixRng rng = substream(spec.seed, static_cast<std::uint64_t>(a) * 1000 + v);
      int instances = static_cast<int>(rng.next_below(4));  // 0..3 per video
      double frames_in_video = ref.video_durations[vid] * 60.0 * 30.0;
      for (int i = 0; i < instances; ++i) {
        ActivityInstance r;
        r.activity = activity;
        r.video_id = vid;
        r.begin_frame = static_cast<int>(rng.next_below(
            static_cast<std::uint64_t>(std::max(1.0, frames_in_video - 400.0))));
        r.end_frame = r.begin_frame + 30 + static_cast<int>(rng.next_below(300));
        if (spec.with_objects) {
          SplitMixRng box_rng = substream(spec.seed ^ 0x626f786573ull,
                                          static_cast<std::uint64_t>(a) * 100000 +
                                              static_cast<std::uint64_t>(v) * 100 + i);
          add_boxes(r, box_rng, false);
        }
        // Detection with probability ~0.8: jittered span, graded confidence.
        if (rng.next_unit() < 0.8) {
          ActivityInstance s = r;
          s.objects.clear();
          int shift = static_cast<int>(rng.next_below(31)) - 15;
          s.begin_frame = std::max(0, r.begin_frame + shift);
          s.end_frame = std::max(s.begin_frame + 10, r.end_frame + shift / 2);
          s.confidence = round_half_up(0.35 + 0.6 * rng.next_unit(), 6);
          if (spec.with_objects) {
            SplitMixRng box_rng = substream(spec.seed ^ 0x626f786573ull,
                                            static_cast<std::uint64_t>(a) * 100000 +
                                                static_cast<std::uint64_t>(v) * 100 + i);
            // Same stream as the reference boxes, so geometry matches...
            ActivityInstance ghost = r;
            ghost.objects.clear();
            add_boxes(ghost, box_rng, false);
            // ...then jitter each box slightly and grade its confidence.
            SplitMixRng jit = substream(spec.seed ^ 0x6a697474ull,
                                        static_cast<std::uint64_t>(a) * 100000 +
                                            static_cast<std::uint64_t>(v) * 100 + i);
            for (auto& [frame, boxes] : ghost.objects)
              for (auto& box : boxes) {
                box.x += 6.0 * jit.next_unit() - 3.0;
                box.y += 6.0 * jit.next_unit() - 3.0;
                box.conf = round_half_up(0.3 + 0.7 * jit.next_unit(), 6);
              }
            s.objects = std::move(ghost.objects);
          }
          sys.instances.push_back(std::move(s));
        }
        ref.instances.push_back(std::move(r));
      }
      // Spurious system instances.
      int extras = static_cast<int>(rng.next_below(3));
      for (int i = 0; i < extras; ++i) {
        ActivityInstance s;
        s.activity = activity;
        s.video_id = vid;
        s.begin_frame = static_cast<int>(rng.next_below(
            static_cast<std::uint64_t>(std::max(1.0, frames_in_video - 200.0))));
        s.end_frame = s.begin_frame + 20 + static_cast<int>(rng.next_below(150));
        s.confidence = round_half_up(0.05 + 0.5 * rng.next_unit(), 6);
        if (spec.with_objects) {
          SplitMixRng box_rng = substream(spec.seed ^ 0x65787472ull,
                                          static_cast<std::uint64_t>(a) * 100000 +
                                              static_cast<std::uint64_t>(v) * 100 + i);
          add_boxes(s, box_rng, true);
        }
        sys.instances.push_back(std::move(s));
      }
    }
  }

  std::sort(ref.instances.begin(), ref.instances.end(),
            [](const ActivityInstance& a, const ActivityInstance& b) {
              return std::tie(a.activity, a.video_id, a.begin_frame, a.end_frame) <
                     std::tie(b.activity, b.video_id, b.begin_frame, b.end_frame);
            });
  std::sort(sys.instances.begin(), sys.instances.end(),
            [](const ActivityInstance& a, const ActivityInstance& b) {
              return std::tie(a.activity, a.video_id, a.begin_frame, a.end_frame, a.confidence) <
                     std::tie(b.activity, b.video_id, b.begin_frame, b.end_frame, b.confidence);
            });

  {
    std::ofstream out(dir / "reference.json", std::ios::binary);
    serialize_activity_set(ref, ActivitySetKind::Reference, out);
  }
  {
    std::ofstream out(dir / "system.json", std::ios::binary);
    serialize_activity_set(sys, ActivitySetKind::System, out);
  }
}

// Small fixtures for the remaining tasks.

inline void gen_dvu(const std::filesystem::path& dir, std::uint64_t seed, int mc = 8, int rl = 6) {
  std::filesystem::create_directories(dir);
  AnswerSheet key, sub;
  SplitMixRng rng = substream(seed, 7001);
  const char* kChoices[] = {"A", "B", "C", "D"};
  for (int i = 0; i < mc; ++i) {
    AnswerEntry k;
    k.query_id = "q" + gendetail::pad(i + 1, 3);
    k.kind = QueryKind::MultipleChoice;
    k.answer = {kChoices[rng.next_below(4)]};
    AnswerEntry s = k;
    if (rng.next_unit() > 0.7) s.answer = {kChoices[rng.next_below(4)]};
    key.entries.push_back(std::move(k));
    sub.entries.push_back(std::move(s));
  }
  for (int i = 0; i < rl; ++i) {
    AnswerEntry k;
    k.query_id = "r" + gendetail::pad(i + 1, 3);
    k.kind = QueryKind::RankedList;
    k.answer = {"cand" + std::to_string(1 + rng.next_below(5))};
    AnswerEntry s;
    s.query_id = k.query_id;
    s.kind = QueryKind::RankedList;
    for (int c = 1; c <= 5; ++c) s.answer.push_back("cand" + std::to_string(c));
    // Shuffle the candidate list deterministically.
    for (std::size_t j = s.answer.size(); j > 1; --j)
      std::swap(s.answer[j - 1], s.answer[rng.next_below(j)]);
    key.entries.push_back(std::move(k));
    sub.entries.push_back(std::move(s));
  }
  std::sort(key.entries.begin(), key.entries.end(),
            [](const AnswerEntry& a, const AnswerEntry& b) { return a.query_id < b.query_id; });
  std::sort(sub.entries.begin(), sub.entries.end(),
            [](const AnswerEntry& a, const AnswerEntry& b) { return a.query_id < b.query_id; });
  {
    std::ofstream out(dir / "key.tsv", std::ios::binary);
    serialize_answer_sheet(key, out);
  }
  {
    std::ofstream out(dir / "submission.tsv", std::ios::binary);
    serialize_answer_sheet(sub, out);
  }
}

inline void gen_msum(const std::filesystem::path& dir, std::uint64_t seed, int systems = 3,
                     int videos = 4) {
  std::filesystem::create_directories(dir);
  std::ostringstream out;
  out << "system_id,video_id,correct,possible,false_claims,"
         "tempo_or_readability,contextuality,redundancy\n";
  for (int s = 0; s < systems; ++s)
    for (int v = 0; v < videos; ++v) {
      SplitMixRng rng = substream(seed ^ 0x6d73756dull, static_cast<std::uint64_t>(s) * 100 + v);
      long possible = 13;
      long correct = static_cast<long>(rng.next_below(possible + 1));
      long false_claims = static_cast<long>(rng.next_below(6));
      int tempo = 1 + static_cast<int>(rng.next_below(7));
      int context = 1 + static_cast<int>(rng.next_below(7));
      int redundancy = 1 + static_cast<int>(rng.next_below(7));
      out << "sys" << (s + 1) << ",vid" << gendetail::pad(v + 1, 2) << ',' << correct << ','
          << possible << ',' << false_claims << ',' << tempo << ',' << context << ','
          << redundancy << "\n";
    }
  std::ofstream f(dir / "msum.csv", std::ios::binary);
  f << out.str();
}

inline void gen_da(const std::filesystem::path& dir, std::uint64_t seed, int workers = 5,
                   int systems = 3, int videos = 4) {
  std::filesystem::create_directories(dir);
  DaRatingFile file;
  for (int w = 0; w < workers; ++w)
    for (int s = 0; s < systems; ++s)
      for (int v = 0; v < videos; ++v) {
        SplitMixRng rng = substream(seed ^ 0x646121ull, (static_cast<std::uint64_t>(w) * 100 + s) *
                                                                100 +
                                                            v);
        DaRating r;
        r.worker_id = "worker" + gendetail::pad(w + 1, 2);
        r.system_id = "sys" + std::to_string(s + 1);
        r.video_id = "vid" + gendetail::pad(v + 1, 2);
        // Worker-specific offset plus system-specific quality signal.
        double base = 30.0 + 8.0 * w + 10.0 * s;
        r.rating = round_half_up(std::min(100.0, base + 20.0 * rng.next_unit()), 2);
        file.records.push_back(std::move(r));
      }
  std::sort(file.records.begin(), file.records.end(), [](const DaRating& a, const DaRating& b) {
    return std::tie(a.worker_id, a.system_id, a.video_id) <
           std::tie(b.worker_id, b.system_id, b.video_id);
  });
  std::ofstream out(dir / "ratings.csv", std::ios::binary);
  serialize_da_ratings(file, out);
}

}  // namespace videval
