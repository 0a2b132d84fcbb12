#pragma once

// Submission and reference file formats.
//
// Canonical formats (all UTF-8, line-oriented except activity sets):
//   retrieval run   topic_id <TAB> item_id <TAB> rank <TAB> score <TAB> run_tag
//                   header lines "#meta key=value" carry run_kind, task,
//                   training_type and processing_time.<topic> entries
//   judgments       topic_id <TAB> stratum_id <TAB> item_id <TAB> label(0|1)
//   strata          stratum_id <TAB> rank_lo <TAB> rank_hi <TAB> sampling_rate
//   activity set    one JSON document, see parse_activity_set
//   answer sheet    query_id <TAB> kind(mc|rl) <TAB> answer_or_comma_list
//   DA ratings      CSV with header worker_id,system_id,video_id,rating
//
// Parsers are pure functions over streams; every rejection names the line or
// record that caused it. Parsed values are immutable by convention and safe
// to share across threads.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "videval/util.hpp"

namespace videval {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  explicit ParseError(const std::string& message) : std::runtime_error(message), line_(0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Task { AVS, DSDI };
enum class RunKind { Common, Novelty };
enum class TrainingType { A, D, E, F, L, N, O };
enum class QueryKind { MultipleChoice, RankedList };

inline const char* to_string(Task t) { return t == Task::AVS ? "AVS" : "DSDI"; }
inline const char* to_string(RunKind k) { return k == RunKind::Common ? "common" : "novelty"; }
inline char to_char(TrainingType t) { return "ADEFLNO"[static_cast<int>(t)]; }

inline std::optional<TrainingType> training_type_from(std::string_view s) {
  static constexpr std::string_view kNames = "ADEFLNO";
  if (s.size() != 1) return std::nullopt;
  auto pos = kNames.find(s[0]);
  if (pos == std::string_view::npos) return std::nullopt;
  return static_cast<TrainingType>(pos);
}

struct RunEntry {
  std::string item_id;
  int rank = 0;
  double score = 0.0;
};

// One system's ranked item lists per topic plus submission metadata.
// Invariants after parsing: ranks within a topic are 1..n without gaps or
// duplicates, no duplicate item within a topic, n <= the rank limit.
struct RankedRun {
  std::string run_tag;
  Task task = Task::AVS;
  RunKind run_kind = RunKind::Common;
  TrainingType training_type = TrainingType::D;
  std::map<std::string, std::vector<RunEntry>> entries;          // topic -> by rank
  std::map<std::string, double> processing_time;                 // topic -> seconds

  const std::vector<RunEntry>* topic_entries(const std::string& topic) const {
    auto it = entries.find(topic);
    return it == entries.end() ? nullptr : &it->second;
  }
};

struct StratumDef {
  int rank_lo = 0;
  int rank_hi = 0;
  double sampling_rate = 1.0;
};

struct Judgment {
  std::string item_id;
  int stratum_id = 0;
  bool relevant = false;
};

// Per-topic relevance labels partitioned into sampling strata. Only judged
// items are recorded; strata rank ranges allow reconstructing the stratum of
// unjudged-but-pooled items from their submitted rank.
struct JudgmentSet {
  std::map<std::string, std::vector<Judgment>> topics;
  std::map<int, StratumDef> strata;

  std::set<std::string> relevant_items(const std::string& topic) const {
    std::set<std::string> out;
    auto it = topics.find(topic);
    if (it == topics.end()) return out;
    for (const auto& j : it->second)
      if (j.relevant) out.insert(j.item_id);
    return out;
  }
};

struct Box {
  double x = 0, y = 0, w = 0, h = 0;
  double conf = 0.0;
};

struct ActivityInstance {
  std::string activity;
  std::string video_id;
  int begin_frame = 0;
  int end_frame = 0;                      // inclusive
  double confidence = 0.0;                // system sets only
  std::map<int, std::vector<Box>> objects;  // frame -> boxes

  int span_frames() const { return end_frame - begin_frame + 1; }
};

struct ActivityInstanceSet {
  std::vector<ActivityInstance> instances;
  std::map<std::string, double> video_durations;  // minutes

  double total_minutes() const {
    double m = 0;
    for (const auto& [id, minutes] : video_durations) m += minutes;
    return m;
  }
  std::set<std::string> activities() const {
    std::set<std::string> out;
    for (const auto& inst : instances) out.insert(inst.activity);
    return out;
  }
};

struct AnswerEntry {
  std::string query_id;
  QueryKind kind = QueryKind::MultipleChoice;
  std::vector<std::string> answer;  // one id for mc, ranked candidates for rl
};

struct AnswerSheet {
  std::vector<AnswerEntry> entries;

  const AnswerEntry* find(const std::string& query_id) const {
    for (const auto& e : entries)
      if (e.query_id == query_id) return &e;
    return nullptr;
  }
};

struct DaRating {
  std::string worker_id;
  std::string system_id;
  std::string video_id;
  double rating = 0.0;  // [0,100]
};

struct DaRatingFile {
  std::vector<DaRating> records;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline double parse_real(std::string_view field, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    std::string tmp(field);
    double v = std::stod(tmp, &used);
    if (used != tmp.size()) throw std::invalid_argument("trailing junk");
    if (!std::isfinite(v)) throw std::invalid_argument("not finite");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
}

inline long parse_int(std::string_view field, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    std::string tmp(field);
    long v = std::stol(tmp, &used);
    if (used != tmp.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Retrieval runs

inline RankedRun parse_retrieval_run(std::istream& in, Task task, int rank_limit = 1000,
                                     const std::set<std::string>* known_topics = nullptr) {
  RankedRun run;
  run.task = task;
  std::string line;
  std::size_t lineno = 0;
  bool saw_tag = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    if (sv.rfind("#meta", 0) == 0) {
      std::string_view kv = trim_view(sv.substr(5));
      auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, "meta line without '='");
      std::string key(trim_view(kv.substr(0, eq)));
      std::string val(trim_view(kv.substr(eq + 1)));
      if (key == "run_kind") {
        if (val == "common")
          run.run_kind = RunKind::Common;
        else if (val == "novelty")
          run.run_kind = RunKind::Novelty;
        else
          throw ParseError(lineno, "unknown run_kind '" + val + "'");
      } else if (key == "training_type") {
        auto t = training_type_from(val);
        if (!t) throw ParseError(lineno, "unknown training_type '" + val + "'");
        run.training_type = *t;
      } else if (key == "task") {
        if (val == "AVS")
          run.task = Task::AVS;
        else if (val == "DSDI")
          run.task = Task::DSDI;
        else
          throw ParseError(lineno, "unknown task '" + val + "'");
      } else if (key.rfind("processing_time.", 0) == 0) {
        std::string topic = key.substr(16);
        if (topic.empty()) throw ParseError(lineno, "processing_time without topic");
        double secs = detail::parse_real(val, lineno, "processing time");
        if (secs < 0) throw ParseError(lineno, "processing time must be >= 0");
        run.processing_time[topic] = secs;
      } else {
        throw ParseError(lineno, "unknown meta key '" + key + "'");
      }
      continue;
    }
    if (sv.front() == '#') continue;  // plain comment
    auto fields = split_view(sv, '\t');
    if (fields.size() != 5) throw ParseError(lineno, "expected 5 tab-separated fields");
    std::string topic(trim_view(fields[0]));
    std::string item(trim_view(fields[1]));
    long rank = detail::parse_int(trim_view(fields[2]), lineno, "rank");
    double score = detail::parse_real(trim_view(fields[3]), lineno, "score");
    std::string tag(trim_view(fields[4]));
    if (topic.empty() || item.empty() || tag.empty())
      throw ParseError(lineno, "empty field");
    if (rank < 1) throw ParseError(lineno, "rank must be >= 1");
    if (rank > rank_limit)
      throw ParseError(lineno, "rank " + std::to_string(rank) + " over limit " +
                                   std::to_string(rank_limit) + " for topic " + topic);
    if (known_topics && !known_topics->count(topic))
      throw ParseError(lineno, "unknown topic id " + topic);
    if (!saw_tag) {
      run.run_tag = tag;
      saw_tag = true;
    } else if (tag != run.run_tag) {
      throw ParseError(lineno, "inconsistent run tag '" + tag + "' (expected '" + run.run_tag + "')");
    }
    run.entries[topic].push_back(RunEntry{item, static_cast<int>(rank), score});
  }
  // Per-topic invariants: unique items, ranks exactly 1..n.
  for (auto& [topic, list] : run.entries) {
    std::sort(list.begin(), list.end(),
              [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!seen.insert(list[i].item_id).second)
        throw ParseError("duplicate item " + list[i].item_id + " in topic " + topic);
      if (list[i].rank != static_cast<int>(i) + 1) {
        if (i > 0 && list[i].rank == list[i - 1].rank)
          throw ParseError("duplicate rank " + std::to_string(list[i].rank) + " in topic " + topic);
        throw ParseError("rank gap in topic " + topic + ": expected " + std::to_string(i + 1) +
                         ", got " + std::to_string(list[i].rank));
      }
    }
  }
  return run;
}

// Clamps scores to a non-increasing sequence (running minimum). Rank order is
// authoritative over score order; equal scores at distinct ranks stay as
// submitted. Returns true when any score changed.
inline bool canonicalize_scores(RankedRun& run) {
  bool changed = false;
  for (auto& [topic, list] : run.entries) {
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].score > list[i - 1].score) {
        list[i].score = list[i - 1].score;
        changed = true;
      }
    }
  }
  return changed;
}

inline void serialize_run(const RankedRun& run, std::ostream& out) {
  RankedRun canon = run;
  canonicalize_scores(canon);
  out << "#meta run_kind=" << to_string(canon.run_kind) << "\n";
  out << "#meta task=" << to_string(canon.task) << "\n";
  out << "#meta training_type=" << to_char(canon.training_type) << "\n";
  for (const auto& [topic, secs] : canon.processing_time)
    out << "#meta processing_time." << topic << "=" << format_fixed(secs, 3) << "\n";
  for (const auto& [topic, list] : canon.entries)
    for (const auto& e : list)
      out << topic << '\t' << e.item_id << '\t' << e.rank << '\t' << format_fixed(e.score, 6)
          << '\t' << canon.run_tag << "\n";
}

// ---------------------------------------------------------------------------
// Judgments and strata

inline std::map<int, StratumDef> parse_strata(std::istream& in) {
  std::map<int, StratumDef> strata;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split_view(sv, '\t');
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 tab-separated fields");
    long id = detail::parse_int(trim_view(fields[0]), lineno, "stratum id");
    long lo = detail::parse_int(trim_view(fields[1]), lineno, "rank_lo");
    long hi = detail::parse_int(trim_view(fields[2]), lineno, "rank_hi");
    double rate = detail::parse_real(trim_view(fields[3]), lineno, "sampling_rate");
    if (lo < 1 || hi < lo) throw ParseError(lineno, "bad rank range");
    if (!(rate > 0.0 && rate <= 1.0))
      throw ParseError(lineno, "sampling_rate must be in (0,1]");
    if (!strata.emplace(static_cast<int>(id),
                        StratumDef{static_cast<int>(lo), static_cast<int>(hi), rate})
             .second)
      throw ParseError(lineno, "duplicate stratum id " + std::to_string(id));
  }
  // Ranges must be disjoint and ascending in stratum-id order.
  int prev_hi = 0;
  for (const auto& [id, def] : strata) {
    if (def.rank_lo <= prev_hi)
      throw ParseError("stratum " + std::to_string(id) + " overlaps or is out of order");
    prev_hi = def.rank_hi;
  }
  return strata;
}

inline JudgmentSet parse_judgments(std::istream& in, std::map<int, StratumDef> strata) {
  JudgmentSet js;
  js.strata = std::move(strata);
  std::string line;
  std::size_t lineno = 0;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split_view(sv, '\t');
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 tab-separated fields");
    std::string topic(trim_view(fields[0]));
    long stratum = detail::parse_int(trim_view(fields[1]), lineno, "stratum id");
    std::string item(trim_view(fields[2]));
    std::string_view label = trim_view(fields[3]);
    if (!js.strata.count(static_cast<int>(stratum)))
      throw ParseError(lineno, "unknown stratum id " + std::to_string(stratum));
    if (label != "0" && label != "1") throw ParseError(lineno, "label must be 0 or 1");
    if (!seen.emplace(topic, item).second)
      throw ParseError(lineno, "duplicate judgment for (" + topic + ", " + item + ")");
    js.topics[topic].push_back(
        Judgment{item, static_cast<int>(stratum), label == "1"});
  }
  for (auto& [topic, list] : js.topics)
    std::sort(list.begin(), list.end(), [](const Judgment& a, const Judgment& b) {
      return std::tie(a.stratum_id, a.item_id) < std::tie(b.stratum_id, b.item_id);
    });
  return js;
}

inline void serialize_strata(const std::map<int, StratumDef>& strata, std::ostream& out) {
  for (const auto& [id, def] : strata)
    out << id << '\t' << def.rank_lo << '\t' << def.rank_hi << '\t'
        << format_fixed(def.sampling_rate, 6) << "\n";
}

inline void serialize_judgments(const JudgmentSet& js, std::ostream& out) {
  for (const auto& [topic, list] : js.topics)
    for (const auto& j : list)
      out << topic << '\t' << j.stratum_id << '\t' << j.item_id << '\t' << (j.relevant ? 1 : 0)
          << "\n";
}

// ---------------------------------------------------------------------------
// Activity instance sets

enum class ActivitySetKind { Reference, System };

// Document layout (field names exact):
// {"videoDurations": {"v1": 30.0, ...},
//  "instances": [{"activity": "...", "videoId": "...",
//                 "beginFrame": 10, "endFrame": 50,
//                 "confidence": 0.8,                 // system sets only
//                 "objects": {"10": [{"x":1,"y":2,"w":3,"h":4,"conf":0.9}]}}]}
inline ActivityInstanceSet parse_activity_set(std::istream& in, ActivitySetKind kind) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  ActivityInstanceSet set;
  if (!doc.is_object() || !doc.contains("videoDurations") || !doc.contains("instances"))
    throw ParseError("document must contain videoDurations and instances");
  for (const auto& [vid, minutes] : doc["videoDurations"].items()) {
    double m = minutes.get<double>();
    if (!(m > 0)) throw ParseError("video " + vid + ": duration must be positive");
    set.video_durations[vid] = m;
  }
  std::size_t index = 0;
  for (const auto& j : doc["instances"]) {
    ++index;
    const std::string locus = "instance " + std::to_string(index);
    ActivityInstance inst;
    try {
      inst.activity = j.at("activity").get<std::string>();
      inst.video_id = j.at("videoId").get<std::string>();
      inst.begin_frame = j.at("beginFrame").get<int>();
      inst.end_frame = j.at("endFrame").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(locus + ": " + e.what());
    }
    if (inst.begin_frame > inst.end_frame)
      throw ParseError(locus + ": beginFrame > endFrame");
    if (!set.video_durations.count(inst.video_id))
      throw ParseError(locus + ": no duration entry for video " + inst.video_id);
    if (kind == ActivitySetKind::System) {
      if (!j.contains("confidence"))
        throw ParseError(locus + ": system instance without confidence");
      inst.confidence = j["confidence"].get<double>();
      if (!(inst.confidence >= 0.0 && inst.confidence <= 1.0))
        throw ParseError(locus + ": confidence outside [0,1]");
    }
    if (j.contains("objects")) {
      for (const auto& [frame_str, boxes] : j["objects"].items()) {
        int frame = 0;
        try {
          frame = std::stoi(frame_str);
        } catch (const std::exception&) {
          throw ParseError(locus + ": bad frame key '" + frame_str + "'");
        }
        auto& list = inst.objects[frame];
        for (const auto& b : boxes) {
          Box box;
          try {
            box.x = b.at("x").get<double>();
            box.y = b.at("y").get<double>();
            box.w = b.at("w").get<double>();
            box.h = b.at("h").get<double>();
            box.conf = b.value("conf", kind == ActivitySetKind::Reference ? 1.0 : 0.0);
          } catch (const nlohmann::json::exception& e) {
            throw ParseError(locus + ": " + e.what());
          }
          if (!(box.w > 0) || !(box.h > 0))
            throw ParseError(locus + ": box with nonpositive extent");
          list.push_back(box);
        }
      }
    }
    set.instances.push_back(std::move(inst));
  }
  std::sort(set.instances.begin(), set.instances.end(),
            [](const ActivityInstance& a, const ActivityInstance& b) {
              return std::tie(a.activity, a.video_id, a.begin_frame, a.end_frame, a.confidence) <
                     std::tie(b.activity, b.video_id, b.begin_frame, b.end_frame, b.confidence);
            });
  return set;
}

inline void serialize_activity_set(const ActivityInstanceSet& set, ActivitySetKind kind,
                                   std::ostream& out) {
  nlohmann::ordered_json doc;
  auto& durations = doc["videoDurations"] = nlohmann::ordered_json::object();
  for (const auto& [vid, minutes] : set.video_durations) durations[vid] = minutes;
  auto& instances = doc["instances"] = nlohmann::ordered_json::array();
  for (const auto& inst : set.instances) {
    nlohmann::ordered_json j;
    j["activity"] = inst.activity;
    j["videoId"] = inst.video_id;
    j["beginFrame"] = inst.begin_frame;
    j["endFrame"] = inst.end_frame;
    if (kind == ActivitySetKind::System) j["confidence"] = inst.confidence;
    if (!inst.objects.empty()) {
      auto& objects = j["objects"] = nlohmann::ordered_json::object();
      for (const auto& [frame, boxes] : inst.objects) {
        auto& arr = objects[std::to_string(frame)] = nlohmann::ordered_json::array();
        for (const auto& b : boxes)
          arr.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"conf", b.conf}});
      }
    }
    instances.push_back(std::move(j));
  }
  out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Answer sheets

inline AnswerSheet parse_answer_sheet(std::istream& in) {
  AnswerSheet sheet;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split_view(sv, '\t');
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 tab-separated fields");
    AnswerEntry e;
    e.query_id = std::string(trim_view(fields[0]));
    std::string_view kind = trim_view(fields[1]);
    if (kind == "mc")
      e.kind = QueryKind::MultipleChoice;
    else if (kind == "rl")
      e.kind = QueryKind::RankedList;
    else
      throw ParseError(lineno, "kind must be mc or rl");
    if (!seen.insert(e.query_id).second)
      throw ParseError(lineno, "duplicate query id " + e.query_id);
    std::set<std::string> candidates;
    for (auto part : split_view(trim_view(fields[2]), ',')) {
      std::string id(trim_view(part));
      if (id.empty()) throw ParseError(lineno, "empty answer id");
      if (!candidates.insert(id).second)
        throw ParseError(lineno, "duplicate candidate " + id + " in ranked list");
      e.answer.push_back(std::move(id));
    }
    if (e.kind == QueryKind::MultipleChoice && e.answer.size() != 1)
      throw ParseError(lineno, "multiple-choice answer must be a single id");
    sheet.entries.push_back(std::move(e));
  }
  std::sort(sheet.entries.begin(), sheet.entries.end(),
            [](const AnswerEntry& a, const AnswerEntry& b) { return a.query_id < b.query_id; });
  return sheet;
}

inline void serialize_answer_sheet(const AnswerSheet& sheet, std::ostream& out) {
  for (const auto& e : sheet.entries) {
    out << e.query_id << '\t' << (e.kind == QueryKind::MultipleChoice ? "mc" : "rl") << '\t';
    for (std::size_t i = 0; i < e.answer.size(); ++i) {
      if (i) out << ',';
      out << e.answer[i];
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Direct-assessment ratings

inline DaRatingFile parse_da_ratings(std::istream& in) {
  DaRatingFile file;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty ratings file");
  ++lineno;
  if (std::string(trim_view(line)) != "worker_id,system_id,video_id,rating")
    throw ParseError(1, "expected header worker_id,system_id,video_id,rating");
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    auto fields = split_view(sv, ',');
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 comma-separated fields");
    DaRating r;
    r.worker_id = std::string(trim_view(fields[0]));
    r.system_id = std::string(trim_view(fields[1]));
    r.video_id = std::string(trim_view(fields[2]));
    r.rating = detail::parse_real(trim_view(fields[3]), lineno, "rating");
    if (!(r.rating >= 0.0 && r.rating <= 100.0))
      throw ParseError(lineno, "rating outside [0,100]");
    file.records.push_back(std::move(r));
  }
  std::sort(file.records.begin(), file.records.end(), [](const DaRating& a, const DaRating& b) {
    return std::tie(a.worker_id, a.system_id, a.video_id, a.rating) <
           std::tie(b.worker_id, b.system_id, b.video_id, b.rating);
  });
  return file;
}

inline void serialize_da_ratings(const DaRatingFile& file, std::ostream& out) {
  out << "worker_id,system_id,video_id,rating\n";
  for (const auto& r : file.records)
    out << r.worker_id << ',' << r.system_id << ',' << r.video_id << ','
        << format_fixed(r.rating, 6) << "\n";
}

// ---------------------------------------------------------------------------
// Run validation

// Collects findings without mutating the run. Errors flag invariant breaches
// (possible when a RankedRun was built programmatically); warnings flag
// conditions a submitter likely wants to know about.
inline ValidationReport validate_run(const RankedRun& run, const JudgmentSet* judgments = nullptr,
                                     int rank_limit = 1000) {
  ValidationReport report;
  for (const auto& [topic, list] : run.entries) {
    std::set<std::string> seen;
    bool monotone = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!seen.insert(list[i].item_id).second)
        report.errors.push_back("topic " + topic + ": duplicate item " + list[i].item_id);
      if (list[i].rank != static_cast<int>(i) + 1)
        report.errors.push_back("topic " + topic + ": rank sequence broken at position " +
                                std::to_string(i + 1));
      if (i > 0 && list[i].score > list[i - 1].score) monotone = false;
    }
    if (static_cast<int>(list.size()) > rank_limit)
      report.errors.push_back("topic " + topic + ": " + std::to_string(list.size()) +
                              " entries over limit " + std::to_string(rank_limit));
    if (!monotone)
      report.warnings.push_back("topic " + topic +
                                ": scores increase with rank; canonicalization clamps them");
  }
  if (judgments) {
    for (const auto& [topic, list] : judgments->topics)
      if (!run.entries.count(topic)) report.warnings.push_back("missing topic " + topic);
  }
  return report;
}

}  // namespace videval
