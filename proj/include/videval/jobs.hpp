#pragma once

// Job orchestration: each cmd_* reads the inputs named by its JobConfig,
// computes one module's scores, and writes CSV/JSON (and SVG) artifacts into
// the output directory. Every artifact is byte-deterministic given the
// config, independently of the parallelism degree.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "videval/config.hpp"
#include "videval/detection.hpp"
#include "videval/gen.hpp"
#include "videval/pooling.hpp"
#include "videval/report.hpp"
#include "videval/retrieval.hpp"
#include "videval/stats.hpp"
#include "videval/submission.hpp"
#include "videval/svg.hpp"
#include "videval/util.hpp"

namespace videval {

namespace jobdetail {

namespace fs = std::filesystem;

inline fs::path out_dir(const JobConfig& config) {
  return fs::path(config.get("out", "."));
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open input file " + path);
  return in;
}

// Re-raise parse failures with the file name prepended.
template <class Fn>
auto parsing(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline std::string num(double v, int decimals = 9) { return format_fixed(v, decimals); }

inline std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
               ? c
               : '_';
  return out.empty() ? std::string("_") : out;
}

inline std::vector<RankedRun> load_runs(const JobConfig& config, Task task) {
  auto paths = config.get_list("runs");
  if (paths.empty()) throw ConfigError("no run files given (setting 'runs')");
  int rank_limit = static_cast<int>(config.get_int("rank_limit", 1000));
  std::vector<RankedRun> runs;
  std::set<std::string> tags;
  for (const auto& path : paths) {
    auto in = open_input(path);
    RankedRun run = parsing(path, [&] { return parse_retrieval_run(in, task, rank_limit); });
    if (!tags.insert(run.run_tag).second)
      throw ConfigError("duplicate run tag '" + run.run_tag + "' in " + path);
    runs.push_back(std::move(run));
  }
  std::sort(runs.begin(), runs.end(),
            [](const RankedRun& a, const RankedRun& b) { return a.run_tag < b.run_tag; });
  return runs;
}

inline JudgmentSet load_judgments(const JobConfig& config,
                                  const std::map<int, StratumDef>* fallback_strata = nullptr) {
  std::map<int, StratumDef> strata;
  if (config.has("strata")) {
    auto path = config.require("strata");
    auto in = open_input(path);
    strata = parsing(path, [&] { return parse_strata(in); });
  } else if (fallback_strata) {
    strata = *fallback_strata;
  } else {
    throw ConfigError("missing required setting 'strata'");
  }
  auto path = config.require("judgments");
  auto in = open_input(path);
  return parsing(path, [&] { return parse_judgments(in, std::move(strata)); });
}

inline std::map<std::string, std::string> load_team_map(const JobConfig& config) {
  std::map<std::string, std::string> team_of;
  if (!config.has("team_map")) return team_of;
  auto path = config.get("team_map");
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto fields = split_view(sv, '\t');
    if (fields.size() != 2)
      throw ParseError(path + ": line " + std::to_string(lineno) + ": expected run_tag<TAB>team");
    team_of[std::string(trim_view(fields[0]))] = std::string(trim_view(fields[1]));
  }
  return team_of;
}

inline unsigned job_count(const JobConfig& config) {
  long jobs = config.get_int("jobs", 1);
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  return static_cast<unsigned>(jobs);
}

}  // namespace jobdetail

// ---------------------------------------------------------------------------
// pool

inline void cmd_pool(const JobConfig& config) {
  using namespace jobdetail;
  std::vector<RankedRun> runs = load_runs(config, Task::AVS);
  PoolSpec spec;
  {
    auto path = config.require("strata");
    auto in = open_input(path);
    spec.strata = parsing(path, [&] { return parse_strata(in); });
  }
  spec.chunk_size = static_cast<int>(config.get_int("chunk_size", 1000));
  spec.seed = config.get_u64("seed", 0);
  PoolSet pools = build_pools(runs, spec);
  write_pool_files(pools, spec, out_dir(config));
}

// ---------------------------------------------------------------------------
// score-avs

inline void cmd_score_avs(const JobConfig& config) {
  using namespace jobdetail;
  std::vector<RankedRun> runs = load_runs(config, Task::AVS);
  JudgmentSet judgments = load_judgments(config);
  const double epsilon = config.get_real("epsilon", 1e-5);
  const unsigned jobs = job_count(config);

  std::vector<std::string> topics;
  for (const auto& [topic, list] : judgments.topics) topics.push_back(topic);
  if (topics.empty()) throw ConfigError("judgment set has no topics");

  struct RunScores {
    std::vector<TopicScore> topics;
    double mean = 0.0;
  };
  std::vector<RunScores> scores(runs.size());
  parallel_for(runs.size(), jobs, [&](std::size_t r) {
    const RankedRun& run = runs[r];
    RunScores rs;
    for (const auto& topic : topics) {
      static const std::vector<RunEntry> kEmpty;
      const auto* entries = run.topic_entries(topic);
      if (!entries) entries = &kEmpty;
      StratifiedJudgments sj = stratified_for_topic(judgments, topic);
      add_run_strata(sj, *entries, judgments.strata);
      Scored x = extended_inferred_ap(item_ids(*entries), sj, epsilon);
      TopicScore ts;
      ts.topic_id = topic;
      ts.metric = "xinfap";
      ts.value = x.value;
      ts.flagged = x.flagged;
      ts.num_judged = static_cast<int>(sj.labels.size());
      for (const auto& [item, rel] : sj.labels) ts.num_relevant += rel ? 1 : 0;
      ts.num_retrieved = static_cast<int>(entries->size());
      rs.topics.push_back(std::move(ts));
    }
    rs.mean = mean_over_topics(rs.topics);
    scores[r] = std::move(rs);
  });

  nlohmann::ordered_json report = make_report(config, "score-avs");
  report["epsilon"] = epsilon;
  std::vector<std::vector<std::string>> rows;
  auto& runs_json = report["runs"] = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const RankedRun& run = runs[r];
    nlohmann::ordered_json rj;
    rj["run_kind"] = to_string(run.run_kind);
    rj["training_type"] = std::string(1, to_char(run.training_type));
    rj["mean_xinfap"] = scores[r].mean;
    auto& tj = rj["topics"] = nlohmann::ordered_json::object();
    for (const auto& ts : scores[r].topics) {
      tj[ts.topic_id] = {{"xinfap", ts.value},
                         {"flagged", ts.flagged},
                         {"judged", ts.num_judged},
                         {"relevant", ts.num_relevant},
                         {"retrieved", ts.num_retrieved}};
      rows.push_back({run.run_tag, ts.topic_id, std::to_string(ts.num_retrieved),
                      std::to_string(ts.num_judged), std::to_string(ts.num_relevant),
                      num(ts.value), ts.flagged ? "1" : "0"});
    }
    rows.push_back({run.run_tag, "ALL", "", "", "", num(scores[r].mean), "0"});
    runs_json[run.run_tag] = std::move(rj);
  }
  write_csv(out_dir(config) / "avs_scores.csv",
            {"run_tag", "topic_id", "retrieved", "judged", "relevant", "xinfap", "flagged"},
            rows);

  // Novelty section for runs submitted as novelty runs: score against the
  // full set minus the same team's common runs.
  std::vector<const RankedRun*> novelty_runs;
  for (const auto& run : runs)
    if (run.run_kind == RunKind::Novelty) novelty_runs.push_back(&run);
  if (!novelty_runs.empty()) {
    auto team_of = load_team_map(config);
    auto team_for = [&](const std::string& tag) {
      auto it = team_of.find(tag);
      return it == team_of.end() ? tag : it->second;
    };
    NoveltyMode mode = NoveltyMode::UniqueOnly;
    std::string mode_name = config.get("novelty_mode", "unique");
    if (mode_name == "all")
      mode = NoveltyMode::AllWeighted;
    else if (mode_name != "unique")
      throw ConfigError("novelty_mode must be 'unique' or 'all'");
    auto& nj = report["novelty"] = nlohmann::ordered_json::object();
    std::vector<std::vector<std::string>> nrows;
    for (const RankedRun* nrun : novelty_runs) {
      std::vector<RankedRun> consider;
      for (const auto& run : runs) {
        bool same_team_common = run.run_kind == RunKind::Common &&
                                team_for(run.run_tag) == team_for(nrun->run_tag);
        if (!same_team_common) consider.push_back(run);
      }
      NoveltyScore ns = novelty_score(*nrun, consider, judgments, mode);
      nj[nrun->run_tag] = {{"m", consider.size()},
                           {"mode", mode == NoveltyMode::UniqueOnly ? "unique" : "all"},
                           {"raw", ns.raw},
                           {"normalized", ns.normalized.value},
                           {"normalized_flagged", ns.normalized.flagged}};
      nrows.push_back({nrun->run_tag, std::to_string(consider.size()), num(ns.raw),
                       num(ns.normalized.value), ns.normalized.flagged ? "1" : "0"});
    }
    write_csv(out_dir(config) / "avs_novelty.csv",
              {"run_tag", "m", "novelty_raw", "novelty_normalized", "flagged"}, nrows);
  }

  // Processing-time-vs-score table when any run reports times.
  bool any_time = false;
  for (const auto& run : runs) any_time = any_time || !run.processing_time.empty();
  if (any_time) {
    std::vector<std::vector<std::string>> trows;
    auto& tj = report["time_vs_score"] = nlohmann::ordered_json::object();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const RankedRun& run = runs[r];
      if (run.processing_time.empty()) continue;
      double mean_secs = 0.0;
      for (const auto& [topic, secs] : run.processing_time) mean_secs += secs;
      mean_secs /= static_cast<double>(run.processing_time.size());
      tj[run.run_tag] = {{"mean_seconds", mean_secs}, {"mean_xinfap", scores[r].mean}};
      trows.push_back({run.run_tag, num(mean_secs, 3), num(scores[r].mean)});
    }
    write_csv(out_dir(config) / "avs_time_vs_score.csv",
              {"run_tag", "mean_seconds", "mean_xinfap"}, trows);
  }

  write_json_report(out_dir(config) / "avs_scores.json", report);
}

// ---------------------------------------------------------------------------
// score-actev

inline void cmd_score_actev(const JobConfig& config) {
  using namespace jobdetail;
  ActivityInstanceSet ref, sys;
  {
    auto path = config.require("ref");
    auto in = open_input(path);
    ref = parsing(path, [&] { return parse_activity_set(in, ActivitySetKind::Reference); });
  }
  {
    auto path = config.require("sys");
    auto in = open_input(path);
    sys = parsing(path, [&] { return parse_activity_set(in, ActivitySetKind::System); });
  }
  std::string mode_name = config.get("mode", "AD");
  DetectionMode mode;
  if (mode_name == "AD")
    mode = DetectionMode::AD;
  else if (mode_name == "AOD")
    mode = DetectionMode::AOD;
  else
    throw ConfigError("mode must be AD or AOD");

  CongruenceParams params;
  params.theta_t = config.get_real("theta_t", 0.0);
  params.theta_s = config.get_real("theta_s", 0.5);
  params.w_tiou = config.get_real("w_tiou", 1.0);
  params.w_conf = config.get_real("w_conf", 1.0);
  params.w_cong = config.get_real("w_cong", 1.0);
  params.c_md = config.get_real("c_md", 1.0);
  params.c_fa = config.get_real("c_fa", 1.0);
  const double pmiss_rfa_target = config.get_real("pmiss_rfa", 0.1);
  const double naudc_target = config.get_real("naudc_rfa", 0.2);
  TfaOptions tfa_opt;
  tfa_opt.fps = config.get_real("fps", 30.0);
  tfa_opt.per_video = config.get_bool("tfa_per_video", false);
  const bool with_tfa = config.get_bool("tfa", false);
  const bool log_x = config.get_bool("log_x", false);
  const unsigned jobs = job_count(config);

  std::vector<std::string> activities;
  for (const auto& a : ref.activities()) activities.push_back(a);
  if (activities.empty()) throw ConfigError("reference set has no activities");
  std::vector<std::string> excluded;  // system-only activities: no reference instances
  for (const auto& a : sys.activities())
    if (!ref.activities().count(a)) excluded.push_back(a);

  struct ActivityResult {
    std::string activity;
    long n_true = 0;
    double pmiss_at = 0.0;
    double naudc_at = 0.0;
    Scored nmode;  // AOD only: mean minMODE over CDs at the operating point
    DetCurve curve;
  };
  std::vector<ActivityResult> results(activities.size());
  parallel_for(activities.size(), jobs, [&](std::size_t i) {
    ActivityResult r;
    r.activity = activities[i];
    ActivityInstanceSet fref = filter_activity(ref, r.activity);
    ActivityInstanceSet fsys = filter_activity(sys, r.activity);
    Alignment alignment = align_instances(fref, fsys, params, mode);
    r.curve = det_curve_from_alignment(alignment, fref, fsys, with_tfa ? &tfa_opt : nullptr);
    r.n_true = r.curve.n_true;
    r.pmiss_at = pmiss_at_rfa(r.curve, pmiss_rfa_target);
    r.naudc_at = naudc(r.curve, naudc_target);
    if (mode == DetectionMode::AOD) {
      std::optional<double> tau = threshold_at_rfa(r.curve, pmiss_rfa_target);
      double sum = 0.0;
      long count = 0;
      if (tau) {
        for (const auto& p : alignment.matched)
          if (fsys.instances[p.sys_index].confidence >= *tau) {
            sum += p.min_mode;
            ++count;
          }
      }
      r.nmode = count > 0 ? Scored{sum / static_cast<double>(count), false} : Scored{0.0, true};
    }
    results[i] = std::move(r);
  });

  nlohmann::ordered_json report = make_report(config, "score-actev");
  report["mode"] = mode_name;
  std::vector<std::string> header{"activity", "n_true", "pmiss_at_rfa", "naudc"};
  if (mode == DetectionMode::AOD) header.push_back("nmode_at_rfa");
  std::vector<std::vector<std::string>> rows;
  auto& aj = report["activities"] = nlohmann::ordered_json::object();
  std::vector<double> pmiss_values, naudc_values, nmode_values;
  for (const auto& r : results) {
    nlohmann::ordered_json one = {{"n_true", r.n_true},
                                  {"pmiss_at_rfa", r.pmiss_at},
                                  {"naudc", r.naudc_at}};
    std::vector<std::string> row{r.activity, std::to_string(r.n_true), num(r.pmiss_at),
                                 num(r.naudc_at)};
    if (mode == DetectionMode::AOD) {
      one["nmode_at_rfa"] = r.nmode.flagged ? nlohmann::ordered_json()
                                            : nlohmann::ordered_json(r.nmode.value);
      row.push_back(r.nmode.flagged ? "" : num(r.nmode.value));
      if (!r.nmode.flagged) nmode_values.push_back(r.nmode.value);
    }
    aj[r.activity] = std::move(one);
    rows.push_back(std::move(row));
    pmiss_values.push_back(r.pmiss_at);
    naudc_values.push_back(r.naudc_at);
  }
  double mean_pmiss = aggregate_activities(pmiss_values);
  double mean_naudc = aggregate_activities(naudc_values);
  std::vector<std::string> mean_row{"MEAN", "", num(mean_pmiss), num(mean_naudc)};
  nlohmann::ordered_json mj = {{"pmiss_at_rfa", mean_pmiss}, {"naudc", mean_naudc}};
  if (mode == DetectionMode::AOD) {
    if (nmode_values.empty()) {
      mean_row.push_back("");
      mj["nmode_at_rfa"] = nlohmann::ordered_json();
    } else {
      double mean_nmode = aggregate_activities(nmode_values);
      mean_row.push_back(num(mean_nmode));
      mj["nmode_at_rfa"] = mean_nmode;
    }
  }
  rows.push_back(std::move(mean_row));
  report["mean"] = std::move(mj);
  report["excluded_activities"] = excluded;
  report["operating_points"] = {{"pmiss_rfa", pmiss_rfa_target}, {"naudc_rfa", naudc_target}};
  write_csv(out_dir(config) / "actev_scores.csv", header, rows);

  // Per-activity DET artifacts.
  for (const auto& r : results) {
    std::vector<std::string> det_header{"threshold", "pmiss", "rfa"};
    if (with_tfa) det_header.push_back("tfa");
    std::vector<std::vector<std::string>> det_rows;
    SvgSeries series;
    series.label = r.activity;
    for (const auto& p : r.curve.points) {
      std::vector<std::string> row{num(p.threshold), num(p.pmiss), num(p.rfa)};
      if (with_tfa) row.push_back(p.tfa ? num(*p.tfa) : "");
      det_rows.push_back(std::move(row));
      series.points.emplace_back(p.rfa, p.pmiss);
    }
    std::string stem = "det." + sanitize(r.activity);
    write_csv(out_dir(config) / (stem + ".csv"), det_header, det_rows);
    write_text_file(out_dir(config) / (stem + ".svg"),
                    svg_line_plot("DET " + r.activity, "RFA (false alarms per minute)", "Pmiss",
                                  {series}, log_x));
  }

  // Mean DET curve: average the step functions over the union RFA grid.
  std::set<double> grid;
  for (const auto& r : results)
    for (const auto& p : r.curve.points) grid.insert(p.rfa);
  std::vector<std::vector<std::string>> mean_rows;
  SvgSeries mean_series;
  mean_series.label = "mean";
  for (double x : grid) {
    double sum = 0.0;
    for (const auto& r : results) sum += pmiss_at_rfa(r.curve, x);
    double mean = sum / static_cast<double>(results.size());
    mean_rows.push_back({num(x), num(mean)});
    mean_series.points.emplace_back(x, mean);
  }
  write_csv(out_dir(config) / "det.mean.csv", {"rfa", "mean_pmiss"}, mean_rows);
  write_text_file(out_dir(config) / "det.mean.svg",
                  svg_line_plot("DET mean over activities", "RFA (false alarms per minute)",
                                "Pmiss", {mean_series}, log_x));

  write_json_report(out_dir(config) / "actev_scores.json", report);
}

// ---------------------------------------------------------------------------
// score-dvu

inline void cmd_score_dvu(const JobConfig& config) {
  using namespace jobdetail;
  AnswerSheet submission, key;
  {
    auto path = config.require("submission");
    auto in = open_input(path);
    submission = parsing(path, [&] { return parse_answer_sheet(in); });
  }
  {
    auto path = config.require("key");
    auto in = open_input(path);
    key = parsing(path, [&] { return parse_answer_sheet(in); });
  }
  Scored acc = accuracy(submission, key);
  Scored m = mrr_sheets(submission, key);
  long mc = 0, rl = 0;
  for (const auto& e : key.entries) (e.kind == QueryKind::MultipleChoice ? mc : rl)++;

  nlohmann::ordered_json report = make_report(config, "score-dvu");
  report["accuracy"] = {{"value", acc.value}, {"flagged", acc.flagged}, {"queries", mc}};
  report["mrr"] = {{"value", m.value}, {"flagged", m.flagged}, {"queries", rl}};
  write_csv(out_dir(config) / "dvu_scores.csv", {"metric", "value", "queries", "flagged"},
            {{"accuracy", num(acc.value), std::to_string(mc), acc.flagged ? "1" : "0"},
             {"mrr", num(m.value), std::to_string(rl), m.flagged ? "1" : "0"}});
  write_json_report(out_dir(config) / "dvu_scores.json", report);
}

// ---------------------------------------------------------------------------
// score-dsdi

inline void cmd_score_dsdi(const JobConfig& config) {
  using namespace jobdetail;
  std::vector<RankedRun> runs = load_runs(config, Task::DSDI);
  const int rank_limit = static_cast<int>(config.get_int("rank_limit", 1000));
  std::map<int, StratumDef> fallback{{1, StratumDef{1, rank_limit, 1.0}}};
  JudgmentSet judgments = load_judgments(config, &fallback);

  std::set<std::string> excluded;
  for (const auto& f : config.get_list("exclude")) excluded.insert(f);
  std::map<std::string, std::string> category_of;
  if (config.has("categories")) {
    auto path = config.get("categories");
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = trim_view(line);
      if (sv.empty() || sv.front() == '#') continue;
      auto fields = split_view(sv, '\t');
      if (fields.size() != 2)
        throw ParseError(path + ": line " + std::to_string(lineno) +
                         ": expected feature<TAB>category");
      category_of[std::string(trim_view(fields[0]))] = std::string(trim_view(fields[1]));
    }
  }

  std::vector<std::string> features;
  for (const auto& [feature, list] : judgments.topics)
    if (!excluded.count(feature)) features.push_back(feature);
  if (features.empty()) throw ConfigError("no features left to score");

  // ap[run][feature]
  std::vector<std::vector<Scored>> ap(runs.size(), std::vector<Scored>(features.size()));
  parallel_for(runs.size(), job_count(config), [&](std::size_t r) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      static const std::vector<RunEntry> kEmpty;
      const auto* entries = runs[r].topic_entries(features[f]);
      if (!entries) entries = &kEmpty;
      ap[r][f] = average_precision(item_ids(*entries), judgments.relevant_items(features[f]));
    }
  });

  nlohmann::ordered_json report = make_report(config, "score-dsdi");
  report["excluded_features"] = std::vector<std::string>(excluded.begin(), excluded.end());
  std::vector<std::vector<std::string>> ap_rows, map_rows, feature_rows, category_rows;
  auto& rj = report["runs"] = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<TopicScore> ts(features.size());
    nlohmann::ordered_json fj = nlohmann::ordered_json::object();
    for (std::size_t f = 0; f < features.size(); ++f) {
      ts[f].value = ap[r][f].value;
      fj[features[f]] = {{"ap", ap[r][f].value}, {"flagged", ap[r][f].flagged}};
      ap_rows.push_back({runs[r].run_tag, features[f], num(ap[r][f].value),
                         ap[r][f].flagged ? "1" : "0"});
    }
    double map = mean_over_topics(ts);
    rj[runs[r].run_tag] = {{"map", map}, {"features", std::move(fj)}};
    map_rows.push_back({runs[r].run_tag, num(map)});
  }

  auto& feat_json = report["features"] = nlohmann::ordered_json::object();
  for (std::size_t f = 0; f < features.size(); ++f) {
    std::vector<double> values;
    for (std::size_t r = 0; r < runs.size(); ++r) values.push_back(ap[r][f].value);
    std::sort(values.begin(), values.end());
    double lo = values.front(), hi = values.back();
    double median = values.size() % 2 == 1
                        ? values[values.size() / 2]
                        : 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);
    feat_json[features[f]] = {{"min", lo}, {"median", median}, {"max", hi}};
    feature_rows.push_back({features[f], num(lo), num(median), num(hi)});
  }

  if (!category_of.empty()) {
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t f = 0; f < features.size(); ++f) {
      auto it = category_of.find(features[f]);
      members[it == category_of.end() ? "(none)" : it->second].push_back(f);
    }
    auto& cj = report["categories"] = nlohmann::ordered_json::object();
    for (const auto& [category, idx] : members) {
      auto& one = cj[category] = nlohmann::ordered_json::object();
      for (std::size_t r = 0; r < runs.size(); ++r) {
        double sum = 0.0;
        for (std::size_t f : idx) sum += ap[r][f].value;
        double mean = sum / static_cast<double>(idx.size());
        one[runs[r].run_tag] = mean;
        category_rows.push_back({category, runs[r].run_tag, num(mean)});
      }
    }
    write_csv(out_dir(config) / "dsdi_categories.csv", {"category", "run_tag", "mean_ap"},
              category_rows);
  }

  write_csv(out_dir(config) / "dsdi_scores.csv", {"run_tag", "feature", "ap", "flagged"},
            ap_rows);
  write_csv(out_dir(config) / "dsdi_map.csv", {"run_tag", "map"}, map_rows);
  write_csv(out_dir(config) / "dsdi_features.csv", {"feature", "min", "median", "max"},
            feature_rows);
  write_json_report(out_dir(config) / "dsdi_scores.json", report);
}

// ---------------------------------------------------------------------------
// score-msum

struct MsumRow {
  std::string system_id, video_id;
  long correct = 0, possible = 0, false_claims = 0;
  double tempo = 0, contextuality = 0, redundancy = 0;
};

inline std::vector<MsumRow> parse_msum_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty msum file");
  ++lineno;
  const std::string kHeader =
      "system_id,video_id,correct,possible,false_claims,"
      "tempo_or_readability,contextuality,redundancy";
  if (std::string(trim_view(line)) != kHeader)
    throw ParseError(1, "expected header " + kHeader);
  std::vector<MsumRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    auto fields = split_view(sv, ',');
    if (fields.size() != 8) throw ParseError(lineno, "expected 8 comma-separated fields");
    MsumRow row;
    row.system_id = std::string(trim_view(fields[0]));
    row.video_id = std::string(trim_view(fields[1]));
    row.correct = detail::parse_int(trim_view(fields[2]), lineno, "correct");
    row.possible = detail::parse_int(trim_view(fields[3]), lineno, "possible");
    row.false_claims = detail::parse_int(trim_view(fields[4]), lineno, "false_claims");
    row.tempo = detail::parse_real(trim_view(fields[5]), lineno, "tempo_or_readability");
    row.contextuality = detail::parse_real(trim_view(fields[6]), lineno, "contextuality");
    row.redundancy = detail::parse_real(trim_view(fields[7]), lineno, "redundancy");
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const MsumRow& a, const MsumRow& b) {
    return std::tie(a.system_id, a.video_id) < std::tie(b.system_id, b.video_id);
  });
  return rows;
}

inline void cmd_score_msum(const JobConfig& config) {
  using namespace jobdetail;
  auto path = config.require("input");
  auto in = open_input(path);
  std::vector<MsumRow> table = parsing(path, [&] { return parse_msum_csv(in); });
  if (table.empty()) throw ConfigError("msum input has no rows");

  nlohmann::ordered_json report = make_report(config, "score-msum");
  auto& sj = report["systems"] = nlohmann::ordered_json::object();
  std::vector<std::vector<std::string>> rows;
  struct Acc {
    double objective = 0, subjective = 0, precision = 0;
    long count = 0, precision_count = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& row : table) {
    double objective = msum_objective(row.correct, row.possible);
    Scored precision = msum_precision(row.correct, row.false_claims);
    double subjective = msum_subjective(row.tempo, row.contextuality, row.redundancy);
    rows.push_back({row.system_id, row.video_id, num(objective, 3),
                    precision.flagged ? "" : num(precision.value, 3), num(subjective, 3)});
    Acc& a = acc[row.system_id];
    a.objective += objective;
    a.subjective += subjective;
    ++a.count;
    if (!precision.flagged) {
      a.precision += precision.value;
      ++a.precision_count;
    }
  }
  for (const auto& [system, a] : acc) {
    double objective = a.objective / static_cast<double>(a.count);
    double subjective = a.subjective / static_cast<double>(a.count);
    bool prec_flagged = a.precision_count == 0;
    double precision = prec_flagged ? 0.0 : a.precision / static_cast<double>(a.precision_count);
    rows.push_back({system, "ALL", num(objective, 3), prec_flagged ? "" : num(precision, 3),
                    num(subjective, 3)});
    sj[system] = {{"objective_all", objective},
                  {"precision", prec_flagged ? nlohmann::ordered_json()
                                             : nlohmann::ordered_json(precision)},
                  {"subjective_all", subjective},
                  {"videos", a.count}};
  }
  write_csv(out_dir(config) / "msum_scores.csv",
            {"system_id", "video_id", "objective", "precision", "subjective"}, rows);
  write_json_report(out_dir(config) / "msum_scores.json", report);
}

// ---------------------------------------------------------------------------
// da

inline void cmd_da(const JobConfig& config) {
  using namespace jobdetail;
  auto path = config.require("ratings");
  auto in = open_input(path);
  DaRatingFile ratings = parsing(path, [&] { return parse_da_ratings(in); });

  std::set<std::string> include;
  bool has_include = config.has("workers");
  if (has_include) {
    auto wpath = config.get("workers");
    auto win = open_input(wpath);
    std::string line;
    while (std::getline(win, line)) {
      std::string_view sv = trim_view(line);
      if (!sv.empty() && sv.front() != '#') include.insert(std::string(sv));
    }
  }
  DaTable table = da_aggregate(ratings, has_include ? &include : nullptr);

  nlohmann::ordered_json report = make_report(config, "da");
  std::vector<std::vector<std::string>> system_rows, video_rows, worker_rows;
  auto& sj = report["systems"] = nlohmann::ordered_json::object();
  for (const auto& [system, z] : table.system_z) {
    system_rows.push_back({system, num(z), num(table.system_raw.at(system))});
    sj[system] = {{"da_z", z}, {"da_raw", table.system_raw.at(system)}};
  }
  for (const auto& [system, videos] : table.z_by_system_video)
    for (const auto& [video, z] : videos)
      video_rows.push_back({system, video, num(z), num(table.raw_by_system_video.at(system).at(video))});
  auto& wj = report["workers"] = nlohmann::ordered_json::object();
  for (const auto& [worker, ws] : table.workers) {
    worker_rows.push_back({worker, std::to_string(ws.count), num(ws.mean, 6), num(ws.sd, 6),
                           ws.flagged ? "1" : "0"});
    wj[worker] = {{"count", ws.count}, {"mean", ws.mean}, {"sd", ws.sd}, {"flagged", ws.flagged}};
  }
  write_csv(out_dir(config) / "da_systems.csv", {"system_id", "da_z", "da_raw"}, system_rows);
  write_csv(out_dir(config) / "da_videos.csv", {"system_id", "video_id", "z", "raw"}, video_rows);
  write_csv(out_dir(config) / "da_workers.csv", {"worker_id", "count", "mean", "sd", "flagged"},
            worker_rows);
  write_json_report(out_dir(config) / "da_scores.json", report);
}

// ---------------------------------------------------------------------------
// compare

inline void cmd_compare(const JobConfig& config) {
  using namespace jobdetail;
  auto path = config.require("scores");
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty scores file");
  ++lineno;
  if (std::string(trim_view(line)) != "run_id,unit_id,value")
    throw ParseError(path + ": expected header run_id,unit_id,value");
  std::map<std::string, std::map<std::string, double>> pivot;
  std::set<std::string> units;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    auto fields = split_view(sv, ',');
    if (fields.size() != 3)
      throw ParseError(path + ": line " + std::to_string(lineno) + ": expected 3 fields");
    std::string run(trim_view(fields[0]));
    std::string unit(trim_view(fields[1]));
    double value = detail::parse_real(trim_view(fields[2]), lineno, "value");
    if (pivot[run].count(unit))
      throw ParseError(path + ": line " + std::to_string(lineno) + ": duplicate (" + run + ", " +
                       unit + ")");
    pivot[run][unit] = value;
    units.insert(unit);
  }
  if (pivot.size() < 2) throw ConfigError("compare needs at least 2 runs");
  for (const auto& [run, values] : pivot)
    for (const auto& unit : units)
      if (!values.count(unit))
        throw ConfigError("run " + run + " is missing unit " + unit);

  const double alpha = config.get_real("alpha", 0.05);
  const long iterations = config.get_int("iterations", 100000);
  const std::uint64_t seed = config.get_u64("seed", 0);
  const unsigned jobs = job_count(config);
  RandStatistic stat = RandStatistic::MeanDiff;
  std::string stat_name = config.get("statistic", "mean");
  if (stat_name == "t")
    stat = RandStatistic::TStat;
  else if (stat_name != "mean")
    throw ConfigError("statistic must be 'mean' or 't'");

  std::vector<std::string> run_ids;
  for (const auto& [run, values] : pivot) run_ids.push_back(run);
  const std::size_t n = run_ids.size();
  std::vector<double> means(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& unit : units) means[i] += pivot[run_ids[i]][unit];
    means[i] /= static_cast<double>(units.size());
  }

  std::vector<std::vector<double>> p(n, std::vector<double>(n, 1.0));
  std::vector<std::vector<char>> better(n, std::vector<char>(n, 0));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      PairedScores pairs;
      for (const auto& unit : units) {
        pairs.topics.push_back(unit);
        pairs.a.push_back(pivot[run_ids[i]][unit]);
        pairs.b.push_back(pivot[run_ids[j]][unit]);
      }
      std::uint64_t pair_seed =
          splitmix64(seed ^ fnv1a64(run_ids[i] + "\x1f" + run_ids[j]));
      RandomizationResult res = randomization_test(pairs, iterations, pair_seed, stat,
                                                   static_cast<int>(jobs));
      p[i][j] = p[j][i] = res.p;
      bool significant = res.p < alpha;
      if (significant && means[i] > means[j]) better[i][j] = 1;
      if (significant && means[j] > means[i]) better[j][i] = 1;
      rows.push_back({run_ids[i], run_ids[j], num(means[i]), num(means[j]), num(res.p),
                      significant ? "1" : "0"});
    }

  nlohmann::ordered_json report = make_report(config, "compare");
  report["alpha"] = alpha;
  report["statistic"] = stat_name;
  report["units"] = units.size();
  auto& pj = report["pairs"] = nlohmann::ordered_json::array();
  for (const auto& row : rows)
    pj.push_back({{"run_a", row[0]},
                  {"run_b", row[1]},
                  {"mean_a", row[2]},
                  {"mean_b", row[3]},
                  {"p", row[4]},
                  {"significant", row[5] == "1"}});
  write_csv(out_dir(config) / "compare_pairs.csv",
            {"run_a", "run_b", "mean_a", "mean_b", "p", "significant"}, rows);
  write_text_file(out_dir(config) / "compare_matrix.svg",
                  svg_significance_grid("Pairwise significance (row better than column)",
                                        run_ids, better));
  write_json_report(out_dir(config) / "compare.json", report);
}

// ---------------------------------------------------------------------------
// det-plot

inline void cmd_det_plot(const JobConfig& config) {
  using namespace jobdetail;
  auto paths = config.get_list("curves");
  if (paths.empty()) throw ConfigError("det-plot: no curve files given (setting 'curves')");
  std::vector<SvgSeries> series;
  for (const auto& path : paths) {
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path + ": empty curve file");
    ++lineno;
    std::string header(trim_view(line));
    if (header.rfind("threshold,pmiss,rfa", 0) != 0)
      throw ParseError(path + ": expected header threshold,pmiss,rfa[,tfa]");
    SvgSeries s;
    s.label = fs::path(path).stem().string();
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = trim_view(line);
      if (sv.empty()) continue;
      auto fields = split_view(sv, ',');
      if (fields.size() < 3)
        throw ParseError(path + ": line " + std::to_string(lineno) + ": expected 3+ fields");
      double pm = detail::parse_real(trim_view(fields[1]), lineno, "pmiss");
      double fa = detail::parse_real(trim_view(fields[2]), lineno, "rfa");
      s.points.emplace_back(fa, pm);
    }
    series.push_back(std::move(s));
  }
  write_text_file(out_dir(config) / config.get("plot_out", "det_plot.svg"),
                  svg_line_plot(config.get("title", "DET curves"),
                                "RFA (false alarms per minute)", "Pmiss", series,
                                config.get_bool("log_x", false)));
}

// ---------------------------------------------------------------------------
// gen

inline void cmd_gen(const JobConfig& config) {
  using namespace jobdetail;
  std::string kind = config.require("kind");
  fs::path dir = out_dir(config);
  std::uint64_t seed = config.get_u64("seed", 0);
  if (kind == "avs") {
    AvsGenSpec spec;
    spec.runs = static_cast<int>(config.get_int("runs", 33));
    spec.topics = static_cast<int>(config.get_int("topics", 30));
    spec.depth = static_cast<int>(config.get_int("depth", 1000));
    spec.universe = static_cast<int>(config.get_int("universe", spec.depth * 5));
    spec.seed = seed;
    if (spec.runs < 1 || spec.topics < 1 || spec.depth < 1 || spec.universe < spec.depth)
      throw ConfigError("gen avs: invalid sizes");
    gen_avs(dir, spec);
  } else if (kind == "actev") {
    ActevGenSpec spec;
    spec.activities = static_cast<int>(config.get_int("activities", 20));
    spec.videos = static_cast<int>(config.get_int("videos", 10));
    spec.with_objects = config.get_bool("objects", false);
    spec.seed = seed;
    if (spec.activities < 1 || spec.videos < 1) throw ConfigError("gen actev: invalid sizes");
    gen_actev(dir, spec);
  } else if (kind == "dvu") {
    gen_dvu(dir, seed, static_cast<int>(config.get_int("mc", 8)),
            static_cast<int>(config.get_int("rl", 6)));
  } else if (kind == "msum") {
    gen_msum(dir, seed, static_cast<int>(config.get_int("systems", 3)),
             static_cast<int>(config.get_int("videos", 4)));
  } else if (kind == "da") {
    gen_da(dir, seed, static_cast<int>(config.get_int("workers", 5)),
           static_cast<int>(config.get_int("systems", 3)),
           static_cast<int>(config.get_int("videos", 4)));
  } else {
    throw ConfigError("unknown gen kind '" + kind + "' (avs, actev, dvu, msum, da)");
  }
}

}  // namespace videval
