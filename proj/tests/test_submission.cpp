#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "videval/submission.hpp"

using namespace videval;
using Catch::Matchers::ContainsSubstring;

namespace {

RankedRun parse_run_text(const std::string& text, Task task = Task::AVS, int limit = 1000) {
  std::istringstream in(text);
  return parse_retrieval_run(in, task, limit);
}

const std::string kSmallRun =
    "#meta run_kind=novelty\n"
    "#meta training_type=E\n"
    "#meta task=AVS\n"
    "#meta processing_time.1701=12.5\n"
    "1701\tshotA\t1\t0.900000\trunX\n"
    "1701\tshotB\t2\t0.800000\trunX\n"
    "1702\tshotC\t1\t0.700000\trunX\n";

}  // namespace

TEST_CASE("run parsing reads entries and metadata") {
  RankedRun run = parse_run_text(kSmallRun);
  REQUIRE(run.run_tag == "runX");
  REQUIRE(run.run_kind == RunKind::Novelty);
  REQUIRE(run.training_type == TrainingType::E);
  REQUIRE(run.entries.size() == 2);
  REQUIRE(run.topic_entries("1701")->size() == 2);
  REQUIRE(run.topic_entries("1701")->at(0).item_id == "shotA");
  REQUIRE(run.topic_entries("1701")->at(1).rank == 2);
  REQUIRE(run.processing_time.at("1701") == 12.5);
  REQUIRE(run.topic_entries("9999") == nullptr);
}

TEST_CASE("run serialization round-trips byte-identically") {
  RankedRun run = parse_run_text(kSmallRun);
  std::ostringstream first;
  serialize_run(run, first);
  RankedRun reparsed = parse_run_text(first.str());
  std::ostringstream second;
  serialize_run(reparsed, second);
  REQUIRE(first.str() == second.str());
  REQUIRE(reparsed.run_kind == RunKind::Novelty);
  REQUIRE(reparsed.processing_time.at("1701") == 12.5);
}

TEST_CASE("run parsing reports the offending line") {
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\tshotA\t1\t0.9\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("line 1")));
  REQUIRE_THROWS_MATCHES(
      parse_run_text("1701\tshotA\t1\t0.9\trunX\n1701\tshotB\t0\t0.8\trunX\n"), ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("line 2")));
}

TEST_CASE("run parsing rejects structural violations") {
  // rank over the limit
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\ta\t1\t0.9\tr\n1701\tb\t3\t0.8\tr\n", Task::AVS, 2),
                         ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("over limit")));
  // inconsistent run tag
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\ta\t1\t0.9\tr1\n1701\tb\t2\t0.8\tr2\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("inconsistent")));
  // duplicate rank
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\ta\t1\t0.9\tr\n1701\tb\t1\t0.8\tr\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate rank")));
  // rank gap
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\ta\t1\t0.9\tr\n1701\tb\t3\t0.8\tr\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("rank gap")));
  // duplicate item within a topic
  REQUIRE_THROWS_MATCHES(parse_run_text("1701\ta\t1\t0.9\tr\n1701\ta\t2\t0.8\tr\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate item")));
  // unknown meta key
  REQUIRE_THROWS_MATCHES(parse_run_text("#meta nope=1\n1701\ta\t1\t0.9\tr\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unknown meta key")));
}

TEST_CASE("score canonicalization clamps to a running minimum") {
  RankedRun run = parse_run_text(
      "1701\ta\t1\t0.5\tr\n"
      "1701\tb\t2\t0.9\tr\n"
      "1701\tc\t3\t0.4\tr\n");
  REQUIRE(canonicalize_scores(run));
  const auto& list = *run.topic_entries("1701");
  REQUIRE(list[0].score == 0.5);
  REQUIRE(list[1].score == 0.5);
  REQUIRE(list[2].score == 0.4);
  // A second pass changes nothing.
  REQUIRE_FALSE(canonicalize_scores(run));
}

TEST_CASE("strata parsing enforces disjoint ascending ranges") {
  std::istringstream good("1\t1\t300\t1.0\n2\t301\t1000\t0.25\n");
  auto strata = parse_strata(good);
  REQUIRE(strata.size() == 2);
  REQUIRE(strata.at(2).sampling_rate == 0.25);
  REQUIRE(strata.at(2).rank_lo == 301);

  std::istringstream overlapping("1\t1\t300\t1.0\n2\t200\t1000\t0.25\n");
  REQUIRE_THROWS_AS(parse_strata(overlapping), ParseError);
  std::istringstream bad_rate("1\t1\t300\t0.0\n");
  REQUIRE_THROWS_AS(parse_strata(bad_rate), ParseError);
  std::istringstream bad_range("1\t300\t1\t1.0\n");
  REQUIRE_THROWS_AS(parse_strata(bad_range), ParseError);
}

TEST_CASE("judgment parsing validates strata, labels, and duplicates") {
  std::map<int, StratumDef> strata{{1, {1, 300, 1.0}}, {2, {301, 1000, 0.25}}};
  std::istringstream good(
      "1701\t1\tshotA\t1\n"
      "1701\t2\tshotB\t0\n");
  JudgmentSet js = parse_judgments(good, strata);
  REQUIRE(js.topics.at("1701").size() == 2);
  REQUIRE(js.relevant_items("1701") == std::set<std::string>{"shotA"});

  std::istringstream unknown("1701\t9\tshotA\t1\n");
  REQUIRE_THROWS_MATCHES(parse_judgments(unknown, strata), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unknown stratum")));
  std::istringstream badlabel("1701\t1\tshotA\t2\n");
  REQUIRE_THROWS_AS(parse_judgments(badlabel, strata), ParseError);
  std::istringstream dup("1701\t1\tshotA\t1\n1701\t2\tshotA\t0\n");
  REQUIRE_THROWS_MATCHES(parse_judgments(dup, strata), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate judgment")));
}

TEST_CASE("strata and judgments serialize round-trip") {
  std::map<int, StratumDef> strata{{1, {1, 10, 1.0}}, {2, {11, 40, 0.5}}};
  JudgmentSet js;
  js.strata = strata;
  js.topics["1701"] = {{"aa", 1, true}, {"bb", 2, false}};
  std::ostringstream s1, j1;
  serialize_strata(js.strata, s1);
  serialize_judgments(js, j1);
  std::istringstream s_in(s1.str()), j_in(j1.str());
  JudgmentSet back = parse_judgments(j_in, parse_strata(s_in));
  std::ostringstream s2, j2;
  serialize_strata(back.strata, s2);
  serialize_judgments(back, j2);
  REQUIRE(s1.str() == s2.str());
  REQUIRE(j1.str() == j2.str());
}

TEST_CASE("activity sets parse with exact field names and round-trip") {
  const std::string text = R"({
    "videoDurations": {"vid1": 3.0, "vid2": 2.0},
    "instances": [
      {"activity": "act", "videoId": "vid1", "beginFrame": 10, "endFrame": 50,
       "confidence": 0.75,
       "objects": {"10": [{"x": 1, "y": 2, "w": 3, "h": 4, "conf": 0.5}]}},
      {"activity": "act", "videoId": "vid2", "beginFrame": 5, "endFrame": 9,
       "confidence": 0.25}
    ]
  })";
  std::istringstream in(text);
  ActivityInstanceSet set = parse_activity_set(in, ActivitySetKind::System);
  REQUIRE(set.instances.size() == 2);
  REQUIRE(set.video_durations.at("vid1") == 3.0);
  REQUIRE(set.total_minutes() == 5.0);
  // canonical order: (activity, video, span); vid1's instance sorts first
  REQUIRE(set.instances.front().video_id == "vid1");
  REQUIRE(set.instances.front().span_frames() == 41);
  std::ostringstream out1;
  serialize_activity_set(set, ActivitySetKind::System, out1);
  std::istringstream in2(out1.str());
  ActivityInstanceSet back = parse_activity_set(in2, ActivitySetKind::System);
  std::ostringstream out2;
  serialize_activity_set(back, ActivitySetKind::System, out2);
  REQUIRE(out1.str() == out2.str());
}

TEST_CASE("activity parsing rejects malformed instances") {
  auto parse_sys = [](const std::string& text) {
    std::istringstream in(text);
    return parse_activity_set(in, ActivitySetKind::System);
  };
  // missing confidence on a system instance
  REQUIRE_THROWS_AS(parse_sys(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "v", "beginFrame": 1, "endFrame": 2}]})"),
                    ParseError);
  // confidence out of range
  REQUIRE_THROWS_AS(parse_sys(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "v", "beginFrame": 1, "endFrame": 2,
        "confidence": 1.5}]})"),
                    ParseError);
  // end before begin
  REQUIRE_THROWS_AS(parse_sys(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "v", "beginFrame": 5, "endFrame": 2,
        "confidence": 0.5}]})"),
                    ParseError);
  // video without a duration entry
  REQUIRE_THROWS_AS(parse_sys(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "other", "beginFrame": 1, "endFrame": 2,
        "confidence": 0.5}]})"),
                    ParseError);
  // degenerate box
  REQUIRE_THROWS_AS(parse_sys(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "v", "beginFrame": 1, "endFrame": 2,
        "confidence": 0.5, "objects": {"1": [{"x":0,"y":0,"w":0,"h":4,"conf":0.5}]}}]})"),
                    ParseError);
  // reference instances must not carry a confidence requirement
  std::istringstream ref_in(R"({"videoDurations": {"v": 1.0}, "instances":
      [{"activity": "a", "videoId": "v", "beginFrame": 1, "endFrame": 2}]})");
  ActivityInstanceSet ref = parse_activity_set(ref_in, ActivitySetKind::Reference);
  REQUIRE(ref.instances.size() == 1);
}

TEST_CASE("answer sheets parse both query kinds") {
  std::istringstream in(
      "q2\trl\tcandB,candA,candC\n"
      "q1\tmc\tB\n");
  AnswerSheet sheet = parse_answer_sheet(in);
  REQUIRE(sheet.entries.size() == 2);
  REQUIRE(sheet.entries.front().query_id == "q1");  // sorted by query id
  REQUIRE(sheet.find("q2")->answer.size() == 3);
  REQUIRE(sheet.find("q2")->kind == QueryKind::RankedList);

  std::istringstream dup("q1\tmc\tA\nq1\tmc\tB\n");
  REQUIRE_THROWS_MATCHES(parse_answer_sheet(dup), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("duplicate query")));
  std::istringstream dupcand("q1\trl\ta,b,a\n");
  REQUIRE_THROWS_AS(parse_answer_sheet(dupcand), ParseError);
  std::istringstream badkind("q1\txx\tA\n");
  REQUIRE_THROWS_AS(parse_answer_sheet(badkind), ParseError);

  std::ostringstream out1;
  serialize_answer_sheet(sheet, out1);
  std::istringstream in2(out1.str());
  std::ostringstream out2;
  serialize_answer_sheet(parse_answer_sheet(in2), out2);
  REQUIRE(out1.str() == out2.str());
}

TEST_CASE("da ratings require the exact header and valid range") {
  std::istringstream in(
      "worker_id,system_id,video_id,rating\n"
      "w1,s1,v1,85\n"
      "w1,s1,v2,40.5\n");
  DaRatingFile file = parse_da_ratings(in);
  REQUIRE(file.records.size() == 2);
  REQUIRE(file.records[1].rating == 40.5);

  std::istringstream badheader("worker,system,video,rating\nw1,s1,v1,85\n");
  REQUIRE_THROWS_AS(parse_da_ratings(badheader), ParseError);
  std::istringstream badrange("worker_id,system_id,video_id,rating\nw1,s1,v1,101\n");
  REQUIRE_THROWS_AS(parse_da_ratings(badrange), ParseError);

  std::ostringstream out1;
  serialize_da_ratings(file, out1);
  std::istringstream in2(out1.str());
  std::ostringstream out2;
  serialize_da_ratings(parse_da_ratings(in2), out2);
  REQUIRE(out1.str() == out2.str());
}

TEST_CASE("run validation reports warnings without failing") {
  RankedRun run = parse_run_text(
      "1701\ta\t1\t0.5\tr\n"
      "1701\tb\t2\t0.9\tr\n");
  JudgmentSet js;
  js.strata[1] = {1, 1000, 1.0};
  js.topics["1701"] = {{"a", 1, true}};
  js.topics["1702"] = {{"c", 1, true}};
  ValidationReport report = validate_run(run, &js);
  REQUIRE(report.ok());
  REQUIRE(report.errors.empty());
  // non-monotone scores and the missing topic 1702 both warn
  REQUIRE(report.warnings.size() >= 2);
}
