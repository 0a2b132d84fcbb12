#include <cmath>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "../tests/oracles.hpp"
#include "videval/retrieval.hpp"
#include "videval/util.hpp"

using namespace videval;

namespace {

std::vector<RunEntry> make_entries(const std::vector<std::string>& items) {
  std::vector<RunEntry> out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out.push_back({items[i], static_cast<int>(i + 1), 1.0 - 0.001 * static_cast<double>(i)});
  return out;
}

// Fully judged single-stratum judgments at rate 1.0 over the given labels.
StratifiedJudgments full_judgments(const std::vector<std::string>& items,
                                   const std::vector<bool>& relevant) {
  StratifiedJudgments sj;
  sj.rates[1] = 1.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    sj.stratum_of[items[i]] = 1;
    sj.labels[items[i]] = relevant[i];
  }
  return sj;
}

}  // namespace

TEST_CASE("average precision matches the counting definition") {
  Scored s = average_precision({"a", "b", "c", "d"}, {"a", "c"});
  REQUIRE_THAT(s.value, Catch::Matchers::WithinAbs((1.0 + 2.0 / 3.0) / 2.0, 1e-15));
  REQUIRE_FALSE(s.flagged);

  // unjudged/unretrieved conventions
  REQUIRE(average_precision({"x", "y"}, {"a", "b"}).value == 0.0);
  Scored empty = average_precision({"x"}, {});
  REQUIRE(empty.flagged);
  REQUIRE(empty.value == 0.0);

  // relevant item never retrieved still divides the sum
  Scored partial = average_precision({"a"}, {"a", "zz"});
  REQUIRE_THAT(partial.value, Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("fully judged xinfAP degenerates to exact AP") {
  SplitMixRng rng = substream(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng.next_below(10));
    std::vector<std::string> items;
    std::vector<bool> rel;
    std::set<std::string> relset;
    for (int i = 0; i < n; ++i) {
      items.push_back("i" + std::to_string(i));
      bool r = (rng.next_unit() < 0.4);
      rel.push_back(r);
      if (r) relset.insert(items.back());
    }
    StratifiedJudgments sj = full_judgments(items, rel);
    Scored x = extended_inferred_ap(items, sj, 0.0);
    Scored a = average_precision(items, relset);
    REQUIRE_THAT(x.value, Catch::Matchers::WithinAbs(a.value, 1e-12));
    REQUIRE(x.flagged == a.flagged);
  }
}

TEST_CASE("degeneracy holds for any strata layout") {
  // same items split across two rate-1.0 strata
  std::vector<std::string> items{"a", "b", "c", "d", "e", "f"};
  std::vector<bool> rel{true, false, true, true, false, false};
  StratifiedJudgments sj;
  sj.rates[1] = 1.0;
  sj.rates[2] = 1.0;
  std::set<std::string> relset;
  for (std::size_t i = 0; i < items.size(); ++i) {
    sj.stratum_of[items[i]] = i < 3 ? 1 : 2;
    sj.labels[items[i]] = rel[i];
    if (rel[i]) relset.insert(items[i]);
  }
  Scored x = extended_inferred_ap(items, sj, 0.0);
  REQUIRE_THAT(x.value,
               Catch::Matchers::WithinAbs(average_precision(items, relset).value, 1e-12));
}

TEST_CASE("xinfAP matches the direct formula transcription on sampled judgments") {
  SplitMixRng rng = substream(23, 0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 4 + static_cast<int>(rng.next_below(8));
    std::vector<std::string> items;
    StratifiedJudgments sj;
    sj.rates[1] = 1.0;
    sj.rates[2] = 0.5;
    std::map<std::string, int> stratum_of;
    std::map<std::string, bool> labels;
    std::map<int, double> rates{{1, 1.0}, {2, 0.5}};
    for (int i = 0; i < n; ++i) {
      items.push_back("i" + std::to_string(i));
      int stratum = i < n / 2 ? 1 : 2;
      sj.stratum_of[items.back()] = stratum;
      stratum_of[items.back()] = stratum;
      // stratum 2 is sampled: some items stay unjudged
      bool judged = stratum == 1 || (rng.next_unit() < 0.5);
      if (judged) {
        bool r = (rng.next_unit() < 0.4);
        sj.labels[items.back()] = r;
        labels[items.back()] = r;
      }
    }
    for (double epsilon : {0.0, 1e-5}) {
      Scored x = extended_inferred_ap(items, sj, epsilon);
      double want = oracle::xinfap(items, stratum_of, labels, rates, epsilon);
      REQUIRE_THAT(x.value, Catch::Matchers::WithinAbs(want, 1e-12));
    }
  }
}

TEST_CASE("xinfAP input contracts") {
  std::vector<std::string> items{"a", "b"};
  StratifiedJudgments sj;
  sj.rates[1] = 1.0;
  sj.stratum_of["a"] = 1;
  sj.labels["a"] = true;
  // judged item with no stratum assignment
  StratifiedJudgments broken = sj;
  broken.labels["b"] = true;
  REQUIRE_THROWS_AS(extended_inferred_ap(items, broken, 0.0), std::invalid_argument);
  // missing sampling rate
  StratifiedJudgments norate = sj;
  norate.stratum_of["a"] = 7;
  REQUIRE_THROWS_AS(extended_inferred_ap(items, norate, 0.0), std::invalid_argument);
  // negative epsilon
  REQUIRE_THROWS_AS(extended_inferred_ap(items, sj, -1.0), std::invalid_argument);
  // no relevant judged items anywhere: flagged zero
  StratifiedJudgments none = sj;
  none.labels["a"] = false;
  Scored s = extended_inferred_ap(items, none, 0.0);
  REQUIRE(s.flagged);
  REQUIRE(s.value == 0.0);
}

TEST_CASE("add_run_strata assigns strata to unjudged items by rank") {
  JudgmentSet js;
  js.strata[1] = {1, 2, 1.0};
  js.strata[2] = {3, 4, 0.5};
  js.topics["t"] = {{"a", 1, true}};
  StratifiedJudgments sj = stratified_for_topic(js, "t");
  REQUIRE(sj.labels.size() == 1);
  auto entries = make_entries({"a", "b", "c", "d"});
  add_run_strata(sj, entries, js.strata);
  REQUIRE(sj.stratum_of.at("b") == 1);
  REQUIRE(sj.stratum_of.at("c") == 2);
  REQUIRE(sj.stratum_of.at("d") == 2);
  // a keeps its judgment-set stratum
  REQUIRE(sj.stratum_of.at("a") == 1);
}

TEST_CASE("sampling affects the estimate through the inferred terms") {
  // One relevant judged item at rank 3, stratum 2 sampled at 0.5: the
  // estimator must weight it by 1/0.5 in both R-hat and the outer sum.
  std::vector<std::string> items{"a", "b", "c"};
  StratifiedJudgments sj;
  sj.rates[1] = 1.0;
  sj.rates[2] = 0.5;
  sj.stratum_of = {{"a", 1}, {"b", 1}, {"c", 2}};
  sj.labels = {{"a", false}, {"b", false}, {"c", true}};
  std::map<std::string, int> stratum_of{{"a", 1}, {"b", 1}, {"c", 2}};
  std::map<std::string, bool> labels{{"a", false}, {"b", false}, {"c", true}};
  Scored x = extended_inferred_ap(items, sj, 0.0);
  double want = oracle::xinfap(items, stratum_of, labels, {{1, 1.0}, {2, 0.5}}, 0.0);
  REQUIRE_THAT(x.value, Catch::Matchers::WithinAbs(want, 1e-15));
  // by hand: R-hat = 2, term at k=3 is (1/p)(1/3 + (2/3) E), E = 0 over
  // stratum 1 (two nonrelevant), stratum 2 empty above rank 3
  REQUIRE_THAT(x.value, Catch::Matchers::WithinAbs((2.0 * (1.0 / 3.0)) / 2.0, 1e-15));
}

TEST_CASE("mrr averages reciprocal ranks with zero for misses") {
  double v = mrr({{"x", "y", "z"}, {"a", "b"}, {"p", "q", "r", "s"}}, {"x", "b", "s"});
  REQUIRE_THAT(v, Catch::Matchers::WithinAbs((1.0 + 0.5 + 0.25) / 3.0, 1e-15));
  REQUIRE(mrr({{"a"}}, {"zz"}) == 0.0);
}

TEST_CASE("answer-sheet mrr and accuracy") {
  AnswerSheet key;
  key.entries = {{"q1", QueryKind::MultipleChoice, {"B"}},
                 {"q2", QueryKind::MultipleChoice, {"C"}},
                 {"q3", QueryKind::RankedList, {"good"}},
                 {"q4", QueryKind::RankedList, {"best"}}};
  AnswerSheet sub;
  sub.entries = {{"q1", QueryKind::MultipleChoice, {"B"}},
                 {"q3", QueryKind::RankedList, {"bad", "good"}},
                 {"q4", QueryKind::RankedList, {"worse", "meh", "nope"}}};
  // q2 unanswered: counts wrong; accuracy = 1/2
  Scored acc = accuracy(sub, key);
  REQUIRE_THAT(acc.value, Catch::Matchers::WithinAbs(0.5, 1e-15));
  // q3 rank 2, q4 missing: mrr = (1/2 + 0)/2
  Scored m = mrr_sheets(sub, key);
  REQUIRE_THAT(m.value, Catch::Matchers::WithinAbs(0.25, 1e-15));

  AnswerSheet unknown;
  unknown.entries = {{"q9", QueryKind::MultipleChoice, {"A"}}};
  REQUIRE_THROWS_AS(accuracy(unknown, key), std::invalid_argument);
  AnswerSheet mismatch;
  mismatch.entries = {{"q1", QueryKind::RankedList, {"B"}}};
  REQUIRE_THROWS_AS(accuracy(mismatch, key), std::invalid_argument);

  AnswerSheet rl_only_key;
  rl_only_key.entries = {{"q3", QueryKind::RankedList, {"good"}}};
  REQUIRE(accuracy(AnswerSheet{}, rl_only_key).flagged);
  AnswerSheet mc_only_key;
  mc_only_key.entries = {{"q1", QueryKind::MultipleChoice, {"B"}}};
  REQUIRE(mrr_sheets(AnswerSheet{}, mc_only_key).flagged);
}

TEST_CASE("precision recall f1 conventions") {
  Prf a = prf(3, 1, 2);
  REQUIRE_THAT(a.precision.value, Catch::Matchers::WithinAbs(0.75, 1e-15));
  REQUIRE_THAT(a.recall.value, Catch::Matchers::WithinAbs(0.6, 1e-15));
  REQUIRE_THAT(a.f1.value, Catch::Matchers::WithinAbs(2 * 0.75 * 0.6 / 1.35, 1e-15));

  Prf no_pred = prf(0, 0, 5);
  REQUIRE(no_pred.precision.flagged);
  REQUIRE_FALSE(no_pred.recall.flagged);
  REQUIRE(no_pred.recall.value == 0.0);
  REQUIRE_FALSE(no_pred.f1.flagged);
  REQUIRE(no_pred.f1.value == 0.0);

  Prf nothing = prf(0, 0, 0);
  REQUIRE(nothing.precision.flagged);
  REQUIRE(nothing.recall.flagged);
  REQUIRE(nothing.f1.flagged);

  REQUIRE_THROWS_AS(prf(-1, 0, 0), std::invalid_argument);
}

TEST_CASE("novelty weights follow 1 - N/M") {
  std::vector<RankedRun> runs(33);
  for (int r = 0; r < 33; ++r) {
    runs[r].run_tag = "run" + std::to_string(r);
    runs[r].entries["t"] = make_entries({"everywhere"});
  }
  runs[0].entries["t"] = make_entries({"everywhere", "unique"});
  NoveltyWeights w = novelty_weights(runs);
  REQUIRE(w.m == 33);
  REQUIRE(w.weight("t", "everywhere") == 0.0);
  REQUIRE_THAT(w.weight("t", "unique"), Catch::Matchers::WithinAbs(0.9697, 1e-4));
  REQUIRE(w.weight("t", "absent") == 0.0);
}

TEST_CASE("novelty score matches direct enumeration on a 3-run fixture") {
  std::vector<RankedRun> runs(3);
  runs[0].run_tag = "r0";
  runs[0].entries["t1"] = make_entries({"a", "b", "c"});
  runs[0].entries["t2"] = make_entries({"x"});
  runs[1].run_tag = "r1";
  runs[1].entries["t1"] = make_entries({"b", "c"});
  runs[1].entries["t2"] = make_entries({"x", "y"});
  runs[2].run_tag = "r2";
  runs[2].entries["t1"] = make_entries({"c"});
  runs[2].entries["t2"] = make_entries({"y", "z"});

  JudgmentSet js;
  js.strata[1] = {1, 10, 1.0};
  js.topics["t1"] = {{"a", 1, true}, {"b", 1, true}, {"c", 1, false}};
  js.topics["t2"] = {{"x", 1, true}, {"y", 1, true}, {"z", 1, true}};

  // counts: t1: a=1 b=2 c=3; t2: x=2 y=2 z=1
  // unique-only for r0: t1 keeps a (weight 2/3), t2 keeps nothing
  NoveltyScore u0 = novelty_score(runs[0], runs, js, NoveltyMode::UniqueOnly);
  REQUIRE_THAT(u0.per_topic.at("t1"), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
  REQUIRE(u0.per_topic.at("t2") == 0.0);
  REQUIRE_THAT(u0.raw, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
  // normalized: t1 max = 2 * 2/3, t2 max = 3 * 2/3
  REQUIRE_THAT(u0.normalized.value,
               Catch::Matchers::WithinAbs(0.5 * ((2.0 / 3.0) / (4.0 / 3.0) + 0.0), 1e-15));
  REQUIRE_FALSE(u0.normalized.flagged);

  // all-weighted for r2: t1 nothing relevant retrieved except c (nonrelevant),
  // t2 has y (N=2, weight 1/3) and z (N=1, weight 2/3)
  NoveltyScore a2 = novelty_score(runs[2], runs, js, NoveltyMode::AllWeighted);
  REQUIRE(a2.per_topic.at("t1") == 0.0);
  REQUIRE_THAT(a2.per_topic.at("t2"), Catch::Matchers::WithinAbs(1.0, 1e-15));

  // a topic with zero relevant items flags the normalized score
  JudgmentSet none = js;
  none.topics["t3"] = {{"q", 1, false}};
  NoveltyScore fl = novelty_score(runs[0], runs, none, NoveltyMode::UniqueOnly);
  REQUIRE(fl.normalized.flagged);

  REQUIRE_THROWS_AS(novelty_score(runs[0], {runs[0]}, js), std::invalid_argument);
  RankedRun outsider;
  outsider.run_tag = "other";
  REQUIRE_THROWS_AS(novelty_score(outsider, runs, js), std::invalid_argument);
}

TEST_CASE("novelty score equals a brute-force recount on random fixtures") {
  SplitMixRng rng = substream(31, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RankedRun> runs(3);
    JudgmentSet js;
    js.strata[1] = {1, 10, 1.0};
    std::vector<std::string> topics{"t1", "t2"};
    std::vector<std::string> universe{"i0", "i1", "i2", "i3", "i4"};
    for (int r = 0; r < 3; ++r) {
      runs[r].run_tag = "r" + std::to_string(r);
      for (const auto& topic : topics) {
        std::vector<std::string> picked;
        for (const auto& item : universe)
          if ((rng.next_unit() < 0.5)) picked.push_back(item);
        if (!picked.empty()) runs[r].entries[topic] = make_entries(picked);
      }
    }
    for (const auto& topic : topics) {
      std::vector<Judgment> judged;
      for (const auto& item : universe) judged.push_back({item, 1, (rng.next_unit() < 0.5)});
      js.topics[topic] = judged;
    }
    for (NoveltyMode mode : {NoveltyMode::UniqueOnly, NoveltyMode::AllWeighted}) {
      NoveltyScore got = novelty_score(runs[0], runs, js, mode);
      // direct recount
      double raw_sum = 0.0;
      for (const auto& topic : topics) {
        auto relset = js.relevant_items(topic);
        double s = 0.0;
        if (const auto* list = runs[0].topic_entries(topic))
          for (const auto& e : *list) {
            if (!relset.count(e.item_id)) continue;
            int n = 0;
            for (const auto& run : runs)
              if (const auto* l2 = run.topic_entries(topic))
                for (const auto& e2 : *l2) n += e2.item_id == e.item_id;
            if (mode == NoveltyMode::UniqueOnly && n != 1) continue;
            s += 1.0 - n / 3.0;
          }
        REQUIRE_THAT(got.per_topic.at(topic), Catch::Matchers::WithinAbs(s, 1e-12));
        raw_sum += s;
      }
      REQUIRE_THAT(got.raw, Catch::Matchers::WithinAbs(raw_sum / 2.0, 1e-12));
    }
  }
}

TEST_CASE("summarization scores") {
  REQUIRE_THAT(round_half_up(msum_objective(5, 13), 3), Catch::Matchers::WithinAbs(0.385, 1e-12));
  REQUIRE_THAT(msum_objective(13, 13), Catch::Matchers::WithinAbs(1.0, 1e-15));
  REQUIRE_THROWS_AS(msum_objective(1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(msum_objective(14, 13), std::invalid_argument);
  REQUIRE_THROWS_AS(msum_objective(-1, 13), std::invalid_argument);

  Scored p = msum_precision(4, 4);
  REQUIRE_THAT(p.value, Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE_FALSE(p.flagged);
  Scored silent = msum_precision(0, 0);
  REQUIRE(silent.flagged);

  REQUIRE_THAT(msum_subjective(7, 7, 1), Catch::Matchers::WithinAbs(7.0, 1e-15));
  REQUIRE_THAT(msum_subjective(6, 5, 4), Catch::Matchers::WithinAbs(5.0, 1e-12));
  REQUIRE_THROWS_AS(msum_subjective(8, 5, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(msum_subjective(7, 5, 0), std::invalid_argument);
}

TEST_CASE("mean over topics") {
  std::vector<TopicScore> ts(3);
  ts[0].value = 0.3;
  ts[1].value = 0.6;
  ts[2].value = 0.0;
  ts[2].flagged = true;  // flagged zeros still average in
  REQUIRE_THAT(mean_over_topics(ts), Catch::Matchers::WithinAbs(0.3, 1e-15));
  REQUIRE_THROWS_AS(mean_over_topics({}), std::invalid_argument);
}
