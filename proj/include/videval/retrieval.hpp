#pragma once

// Ranked-retrieval and categorical scoring: AP, extended inferred AP, MRR,
// accuracy, precision/recall/F1, novelty weighting, summarization scores.
//
// All operations are pure. Division-by-zero conventions return 0 with the
// Scored::flagged bit set rather than throwing; precondition violations throw
// std::invalid_argument.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "videval/submission.hpp"
#include "videval/util.hpp"

namespace videval {

struct TopicScore {
  std::string topic_id;
  std::string metric;
  double value = 0.0;
  bool flagged = false;
  int num_judged = 0;
  int num_relevant = 0;
  int num_retrieved = 0;
};

// ---------------------------------------------------------------------------
// Average precision

// AP = (1/|relset|) * sum over ranks k holding a relevant item of prec@k.
// Items outside relset (including unjudged ones) count as nonrelevant.
inline Scored average_precision(const std::vector<std::string>& ranked,
                                const std::set<std::string>& relset) {
  if (relset.empty()) return {0.0, true};
  double sum = 0.0;
  int hits = 0;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    if (relset.count(ranked[k - 1])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k);
    }
  }
  return {sum / static_cast<double>(relset.size()), false};
}

inline std::vector<std::string> item_ids(const std::vector<RunEntry>& entries) {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.item_id);
  return out;
}

// Arithmetic mean over topics; flagged (zero-relevant) topics participate as 0.
inline double mean_over_topics(const std::vector<TopicScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("mean_over_topics: no topics");
  double sum = 0.0;
  for (const auto& s : scores) sum += s.value;
  return sum / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------
// Extended inferred average precision

// Per-topic sampled judgments: labels for judged items, a stratum for every
// item whose pool membership is known (judged or not), and per-stratum
// sampling rates. Items absent from stratum_of contribute nothing to the
// expected-precision estimate.
struct StratifiedJudgments {
  std::map<int, double> rates;            // stratum -> sampling rate in (0,1]
  std::map<std::string, int> stratum_of;  // item -> stratum
  std::map<std::string, bool> labels;     // judged item -> relevant?
};

inline StratifiedJudgments stratified_for_topic(const JudgmentSet& js, const std::string& topic) {
  StratifiedJudgments out;
  for (const auto& [id, def] : js.strata) out.rates[id] = def.sampling_rate;
  auto it = js.topics.find(topic);
  if (it != js.topics.end()) {
    for (const auto& j : it->second) {
      out.stratum_of[j.item_id] = j.stratum_id;
      out.labels[j.item_id] = j.relevant;
    }
  }
  return out;
}

// Assigns strata to this run's unjudged items from the strata rank ranges, so
// they enter the D_{s,k} population term. Judged items keep their recorded
// stratum.
inline void add_run_strata(StratifiedJudgments& sj, const std::vector<RunEntry>& ranked,
                           const std::map<int, StratumDef>& strata) {
  for (const auto& e : ranked) {
    if (sj.stratum_of.count(e.item_id)) continue;
    for (const auto& [id, def] : strata)
      if (e.rank >= def.rank_lo && e.rank <= def.rank_hi) {
        sj.stratum_of[e.item_id] = id;
        break;
      }
  }
}

// xinfAP = (1/R-hat) * sum over judged-relevant retrieved items at rank k of
// (1/p_s(k)) * [ 1/k + ((k-1)/k) * E_k ], with
//   R-hat = sum over strata of rel_s / p_s  (over the whole judgment set)
//   E_k   = (1/(k-1)) * sum_s |D_{s,k}| * (rel_{s,k}+eps)/(rel_{s,k}+nonrel_{s,k}+2eps)
//   D_{s,k} = items above rank k belonging to stratum s (judged or not).
// The k=1 term is exactly 1. With eps=0 an all-unjudged slice contributes 0.
inline Scored extended_inferred_ap(const std::vector<std::string>& ranked,
                                   const StratifiedJudgments& sj, double epsilon = 1e-5) {
  if (epsilon < 0) throw std::invalid_argument("extended_inferred_ap: epsilon < 0");
  for (const auto& [item, stratum] : sj.stratum_of) {
    auto rit = sj.rates.find(stratum);
    if (rit == sj.rates.end())
      throw std::invalid_argument("extended_inferred_ap: item " + item +
                                  " in stratum without a rate");
    if (!(rit->second > 0))
      throw std::invalid_argument("extended_inferred_ap: sampling rate <= 0");
  }
  for (const auto& [item, rel] : sj.labels)
    if (!sj.stratum_of.count(item))
      throw std::invalid_argument("extended_inferred_ap: judged item " + item +
                                  " without stratum");

  double r_hat = 0.0;
  for (const auto& [item, rel] : sj.labels)
    if (rel) r_hat += 1.0 / sj.rates.at(sj.stratum_of.at(item));
  if (r_hat == 0.0) return {0.0, true};

  // Per-stratum running tallies over items above the current rank.
  struct Slice {
    int population = 0;  // |D_{s,k}|: all items with this stratum
    int rel = 0;         // judged relevant among them
    int nonrel = 0;      // judged nonrelevant among them
  };
  std::map<int, Slice> above;

  double sum = 0.0;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    const std::string& item = ranked[k - 1];
    auto lit = sj.labels.find(item);
    if (lit != sj.labels.end() && lit->second) {
      double term;
      if (k == 1) {
        term = 1.0;
      } else {
        double ek = 0.0;
        for (const auto& [stratum, slice] : above) {
          if (slice.population == 0) continue;
          double num = slice.rel + epsilon;
          double den = slice.rel + slice.nonrel + 2.0 * epsilon;
          double ratio = den > 0.0 ? num / den : 0.0;
          ek += slice.population * ratio;
        }
        ek /= static_cast<double>(k - 1);
        term = 1.0 / k + (static_cast<double>(k - 1) / k) * ek;
      }
      sum += term / sj.rates.at(sj.stratum_of.at(item));
    }
    // The rank-k item joins the "above" population for later ranks.
    auto sit = sj.stratum_of.find(item);
    if (sit != sj.stratum_of.end()) {
      Slice& slice = above[sit->second];
      ++slice.population;
      if (lit != sj.labels.end()) (lit->second ? slice.rel : slice.nonrel)++;
    }
  }
  return {sum / r_hat, false};
}

// ---------------------------------------------------------------------------
// MRR and accuracy

// Mean over queries of 1/rank of the correct id; 0 when absent.
inline double mrr(const std::vector<std::vector<std::string>>& answers,
                  const std::vector<std::string>& keys) {
  if (answers.size() != keys.size())
    throw std::invalid_argument("mrr: answers and keys differ in length");
  if (keys.empty()) throw std::invalid_argument("mrr: no queries");
  double sum = 0.0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& list = answers[i];
    for (std::size_t r = 0; r < list.size(); ++r) {
      if (list[r] == keys[i]) {
        sum += 1.0 / static_cast<double>(r + 1);
        break;
      }
    }
  }
  return sum / static_cast<double>(keys.size());
}

// MRR over the key's ranked-list queries; unanswered queries score 0.
inline Scored mrr_sheets(const AnswerSheet& submission, const AnswerSheet& key) {
  std::vector<std::vector<std::string>> answers;
  std::vector<std::string> keys;
  for (const auto& e : key.entries) {
    if (e.kind != QueryKind::RankedList) continue;
    if (e.answer.empty()) throw std::invalid_argument("mrr_sheets: key without correct id");
    keys.push_back(e.answer.front());
    const AnswerEntry* sub = submission.find(e.query_id);
    if (sub && sub->kind != QueryKind::RankedList)
      throw std::invalid_argument("mrr_sheets: query " + e.query_id + " is not ranked-list");
    answers.push_back(sub ? sub->answer : std::vector<std::string>{});
  }
  if (keys.empty()) return {0.0, true};
  return {mrr(answers, keys), false};
}

// Fraction of the key's multiple-choice queries answered correctly;
// unanswered counts wrong. Submissions for unknown queries are rejected.
inline Scored accuracy(const AnswerSheet& submission, const AnswerSheet& key) {
  for (const auto& e : submission.entries)
    if (!key.find(e.query_id))
      throw std::invalid_argument("accuracy: unknown query id " + e.query_id);
  int total = 0, correct = 0;
  for (const auto& e : key.entries) {
    if (e.kind != QueryKind::MultipleChoice) continue;
    ++total;
    const AnswerEntry* sub = submission.find(e.query_id);
    if (!sub) continue;
    if (sub->kind != QueryKind::MultipleChoice)
      throw std::invalid_argument("accuracy: query " + e.query_id + " is not multiple-choice");
    if (sub->answer == e.answer) ++correct;
  }
  if (total == 0) return {0.0, true};
  return {static_cast<double>(correct) / total, false};
}

// ---------------------------------------------------------------------------
// Precision / recall / F1

struct Prf {
  Scored precision, recall, f1;
};

inline Prf prf(long tp, long fp, long fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("prf: negative count");
  Prf out;
  if (tp + fp == 0)
    out.precision = {0.0, true};
  else
    out.precision = {static_cast<double>(tp) / (tp + fp), false};
  if (tp + fn == 0)
    out.recall = {0.0, true};
  else
    out.recall = {static_cast<double>(tp) / (tp + fn), false};
  double p = out.precision.value, r = out.recall.value;
  if (out.precision.flagged && out.recall.flagged)
    out.f1 = {0.0, true};
  else if (p + r == 0.0)
    out.f1 = {0.0, false};
  else
    out.f1 = {2.0 * p * r / (p + r), false};
  return out;
}

// ---------------------------------------------------------------------------
// Novelty weighting

// For each (topic, item): N = number of runs in the consideration set that
// retrieved the item, weight = 1 - N/M with M the set size.
struct NoveltyWeights {
  int m = 0;
  std::map<std::string, std::map<std::string, int>> counts;  // topic -> item -> N

  double weight(const std::string& topic, const std::string& item) const {
    auto t = counts.find(topic);
    if (t == counts.end()) return 0.0;
    auto i = t->second.find(item);
    if (i == t->second.end()) return 0.0;
    return 1.0 - static_cast<double>(i->second) / m;
  }
};

inline NoveltyWeights novelty_weights(const std::vector<RankedRun>& all_runs) {
  NoveltyWeights w;
  w.m = static_cast<int>(all_runs.size());
  for (const auto& run : all_runs)
    for (const auto& [topic, list] : run.entries)
      for (const auto& e : list) w.counts[topic][e.item_id]++;
  return w;
}

enum class NoveltyMode { UniqueOnly, AllWeighted };

struct NoveltyScore {
  double raw = 0.0;         // mean over topics of S
  Scored normalized;        // S divided by the per-topic maximum achievable
  std::map<std::string, double> per_topic;  // topic -> S
};

// Per topic, S sums the weight 1 - N/M over relevant items the run retrieved:
// unique-only keeps N = 1 items (weight 1 - 1/M each); all-weighted keeps
// every relevant retrieved item. The final raw score is the mean S over the
// judgment set's topics; the normalized variant divides each topic's S by the
// maximum achievable R_topic * (1 - 1/M) before averaging.
inline NoveltyScore novelty_score(const RankedRun& run, const std::vector<RankedRun>& all_runs,
                                  const JudgmentSet& judgments,
                                  NoveltyMode mode = NoveltyMode::UniqueOnly) {
  const int m = static_cast<int>(all_runs.size());
  if (m < 2) throw std::invalid_argument("novelty_score: need at least 2 runs");
  bool member = false;
  for (const auto& r : all_runs) member = member || (r.run_tag == run.run_tag);
  if (!member) throw std::invalid_argument("novelty_score: run not in consideration set");
  NoveltyWeights w = novelty_weights(all_runs);

  NoveltyScore out;
  double norm_sum = 0.0;
  int norm_topics = 0;
  bool norm_flagged = false;
  for (const auto& [topic, judged] : judgments.topics) {
    std::set<std::string> relset = judgments.relevant_items(topic);
    double s = 0.0;
    if (const auto* list = run.topic_entries(topic)) {
      for (const auto& e : *list) {
        if (!relset.count(e.item_id)) continue;
        int n = w.counts[topic][e.item_id];
        if (mode == NoveltyMode::UniqueOnly && n != 1) continue;
        s += 1.0 - static_cast<double>(n) / m;
      }
    }
    out.per_topic[topic] = s;
    ++norm_topics;
    double max_s = static_cast<double>(relset.size()) * (1.0 - 1.0 / m);
    if (max_s > 0.0)
      norm_sum += s / max_s;
    else
      norm_flagged = true;  // zero relevant: contributes 0
  }
  if (out.per_topic.empty()) throw std::invalid_argument("novelty_score: no topics");
  double raw_sum = 0.0;
  for (const auto& [topic, s] : out.per_topic) raw_sum += s;
  out.raw = raw_sum / static_cast<double>(out.per_topic.size());
  out.normalized = {norm_sum / static_cast<double>(norm_topics), norm_flagged};
  return out;
}

// ---------------------------------------------------------------------------
// Summarization scores

inline double msum_objective(long correct, long possible) {
  if (possible < 1) throw std::invalid_argument("msum_objective: possible < 1");
  if (correct < 0 || correct > possible)
    throw std::invalid_argument("msum_objective: correct outside [0, possible]");
  return static_cast<double>(correct) / static_cast<double>(possible);
}

inline Scored msum_precision(long correct, long false_claims) {
  if (correct < 0 || false_claims < 0)
    throw std::invalid_argument("msum_precision: negative count");
  if (correct + false_claims == 0) return {0.0, true};
  return {static_cast<double>(correct) / static_cast<double>(correct + false_claims), false};
}

// Ratings on a 1..7 scale, 7 best except redundancy where 1 is best; the
// redundancy axis is inverted before averaging.
inline double msum_subjective(double tempo_or_readability, double contextuality,
                              double redundancy) {
  for (double v : {tempo_or_readability, contextuality, redundancy})
    if (!(v >= 1.0 && v <= 7.0))
      throw std::invalid_argument("msum_subjective: rating outside [1,7]");
  return (tempo_or_readability + contextuality + (8.0 - redundancy)) / 3.0;
}

}  // namespace videval
