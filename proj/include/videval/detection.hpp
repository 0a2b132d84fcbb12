#pragma once

// Streaming activity-detection scoring: temporal instance alignment,
// confusion counts, DET curves, Pmiss@RFA, nAUDC, time-based false alarms,
// and object-detection congruence (N_MODE / minMODE) for AOD.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "videval/assignment.hpp"
#include "videval/submission.hpp"
#include "videval/util.hpp"

namespace videval {

enum class DetectionMode { AD, AOD };

struct CongruenceParams {
  double theta_t = 0.0;   // minimum temporal IoU; 0 = any positive overlap
  double w_tiou = 1.0;    // secondary kernel weight on temporal IoU
  double w_conf = 1.0;    // secondary kernel weight on presence confidence
  double w_cong = 1.0;    // secondary kernel weight on 1 - minMODE (AOD)
  double theta_s = 0.5;   // spatial IoU eligibility for box matching
  double c_md = 1.0;      // object missed-detection cost
  double c_fa = 1.0;      // object false-alarm cost
};

struct MatchedPair {
  int ref_index = 0;
  int sys_index = 0;
  double temporal_iou = 0.0;
  double kernel_value = 0.0;
  double min_mode = 0.0;    // AOD only; 0 in AD mode
  double congruence = 0.0;  // 1 - clamp(min_mode, 0, 1); 0 in AD mode
  bool mode_flagged = false;  // zero reference boxes over the overlap frames
};

struct Alignment {
  std::vector<MatchedPair> matched;  // ascending by ref_index
  std::vector<int> unmatched_ref;
  std::vector<int> unmatched_sys;
};

// ---------------------------------------------------------------------------
// Interval arithmetic on inclusive frame spans

inline long span_intersection(int b1, int e1, int b2, int e2) {
  long lo = std::max(b1, b2), hi = std::min(e1, e2);
  return hi >= lo ? hi - lo + 1 : 0;
}

inline double temporal_iou(const ActivityInstance& a, const ActivityInstance& b) {
  long inter = span_intersection(a.begin_frame, a.end_frame, b.begin_frame, b.end_frame);
  long uni = a.span_frames() + static_cast<long>(b.span_frames()) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Merge inclusive [begin,end] spans; returns disjoint ascending spans.
inline std::vector<std::pair<int, int>> merge_spans(std::vector<std::pair<int, int>> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<int, int>> out;
  for (const auto& [b, e] : spans) {
    if (!out.empty() && b <= out.back().second + 1)
      out.back().second = std::max(out.back().second, e);
    else
      out.emplace_back(b, e);
  }
  return out;
}

inline long total_frames(const std::vector<std::pair<int, int>>& merged) {
  long n = 0;
  for (const auto& [b, e] : merged) n += e - b + 1;
  return n;
}

// Frames covered by `spans` but not by `minus` (both merged, disjoint).
inline long frames_outside(const std::vector<std::pair<int, int>>& spans,
                           const std::vector<std::pair<int, int>>& minus) {
  long outside = 0;
  std::size_t j = 0;
  for (auto [b, e] : spans) {
    long covered = 0;
    for (std::size_t k = j; k < minus.size() && minus[k].first <= e; ++k) {
      covered += span_intersection(b, e, minus[k].first, minus[k].second);
      if (minus[k].second < b) j = k + 1;  // wholly before: skip next time
    }
    outside += (e - b + 1) - covered;
  }
  return outside;
}

// ---------------------------------------------------------------------------
// Per-frame object-box matching (MODE)

inline double spatial_iou(const Box& a, const Box& b) {
  double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  double inter = ix * iy;
  double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

struct FrameMode {
  long md = 0;  // missed reference boxes
  long fa = 0;  // unmatched system boxes
  long cd = 0;  // matched pairs
};

// One frame: optimal one-to-one box matching among system boxes with object
// confidence >= tau_obj; eligibility is spatial IoU >= theta_s. The counts do
// not depend on which maximum-cardinality matching is chosen, so the kernel
// is cardinality plus a small IoU tie-break.
inline FrameMode frame_mode(const std::vector<Box>& ref_boxes, const std::vector<Box>& sys_boxes,
                            double tau_obj, const CongruenceParams& params) {
  std::vector<const Box*> sys;
  for (const auto& b : sys_boxes)
    if (b.conf >= tau_obj) sys.push_back(&b);
  const int n = static_cast<int>(ref_boxes.size());
  const int m = static_cast<int>(sys.size());
  FrameMode out;
  if (n > 0 && m > 0) {
    std::vector<std::vector<double>> weight(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<char>> eligible(n, std::vector<char>(m, 0));
    const double scale = 1.0 / (static_cast<double>(std::min(n, m)) + 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        double iou = spatial_iou(ref_boxes[i], *sys[j]);
        if (iou >= params.theta_s) {
          eligible[i][j] = 1;
          weight[i][j] = 1.0 + scale * iou;
        }
      }
    out.cd = static_cast<long>(max_weight_assignment(weight, eligible).pairs.size());
  }
  out.md = n - out.cd;
  out.fa = m - out.cd;
  return out;
}

// N_MODE over the frames where the system instance overlaps the reference
// instance: sum_t (C_MD*MD_t + C_FA*FA_t) / sum_t N_R^t.
inline Scored n_mode(const ActivityInstance& ref, const ActivityInstance& sys, double tau_obj,
                     const CongruenceParams& params) {
  int lo = std::max(ref.begin_frame, sys.begin_frame);
  int hi = std::min(ref.end_frame, sys.end_frame);
  // Frames with neither reference nor system boxes contribute nothing, so
  // only frames present in either objects map need visiting.
  std::set<int> frames;
  for (const auto& [t, boxes] : ref.objects)
    if (t >= lo && t <= hi) frames.insert(t);
  for (const auto& [t, boxes] : sys.objects)
    if (t >= lo && t <= hi) frames.insert(t);
  static const std::vector<Box> kNoBoxes;
  double cost = 0.0;
  long ref_total = 0;
  for (int t : frames) {
    auto rit = ref.objects.find(t);
    const std::vector<Box>& rb = rit == ref.objects.end() ? kNoBoxes : rit->second;
    auto sit = sys.objects.find(t);
    const std::vector<Box>& sb = sit == sys.objects.end() ? kNoBoxes : sit->second;
    FrameMode fm = frame_mode(rb, sb, tau_obj, params);
    cost += params.c_md * fm.md + params.c_fa * fm.fa;
    ref_total += static_cast<long>(rb.size());
  }
  if (ref_total == 0) return {0.0, true};
  return {cost / static_cast<double>(ref_total), false};
}

// Minimum N_MODE over the distinct object confidences present in the overlap
// frames, plus the +infinity sentinel (no system boxes).
inline Scored min_mode(const ActivityInstance& ref, const ActivityInstance& sys,
                       const CongruenceParams& params) {
  int lo = std::max(ref.begin_frame, sys.begin_frame);
  int hi = std::min(ref.end_frame, sys.end_frame);
  std::set<double> taus;
  for (const auto& [frame, boxes] : sys.objects)
    if (frame >= lo && frame <= hi)
      for (const auto& b : boxes) taus.insert(b.conf);
  Scored best = n_mode(ref, sys, std::numeric_limits<double>::infinity(), params);
  if (best.flagged) return best;  // no reference boxes anywhere in the overlap
  for (double tau : taus) best.value = std::min(best.value, n_mode(ref, sys, tau, params).value);
  return best;
}

inline double congruence_term(const Scored& mm) {
  if (mm.flagged) return 0.0;
  return 1.0 - std::clamp(mm.value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Instance alignment

// Maximum-weight one-to-one matching per video over eligible pairs. The
// kernel is 1 plus scaled secondary terms, so matched-pair count dominates
// and the secondary terms only break ties between equal-cardinality
// matchings.
inline Alignment align_instances(const ActivityInstanceSet& ref, const ActivityInstanceSet& sys,
                                 const CongruenceParams& params, DetectionMode mode) {
  std::set<std::string> labels;
  for (const auto& inst : ref.instances) labels.insert(inst.activity);
  for (const auto& inst : sys.instances) labels.insert(inst.activity);
  if (labels.size() > 1)
    throw std::invalid_argument("align_instances: mixed activity labels");

  double w_sum = params.w_tiou + params.w_conf + (mode == DetectionMode::AOD ? params.w_cong : 0.0);
  const std::size_t pairs_bound = std::min(ref.instances.size(), sys.instances.size());
  const double scale =
      w_sum > 0.0 ? 1.0 / (w_sum * (static_cast<double>(pairs_bound) + 1.0)) : 0.0;

  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> by_video;
  for (std::size_t i = 0; i < ref.instances.size(); ++i)
    by_video[ref.instances[i].video_id].first.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < sys.instances.size(); ++j)
    by_video[sys.instances[j].video_id].second.push_back(static_cast<int>(j));

  Alignment out;
  std::vector<char> ref_taken(ref.instances.size(), 0), sys_taken(sys.instances.size(), 0);
  for (const auto& [video, idx] : by_video) {
    const auto& [ref_idx, sys_idx] = idx;
    const int n = static_cast<int>(ref_idx.size());
    const int m = static_cast<int>(sys_idx.size());
    if (n == 0 || m == 0) continue;
    std::vector<std::vector<double>> weight(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<char>> eligible(n, std::vector<char>(m, 0));
    // Cache congruence per pair for the matched-pair record.
    std::vector<std::vector<Scored>> mm(n, std::vector<Scored>(m));
    for (int a = 0; a < n; ++a) {
      const ActivityInstance& r = ref.instances[ref_idx[a]];
      for (int b = 0; b < m; ++b) {
        const ActivityInstance& s = sys.instances[sys_idx[b]];
        long inter = span_intersection(r.begin_frame, r.end_frame, s.begin_frame, s.end_frame);
        if (inter < 1) continue;
        double tiou = temporal_iou(r, s);
        if (tiou < params.theta_t) continue;
        double secondary = params.w_tiou * tiou + params.w_conf * s.confidence;
        if (mode == DetectionMode::AOD) {
          mm[a][b] = min_mode(r, s, params);
          double cong = congruence_term(mm[a][b]);
          if (!(cong > 0.0)) continue;  // AOD demands spatio-temporal agreement
          secondary += params.w_cong * cong;
        }
        eligible[a][b] = 1;
        weight[a][b] = 1.0 + scale * secondary;
      }
    }
    AssignmentResult res = max_weight_assignment(weight, eligible);
    for (const auto& [a, b] : res.pairs) {
      MatchedPair p;
      p.ref_index = ref_idx[a];
      p.sys_index = sys_idx[b];
      p.temporal_iou = temporal_iou(ref.instances[p.ref_index], sys.instances[p.sys_index]);
      p.kernel_value = weight[a][b];
      if (mode == DetectionMode::AOD) {
        p.mode_flagged = mm[a][b].flagged;
        p.min_mode = mm[a][b].value;
        p.congruence = congruence_term(mm[a][b]);
      }
      ref_taken[p.ref_index] = 1;
      sys_taken[p.sys_index] = 1;
      out.matched.push_back(std::move(p));
    }
  }
  std::sort(out.matched.begin(), out.matched.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.ref_index < b.ref_index; });
  for (std::size_t i = 0; i < ref.instances.size(); ++i)
    if (!ref_taken[i]) out.unmatched_ref.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < sys.instances.size(); ++j)
    if (!sys_taken[j]) out.unmatched_sys.push_back(static_cast<int>(j));
  return out;
}

// ---------------------------------------------------------------------------
// Confusion counts and rates

struct ConfusionCounts {
  long cd = 0;
  long md = 0;
  long fa = 0;
};

// Threshold applied after alignment: a matched pair whose system confidence
// falls below tau turns its reference into a miss (the system instance is
// simply dropped, not a false alarm).
inline ConfusionCounts confusion_counts(const Alignment& alignment,
                                        const ActivityInstanceSet& sys, double tau) {
  ConfusionCounts out;
  for (const auto& p : alignment.matched) {
    if (sys.instances[p.sys_index].confidence >= tau)
      ++out.cd;
    else
      ++out.md;
  }
  out.md += static_cast<long>(alignment.unmatched_ref.size());
  for (int j : alignment.unmatched_sys)
    if (sys.instances[j].confidence >= tau) ++out.fa;
  return out;
}

inline double pmiss(long n_md, long n_true) {
  if (n_true < 1) throw std::invalid_argument("pmiss: n_true < 1");
  return static_cast<double>(n_md) / static_cast<double>(n_true);
}

inline double rfa(long n_fa, double minutes) {
  if (!(minutes > 0)) throw std::invalid_argument("rfa: minutes <= 0");
  return static_cast<double>(n_fa) / minutes;
}

struct TfaOptions {
  double fps = 30.0;       // converts videoDurations minutes into frames
  bool per_video = false;  // mean of per-video ratios instead of corpus pooling
};

// Fraction of non-target time the system flags at threshold tau:
// false-alarm frames (system-positive outside every reference instance)
// over non-target frames (total duration minus reference-covered time).
inline double tfa(const ActivityInstanceSet& sys, const ActivityInstanceSet& ref, double tau,
                  const TfaOptions& opt = {}) {
  if (!(opt.fps > 0)) throw std::invalid_argument("tfa: fps <= 0");
  for (const auto& inst : sys.instances)
    if (!ref.video_durations.count(inst.video_id))
      throw std::invalid_argument("tfa: system video " + inst.video_id +
                                  " outside the reference universe");
  std::map<std::string, std::vector<std::pair<int, int>>> ref_spans, sys_spans;
  for (const auto& inst : ref.instances)
    ref_spans[inst.video_id].emplace_back(inst.begin_frame, inst.end_frame);
  for (const auto& inst : sys.instances)
    if (inst.confidence >= tau)
      sys_spans[inst.video_id].emplace_back(inst.begin_frame, inst.end_frame);

  double fa_total = 0.0, nt_total = 0.0;
  double per_video_sum = 0.0;
  long per_video_count = 0;
  for (const auto& [video, minutes] : ref.video_durations) {
    double frames_in_video = minutes * 60.0 * opt.fps;
    auto refs = merge_spans(ref_spans.count(video) ? ref_spans[video]
                                                   : std::vector<std::pair<int, int>>{});
    auto syss = merge_spans(sys_spans.count(video) ? sys_spans[video]
                                                   : std::vector<std::pair<int, int>>{});
    double fa = static_cast<double>(frames_outside(syss, refs));
    double nt = frames_in_video - static_cast<double>(total_frames(refs));
    fa_total += fa;
    nt_total += nt;
    if (nt > 0) {
      per_video_sum += fa / nt;
      ++per_video_count;
    }
  }
  if (opt.per_video) {
    if (per_video_count == 0) throw std::invalid_argument("tfa: zero non-target time");
    return per_video_sum / static_cast<double>(per_video_count);
  }
  if (!(nt_total > 0)) throw std::invalid_argument("tfa: zero non-target time");
  return fa_total / nt_total;
}

// ---------------------------------------------------------------------------
// DET curves

struct DetPoint {
  double threshold = 0.0;
  double pmiss = 0.0;
  double rfa = 0.0;
  std::optional<double> tfa;
};

struct DetCurve {
  std::string activity;
  std::vector<DetPoint> points;  // thresholds strictly decreasing
  long n_true = 0;
  double minutes = 0.0;
};

// Threshold sweep over the distinct system confidences in descending order
// preceded by +infinity, against one fixed global alignment.
inline DetCurve det_curve_from_alignment(const Alignment& alignment,
                                         const ActivityInstanceSet& ref,
                                         const ActivityInstanceSet& sys,
                                         const TfaOptions* tfa_opt = nullptr) {
  if (ref.instances.empty()) throw std::invalid_argument("det_curve: empty reference set");
  DetCurve curve;
  curve.activity = ref.instances.front().activity;
  curve.n_true = static_cast<long>(ref.instances.size());
  curve.minutes = ref.total_minutes();
  if (!(curve.minutes > 0)) throw std::invalid_argument("det_curve: zero video minutes");
  for (const auto& inst : sys.instances)
    if (!ref.video_durations.count(inst.video_id))
      throw std::invalid_argument("det_curve: system video " + inst.video_id +
                                  " outside the reference universe");

  std::set<double, std::greater<double>> taus;
  for (const auto& inst : sys.instances) taus.insert(inst.confidence);

  std::vector<double> sweep;
  sweep.push_back(std::numeric_limits<double>::infinity());
  for (double t : taus) sweep.push_back(t);
  for (double tau : sweep) {
    ConfusionCounts c = confusion_counts(alignment, sys, tau);
    DetPoint p;
    p.threshold = tau;
    p.pmiss = pmiss(c.md, curve.n_true);
    p.rfa = rfa(c.fa, curve.minutes);
    if (tfa_opt) p.tfa = tfa(sys, ref, tau, *tfa_opt);
    curve.points.push_back(p);
  }
  return curve;
}

// One global alignment, then the threshold sweep.
inline DetCurve det_curve(const ActivityInstanceSet& ref, const ActivityInstanceSet& sys,
                          const CongruenceParams& params, DetectionMode mode,
                          const TfaOptions* tfa_opt = nullptr) {
  Alignment alignment = align_instances(ref, sys, params, mode);
  return det_curve_from_alignment(alignment, ref, sys, tfa_opt);
}

// Step-function evaluation: pmiss of the last point with rfa <= target; 1.0
// when no point qualifies.
inline double pmiss_at_rfa(const DetCurve& curve, double target_rfa) {
  if (curve.points.empty()) throw std::invalid_argument("pmiss_at_rfa: empty curve");
  if (target_rfa < 0) throw std::invalid_argument("pmiss_at_rfa: negative target");
  double value = 1.0;
  for (const auto& p : curve.points)
    if (p.rfa <= target_rfa) value = p.pmiss;
  return value;
}

// Threshold at the Pmiss@RFA operating point (last point with rfa <= target).
inline std::optional<double> threshold_at_rfa(const DetCurve& curve, double target_rfa) {
  std::optional<double> tau;
  for (const auto& p : curve.points)
    if (p.rfa <= target_rfa) tau = p.threshold;
  return tau;
}

// nAUDC_a = (1/a) * integral over [0,a] of the right-continuous step function
// Pmiss(x), with Pmiss = 1 left of the first achievable point and constant
// beyond the last.
inline double naudc(const DetCurve& curve, double a) {
  if (!(a > 0)) throw std::invalid_argument("naudc: a <= 0");
  if (curve.points.empty()) throw std::invalid_argument("naudc: empty curve");
  double integral = 0.0;
  double x = 0.0;
  double current = 1.0;
  for (const auto& p : curve.points) {
    if (p.rfa > a) break;
    if (p.rfa > x) {
      integral += (p.rfa - x) * current;
      x = p.rfa;
    }
    current = p.pmiss;  // same-rfa successors override (zero width)
  }
  if (a > x) integral += (a - x) * current;
  return integral / a;
}

// Unweighted mean over activities; empty input is the caller's error.
inline double aggregate_activities(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("aggregate_activities: no activities");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Restrict a set to one activity label, preserving video durations.
inline ActivityInstanceSet filter_activity(const ActivityInstanceSet& set,
                                           const std::string& activity) {
  ActivityInstanceSet out;
  out.video_durations = set.video_durations;
  for (const auto& inst : set.instances)
    if (inst.activity == activity) out.instances.push_back(inst);
  return out;
}

}  // namespace videval
