/*
 * Copyright 2026 The seqlr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "seqlr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "seqlr/hash.hpp"
#include "seqlr/rng.hpp"

namespace seqlr {

namespace {

void check_scores(const std::vector<double>& in_scores,
                  const std::vector<double>& ood_scores) {
  if (in_scores.empty() || ood_scores.empty())
    throw std::invalid_argument("metric requires non-empty score lists");
  for (double s : in_scores)
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
  for (double s : ood_scores)
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
}

}  // namespace

double auroc(const std::vector<double>& in_scores, const std::vector<double>& ood_scores) {
  check_scores(in_scores, ood_scores);
  std::vector<double> ood = ood_scores;
  std::sort(ood.begin(), ood.end());
  // numerator in half-units: 2*wins + ties per in-score, exact in integers
  std::uint64_t num2 = 0;
  for (double s : in_scores) {
    const auto lb = std::lower_bound(ood.begin(), ood.end(), s);
    const auto ub = std::upper_bound(lb, ood.end(), s);
    num2 += 2ULL * static_cast<std::uint64_t>(lb - ood.begin()) +
            static_cast<std::uint64_t>(ub - lb);
  }
  return static_cast<double>(num2) /
         (2.0 * static_cast<double>(in_scores.size()) * static_cast<double>(ood.size()));
}

double auprc(const std::vector<double>& in_scores, const std::vector<double>& ood_scores) {
  check_scores(in_scores, ood_scores);
  // distinct-score threshold groups in descending order
  std::map<double, std::pair<std::int64_t, std::int64_t>, std::greater<>> groups;
  for (double s : in_scores) groups[s].first += 1;
  for (double s : ood_scores) groups[s].second += 1;
  const double total_pos = static_cast<double>(in_scores.size());
  std::int64_t tp = 0, fp = 0;
  double ap = 0.0;
  for (const auto& [score, counts] : groups) {
    tp += counts.first;
    fp += counts.second;
    if (counts.first > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      ap += precision * static_cast<double>(counts.first) / total_pos;
    }
  }
  return ap;
}

double fpr_at_tpr(const std::vector<double>& in_scores, const std::vector<double>& ood_scores,
                  double target_tpr) {
  check_scores(in_scores, ood_scores);
  if (target_tpr <= 0.0 || target_tpr > 1.0)
    throw std::invalid_argument("target TPR must be in (0,1]");
  std::vector<double> in = in_scores, ood = ood_scores;
  std::sort(in.begin(), in.end());
  std::sort(ood.begin(), ood.end());
  std::set<double> thresholds(in.begin(), in.end());
  thresholds.insert(ood.begin(), ood.end());

  const double n_in = static_cast<double>(in.size());
  const double n_ood = static_cast<double>(ood.size());
  double best = 1.0;
  for (double t : thresholds) {
    const double tpr =
        static_cast<double>(in.end() - std::lower_bound(in.begin(), in.end(), t)) / n_in;
    if (tpr < target_tpr) continue;
    const double fpr =
        static_cast<double>(ood.end() - std::lower_bound(ood.begin(), ood.end(), t)) / n_ood;
    best = std::min(best, fpr);
  }
  return best;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("pearson requires equal lengths >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;  // constant input, correlation undefined
  return sxy / std::sqrt(sxx * syy);
}

std::vector<RocPoint> roc_points(const std::vector<double>& in_scores,
                                 const std::vector<double>& ood_scores) {
  check_scores(in_scores, ood_scores);
  std::map<double, std::pair<std::int64_t, std::int64_t>, std::greater<>> groups;
  for (double s : in_scores) groups[s].first += 1;
  for (double s : ood_scores) groups[s].second += 1;
  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  std::int64_t tp = 0, fp = 0;
  for (const auto& [score, counts] : groups) {
    tp += counts.first;
    fp += counts.second;
    points.push_back({static_cast<double>(fp) / static_cast<double>(ood_scores.size()),
                      static_cast<double>(tp) / static_cast<double>(in_scores.size())});
  }
  return points;
}

std::vector<PrPoint> pr_points(const std::vector<double>& in_scores,
                               const std::vector<double>& ood_scores) {
  check_scores(in_scores, ood_scores);
  std::map<double, std::pair<std::int64_t, std::int64_t>, std::greater<>> groups;
  for (double s : in_scores) groups[s].first += 1;
  for (double s : ood_scores) groups[s].second += 1;
  std::vector<PrPoint> points;
  points.push_back({0.0, 1.0});
  std::int64_t tp = 0, fp = 0;
  for (const auto& [score, counts] : groups) {
    tp += counts.first;
    fp += counts.second;
    points.push_back({static_cast<double>(tp) / static_cast<double>(in_scores.size()),
                      static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }
  return points;
}

PerClassAuroc per_class_auroc_vs_distance(const std::vector<ScoreRecord>& records) {
  std::vector<double> in_scores;
  std::map<int, std::vector<double>> ood_by_class;
  std::map<int, double> class_distance;
  std::string method;
  for (const auto& rec : records) {
    if (method.empty()) method = rec.method;
    if (rec.origin == Origin::kInDistribution) {
      in_scores.push_back(rec.score);
    } else if (rec.origin == Origin::kOod) {
      if (!rec.class_label || !rec.min_d2s)
        throw std::invalid_argument("OOD records need class_label and min_d2s");
      ood_by_class[*rec.class_label].push_back(rec.score);
      class_distance[*rec.class_label] = *rec.min_d2s;
    }
  }
  if (ood_by_class.size() < 2)
    throw std::invalid_argument("per-class analysis requires >= 2 OOD classes");
  if (in_scores.empty()) throw std::invalid_argument("no in-distribution records");

  PerClassAuroc result;
  std::vector<double> distances, aurocs;
  for (const auto& [label, scores] : ood_by_class) {
    ClassDistanceRow row;
    row.method = method;
    row.class_label = label;
    row.min_d2s = class_distance[label];
    row.auroc = auroc(in_scores, scores);
    distances.push_back(row.min_d2s);
    aurocs.push_back(row.auroc);
    result.rows.push_back(row);
  }
  result.pcc = pearson(distances, aurocs);
  return result;
}

namespace {

std::vector<HistBin> make_hist(const std::vector<double>& in_scores,
                               const std::vector<double>& ood_scores, int bins) {
  double lo = in_scores[0], hi = in_scores[0];
  for (double s : in_scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  for (double s : ood_scores) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi == lo) hi = lo + 1.0;
  std::vector<HistBin> out(bins);
  const double width = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) {
    out[i].lo = lo + i * width;
    out[i].hi = lo + (i + 1) * width;
  }
  auto bin_of = [&](double s) {
    return std::min(bins - 1, static_cast<int>((s - lo) / width));
  };
  for (double s : in_scores) out[bin_of(s)].n_in += 1;
  for (double s : ood_scores) out[bin_of(s)].n_ood += 1;
  return out;
}

template <typename T>
void subsample_to(std::vector<T>& v, std::size_t n, Rng& rng) {
  for (std::size_t i = v.size() - 1; i > 0; --i)
    std::swap(v[i], v[rng.uniform_int(static_cast<int>(i + 1))]);
  v.resize(n);
}

}  // namespace

EvalReport build_report(const std::vector<ScoreRecord>& records, const ReportOptions& options) {
  std::map<std::string, std::vector<const ScoreRecord*>> by_method;
  for (const auto& rec : records) {
    if (rec.method.empty()) throw std::invalid_argument("score record without method name");
    by_method[rec.method].push_back(&rec);
  }
  if (by_method.empty()) throw std::invalid_argument("no score records");

  EvalReport report;
  for (const auto& [method, recs] : by_method) {
    std::vector<const ScoreRecord*> in_recs, ood_recs;
    for (const auto* r : recs) {
      if (r->origin == Origin::kInDistribution) in_recs.push_back(r);
      else if (r->origin == Origin::kOod) ood_recs.push_back(r);
    }
    if (in_recs.empty() || ood_recs.empty())
      throw std::invalid_argument("method " + method + " needs both origins");
    if (options.equal_subsample) {
      const std::size_t n = std::min(in_recs.size(), ood_recs.size());
      Rng rng = Rng::derive(options.subsample_seed, fnv1a64(method));
      subsample_to(in_recs, n, rng);
      subsample_to(ood_recs, n, rng);
    }

    std::vector<double> in_scores, ood_scores;
    for (const auto* r : in_recs) in_scores.push_back(r->score);
    for (const auto* r : ood_recs) ood_scores.push_back(r->score);

    MethodReport mr;
    mr.method = method;
    mr.auroc = auroc(in_scores, ood_scores);
    mr.auprc = auprc(in_scores, ood_scores);
    mr.fpr80 = fpr_at_tpr(in_scores, ood_scores, options.target_tpr);
    mr.n_in = static_cast<std::int64_t>(in_scores.size());
    mr.n_ood = static_cast<std::int64_t>(ood_scores.size());
    mr.roc_points = roc_points(in_scores, ood_scores);
    mr.pr_points = pr_points(in_scores, ood_scores);
    mr.hist_bins = make_hist(in_scores, ood_scores, options.hist_bins);

    // across-seed AUROC mean/stderr when records carry seeds
    std::set<std::uint64_t> seeds;
    for (const auto* r : recs)
      if (r->seed) seeds.insert(*r->seed);
    if (seeds.size() > 1) {
      std::vector<double> per_seed;
      for (std::uint64_t s : seeds) {
        std::vector<double> si, so;
        for (const auto* r : in_recs)
          if (r->seed && *r->seed == s) si.push_back(r->score);
        for (const auto* r : ood_recs)
          if (r->seed && *r->seed == s) so.push_back(r->score);
        if (!si.empty() && !so.empty()) per_seed.push_back(auroc(si, so));
      }
      double mean = 0.0;
      for (double v : per_seed) mean += v;
      mean /= static_cast<double>(per_seed.size());
      double var = 0.0;
      for (double v : per_seed) var += (v - mean) * (v - mean);
      var /= static_cast<double>(per_seed.size() > 1 ? per_seed.size() - 1 : 1);
      mr.auroc_mean = mean;
      mr.auroc_stderr = std::sqrt(var / static_cast<double>(per_seed.size()));
    } else {
      mr.auroc_mean = mr.auroc;
      mr.auroc_stderr = 0.0;
    }

    // GC confound analysis over the pooled records
    std::vector<double> scores_with_gc, gcs;
    for (const auto* r : recs) {
      if (r->gc_content) {
        scores_with_gc.push_back(r->score);
        gcs.push_back(*r->gc_content);
      }
    }
    if (gcs.size() >= 2) mr.pcc_score_gc = pearson(scores_with_gc, gcs);

    report.methods.push_back(std::move(mr));

    // distance analysis when >= 2 OOD classes carry distances
    std::set<int> ood_classes;
    bool have_distance = true;
    for (const auto* r : ood_recs) {
      if (!r->class_label || !r->min_d2s) {
        have_distance = false;
        break;
      }
      ood_classes.insert(*r->class_label);
    }
    if (have_distance && ood_classes.size() >= 2) {
      std::vector<ScoreRecord> copy;
      for (const auto* r : in_recs) copy.push_back(*r);
      for (const auto* r : ood_recs) copy.push_back(*r);
      PerClassAuroc pca = per_class_auroc_vs_distance(copy);
      for (auto& row : pca.rows) report.class_distance.push_back(row);
      report.class_distance_pcc[method] = pca.pcc;
    }
  }
  return report;
}

}  // namespace seqlr
