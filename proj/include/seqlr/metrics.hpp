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

#ifndef SEQLR_METRICS_HPP_
#define SEQLR_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seqlr/seqdata.hpp"

namespace seqlr {

// The unit every metric consumes. Scores follow the shared convention:
// larger means more in-distribution.
struct ScoreRecord {
  std::string id;
  Origin origin = Origin::kUnknown;
  std::string method;
  double score = 0.0;
  std::optional<double> gc_content;
  std::optional<int> class_label;
  std::optional<double> min_d2s;
  std::optional<std::uint64_t> seed;
};

// Mann-Whitney AUROC with half credit for ties, in-distribution positive.
// Exact: the numerator is accumulated in integer half-units.
double auroc(const std::vector<double>& in_scores, const std::vector<double>& ood_scores);

// Average precision, in-distribution positive, tied scores grouped into one
// threshold step.
double auprc(const std::vector<double>& in_scores, const std::vector<double>& ood_scores);

// Minimum FPR over observed-score thresholds (>= rule) achieving
// TPR >= target_tpr.
double fpr_at_tpr(const std::vector<double>& in_scores, const std::vector<double>& ood_scores,
                  double target_tpr = 0.8);

// Sample Pearson correlation coefficient; 0 when either input is constant.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 1.0;
};

struct HistBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t n_in = 0;
  std::int64_t n_ood = 0;
};

struct MethodReport {
  std::string method;
  double auroc = 0.0;
  double auprc = 0.0;
  double fpr80 = 0.0;
  std::int64_t n_in = 0;
  std::int64_t n_ood = 0;
  // AUROC mean and standard error across seeds (single seed: mean = auroc,
  // stderr = 0).
  double auroc_mean = 0.0;
  double auroc_stderr = 0.0;
  std::vector<RocPoint> roc_points;
  std::vector<PrPoint> pr_points;
  std::vector<HistBin> hist_bins;
  std::optional<double> pcc_score_gc;
};

struct ClassDistanceRow {
  std::string method;
  int class_label = 0;
  double min_d2s = 0.0;
  double auroc = 0.0;
};

struct EvalReport {
  std::vector<MethodReport> methods;
  std::vector<ClassDistanceRow> class_distance;
  // PCC of (min d2S, per-class AUROC) per method, when distances are present.
  std::map<std::string, double> class_distance_pcc;
};

struct PerClassAuroc {
  std::vector<ClassDistanceRow> rows;
  double pcc = 0.0;
};

// Per-OOD-class AUROC (that class's OOD scores against all in-distribution
// scores) and its correlation with the class's minimum d2S distance.
// Requires >= 2 OOD classes, each carrying class_label and min_d2s.
PerClassAuroc per_class_auroc_vs_distance(const std::vector<ScoreRecord>& records);

struct ReportOptions {
  bool equal_subsample = false;  // subsample in/ood to equal counts
  int hist_bins = 30;
  double target_tpr = 0.8;
  std::uint64_t subsample_seed = 0;
};

// Groups records by method and assembles metrics, plot-data tables, and the
// covariate analyses. Throws on an empty method group missing either origin.
EvalReport build_report(const std::vector<ScoreRecord>& records,
                        const ReportOptions& options = {});

// ROC curve over observed thresholds; starts at (0,0) and ends at (1,1).
std::vector<RocPoint> roc_points(const std::vector<double>& in_scores,
                                 const std::vector<double>& ood_scores);
std::vector<PrPoint> pr_points(const std::vector<double>& in_scores,
                               const std::vector<double>& ood_scores);

}  // namespace seqlr

#endif  // SEQLR_METRICS_HPP_
