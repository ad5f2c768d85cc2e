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

#ifndef SEQLR_BASELINES_HPP_
#define SEQLR_BASELINES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqlr/seqdata.hpp"
#include "seqlr/tape.hpp"

namespace seqlr {

enum class ClassifierVariant {
  kPlain,       // K-class classifier on labeled in-distribution data
  kBinary,      // 2-class {in, perturbed}
  kKPlus1,      // perturbed copies labeled as an extra class K
  kCalibrated,  // perturbed copies trained against the uniform target
};

struct ClassifierConfig {
  int num_classes = 2;   // K in-distribution classes
  int filters = 64;
  int filter_width = 12;
  int dense_width = 128;
  int steps = 2000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 0.0;
  ClassifierVariant variant = ClassifierVariant::kPlain;
  // Required for the binary / K+1 / calibrated variants.
  std::optional<PerturbConfig> perturbation;
  // Loss weight of the uniform-target term in the calibrated variant.
  double calibration_weight = 1.0;

  int alphabet_size = 4;
  int output_classes() const;
};

// Conv layer, global max pooling, dense layer, softmax output.
struct Classifier {
  ClassifierConfig config;
  numcore::Matrix conv_w;   // filters x (filter_width * alphabet)
  numcore::Matrix conv_b;   // filters x 1
  numcore::Matrix dense_w;  // dense_width x filters
  numcore::Matrix dense_b;  // dense_width x 1
  numcore::Matrix out_w;    // output_classes x dense_width
  numcore::Matrix out_b;    // output_classes x 1
  std::int64_t train_steps = 0;
  std::uint64_t train_seed = 0;
};

// Cross-entropy training with Adam; deterministic for a fixed seed. Labels
// must lie in [0, K). The perturbed-data variants generate fresh perturbed
// copies each step.
Classifier train_classifier(const std::vector<EncodedSequence>& data,
                            const std::vector<int>& labels, const ClassifierConfig& config,
                            const Alphabet& alphabet, std::uint64_t seed);

// Penultimate activations (after the dense layer) and the class logits.
Eigen::VectorXd classifier_features(const Classifier& model, const EncodedSequence& seq);
Eigen::VectorXd logits_from_features(const Classifier& model, const Eigen::VectorXd& features);
Eigen::VectorXd predictive(const Classifier& model, const EncodedSequence& seq);

double classifier_accuracy(const Classifier& model, const std::vector<EncodedSequence>& data,
                           const std::vector<int>& labels);

// All scores share the convention: larger means more in-distribution.
double score_max_prob(const Classifier& model, const EncodedSequence& seq);
// +sum_k p log p (negative entropy).
double score_neg_entropy(const Classifier& model, const EncodedSequence& seq);
// Temperature-scaled max probability after a signed perturbation of the
// penultimate activations toward higher confidence.
double score_odin(const Classifier& model, const EncodedSequence& seq, double temperature,
                  double epsilon);
// Max class probability of the averaged predictive distribution.
double ensemble_score(const std::vector<Classifier>& models, const EncodedSequence& seq);
// log p(in|x) - log p(perturbed|x) of the binary variant.
double score_binary_logodds(const Classifier& model, const EncodedSequence& seq);
// Max probability over the first K classes of a (K+1)-class classifier.
double score_kplus1(const Classifier& model, const EncodedSequence& seq);

struct MahalanobisFit {
  std::vector<Eigen::VectorXd> class_means;
  numcore::Matrix covariance;  // shared, diagonal-regularized
  Eigen::LDLT<numcore::Matrix> solver;
};

// Class means plus a single covariance pooled across classes. `epsilon` < 0
// picks the default diagonal loading 1e-6 * trace / dim.
MahalanobisFit fit_mahalanobis(const Classifier& model,
                               const std::vector<EncodedSequence>& data,
                               const std::vector<int>& labels, double epsilon = -1.0);
// -min_k squared Mahalanobis distance of the features to class mean k.
double score_mahalanobis(const MahalanobisFit& fit, const Classifier& model,
                         const EncodedSequence& seq);

void save_classifier(const Classifier& model, const std::string& path);
Classifier load_classifier(const std::string& path);

}  // namespace seqlr

#endif  // SEQLR_BASELINES_HPP_
