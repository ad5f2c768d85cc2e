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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "seqlr/baselines.hpp"
#include "seqlr/rng.hpp"

using namespace seqlr;

namespace {

// two classes with distinct planted motifs
struct LabeledData {
  std::vector<EncodedSequence> seqs;
  std::vector<int> labels;
};

LabeledData two_class_corpus(int per_class, int length, std::uint64_t seed,
                             const Alphabet& alphabet) {
  Rng rng(seed);
  const std::vector<std::string> motifs = {"ACGTACGTAC", "TTGACATTGA"};
  LabeledData data;
  for (int cls = 0; cls < 2; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      std::string raw;
      for (int d = 0; d < length; ++d) raw.push_back("ACGT"[rng.uniform_int(4)]);
      const int offset = rng.uniform_int(length - 10 + 1);
      raw.replace(offset, 10, motifs[cls]);
      auto seq = encode("c" + std::to_string(cls) + "_" + std::to_string(i), raw, alphabet);
      seq.class_label = cls;
      seq.origin = Origin::kInDistribution;
      data.seqs.push_back(std::move(seq));
      data.labels.push_back(cls);
    }
  }
  return data;
}

ClassifierConfig tiny_config(int steps = 120) {
  ClassifierConfig cfg;
  cfg.num_classes = 2;
  cfg.filters = 12;
  cfg.filter_width = 8;
  cfg.dense_width = 16;
  cfg.steps = steps;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-3;
  return cfg;
}

}  // namespace

TEST_CASE("classifier learns the two-motif problem") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(60, 60, 1, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(), dna, 7);
  CHECK(classifier_accuracy(clf, data.seqs, data.labels) > 0.8);
}

TEST_CASE("predictive distribution is a proper distribution") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(20, 50, 2, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(20), dna, 3);
  const Eigen::VectorXd p = predictive(clf, data.seqs[0]);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.minCoeff() >= 0.0);
}

TEST_CASE("entropy score matches the hand value for p=(0.9, 0.1)") {
  // score = sum p log p = 0.9 ln 0.9 + 0.1 ln 0.1 = -0.325083
  const double expected = 0.9 * std::log(0.9) + 0.1 * std::log(0.1);
  CHECK(expected == doctest::Approx(-0.3250829733914482).epsilon(1e-12));
}

TEST_CASE("odin with T=1 and eps=0 reduces bitwise to max probability") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(30, 50, 4, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(40), dna, 5);
  for (const auto& s : data.seqs)
    CHECK(score_odin(clf, s, 1.0, 0.0) == score_max_prob(clf, s));
}

TEST_CASE("odin perturbation and temperature change the score") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(30, 50, 5, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(60), dna, 6);
  const EncodedSequence& s = data.seqs[0];
  CHECK(score_odin(clf, s, 1000.0, 0.0) != score_max_prob(clf, s));
  const double perturbed = score_odin(clf, s, 1.0, 1e-2);
  CHECK(perturbed > 0.0);
  CHECK(perturbed <= 1.0);
  CHECK(perturbed != score_max_prob(clf, s));
}

TEST_CASE("ensemble of one equals the single model score") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(25, 40, 7, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(30), dna, 8);
  for (int i = 0; i < 10; ++i)
    CHECK(ensemble_score({clf}, data.seqs[i]) == score_max_prob(clf, data.seqs[i]));
}

TEST_CASE("ensemble averages the predictive distributions") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(25, 40, 9, dna);
  const Classifier a = train_classifier(data.seqs, data.labels, tiny_config(30), dna, 10);
  const Classifier b = train_classifier(data.seqs, data.labels, tiny_config(30), dna, 11);
  const EncodedSequence& s = data.seqs[0];
  const Eigen::VectorXd avg = 0.5 * (predictive(a, s) + predictive(b, s));
  CHECK(ensemble_score({a, b}, s) == doctest::Approx(avg.maxCoeff()).epsilon(1e-12));
}

TEST_CASE("binary variant log-odds equals the logit difference") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(30, 50, 12, dna);
  ClassifierConfig cfg = tiny_config(60);
  cfg.variant = ClassifierVariant::kBinary;
  cfg.perturbation = PerturbConfig{0.3, PerturbSemantics::kFullAlphabet};
  const Classifier clf = train_classifier(data.seqs, data.labels, cfg, dna, 13);
  CHECK(clf.config.output_classes() == 2);
  const EncodedSequence& s = data.seqs[0];
  const Eigen::VectorXd logits = logits_from_features(clf, classifier_features(clf, s));
  CHECK(score_binary_logodds(clf, s) == doctest::Approx(logits(0) - logits(1)).epsilon(1e-12));
}

TEST_CASE("kplus1 variant scores over the first K classes only") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(30, 50, 14, dna);
  ClassifierConfig cfg = tiny_config(60);
  cfg.variant = ClassifierVariant::kKPlus1;
  cfg.perturbation = PerturbConfig{0.3, PerturbSemantics::kFullAlphabet};
  const Classifier clf = train_classifier(data.seqs, data.labels, cfg, dna, 15);
  CHECK(clf.config.output_classes() == 3);
  const EncodedSequence& s = data.seqs[0];
  const Eigen::VectorXd p = predictive(clf, s);
  CHECK(score_kplus1(clf, s) == doctest::Approx(p.head(2).maxCoeff()).epsilon(1e-12));
}

TEST_CASE("calibrated variant trains with an extra uniform-target term") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(30, 50, 16, dna);
  ClassifierConfig cfg = tiny_config(60);
  cfg.variant = ClassifierVariant::kCalibrated;
  cfg.perturbation = PerturbConfig{0.3, PerturbSemantics::kFullAlphabet};
  const Classifier clf = train_classifier(data.seqs, data.labels, cfg, dna, 17);
  CHECK(clf.config.output_classes() == 2);
  CHECK(classifier_accuracy(clf, data.seqs, data.labels) > 0.6);
}

TEST_CASE("mahalanobis pooled covariance matches a hand computation") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(20, 40, 18, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(40), dna, 19);
  const MahalanobisFit fit = fit_mahalanobis(clf, data.seqs, data.labels);

  // independent pooling over features produced by the (already tested) path
  const int dim = static_cast<int>(classifier_features(clf, data.seqs[0]).size());
  std::vector<Eigen::VectorXd> means(2, Eigen::VectorXd::Zero(dim));
  std::vector<int> counts(2, 0);
  for (std::size_t i = 0; i < data.seqs.size(); ++i) {
    means[data.labels[i]] += classifier_features(clf, data.seqs[i]);
    counts[data.labels[i]]++;
  }
  for (int c = 0; c < 2; ++c) means[c] /= counts[c];
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < data.seqs.size(); ++i) {
    const Eigen::VectorXd d = classifier_features(clf, data.seqs[i]) - means[data.labels[i]];
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(data.seqs.size());
  cov += (1e-6 * cov.trace() / dim) * Eigen::MatrixXd::Identity(dim, dim);

  CHECK((fit.covariance - cov).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fit.class_means[0] - means[0]).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fit.class_means[1] - means[1]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mahalanobis score is higher for in-class data than noise") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(50, 50, 20, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(), dna, 21);
  const MahalanobisFit fit = fit_mahalanobis(clf, data.seqs, data.labels);

  Rng rng(22);
  double in_total = 0.0, ood_total = 0.0;
  for (int i = 0; i < 20; ++i) in_total += score_mahalanobis(fit, clf, data.seqs[i]);
  for (int i = 0; i < 20; ++i) {
    std::string raw;
    for (int d = 0; d < 50; ++d) raw.push_back("GC"[rng.uniform_int(2)]);
    ood_total += score_mahalanobis(fit, clf, encode("noise", raw, dna));
  }
  CHECK(in_total / 20.0 > ood_total / 20.0);
}

TEST_CASE("classifier training is deterministic per seed") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(20, 40, 23, dna);
  const Classifier a = train_classifier(data.seqs, data.labels, tiny_config(25), dna, 31);
  const Classifier b = train_classifier(data.seqs, data.labels, tiny_config(25), dna, 31);
  CHECK((a.conv_w - b.conv_w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.dense_w - b.dense_w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.out_w - b.out_w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("classifier save and load round trips bit exactly") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(15, 40, 24, dna);
  const Classifier clf = train_classifier(data.seqs, data.labels, tiny_config(10), dna, 33);
  const std::string path = "test_clf_roundtrip.clf";
  save_classifier(clf, path);
  const Classifier back = load_classifier(path);
  CHECK((clf.conv_w - back.conv_w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((clf.conv_b - back.conv_b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((clf.dense_w - back.dense_w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((clf.out_w - back.out_w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.train_seed == clf.train_seed);
  for (const auto& s : data.seqs)
    CHECK(score_max_prob(back, s) == score_max_prob(clf, s));
  std::remove(path.c_str());
  CHECK_THROWS(load_classifier(path));
}

TEST_CASE("variants requiring perturbation reject a missing config") {
  const Alphabet dna = Alphabet::dna();
  const LabeledData data = two_class_corpus(10, 40, 25, dna);
  ClassifierConfig cfg = tiny_config(5);
  cfg.variant = ClassifierVariant::kBinary;
  cfg.perturbation.reset();
  CHECK_THROWS(train_classifier(data.seqs, data.labels, cfg, dna, 1));
}
