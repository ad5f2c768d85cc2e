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

#include "seqlr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "seqlr/hash.hpp"
#include "seqlr/json_io.hpp"
#include "seqlr/rng.hpp"

namespace seqlr {

using numcore::Matrix;
using nlohmann::json;

int ClassifierConfig::output_classes() const {
  switch (variant) {
    case ClassifierVariant::kBinary: return 2;
    case ClassifierVariant::kKPlus1: return num_classes + 1;
    default: return num_classes;
  }
}

namespace {

// One-hot im2col: column p holds the stacked one-hot window starting at p.
Matrix im2col(const EncodedSequence& seq, int filter_width, int alpha) {
  const int positions = seq.length() - filter_width + 1;
  if (positions < 1)
    throw std::invalid_argument("sequence shorter than the filter width");
  Matrix out = Matrix::Zero(filter_width * alpha, positions);
  for (int p = 0; p < positions; ++p)
    for (int i = 0; i < filter_width; ++i)
      out(i * alpha + seq.symbols[p + i], p) = 1.0;
  return out;
}

struct ParamRefs {
  std::vector<Matrix*> values;
  static std::vector<bool> l2_mask() { return {true, false, true, false, true, false}; }
};

ParamRefs param_refs(Classifier& model) {
  return {{&model.conv_w, &model.conv_b, &model.dense_w, &model.dense_b, &model.out_w,
           &model.out_b}};
}

// Appends one example's forward pass to the tape, returning its scalar loss.
int example_loss(numcore::Tape& tape, const std::vector<int>& p,
                 const EncodedSequence& seq, const Matrix& target,
                 const ClassifierConfig& config) {
  const int cols = tape.leaf(im2col(seq, config.filter_width, config.alphabet_size));
  const int conv = tape.relu(tape.add_colvec(tape.matmul(p[0], cols), p[1]));
  const int pool = tape.col_max(conv);
  const int hidden = tape.relu(tape.add_colvec(tape.matmul(p[2], pool), p[3]));
  const int logits = tape.add_colvec(tape.matmul(p[4], hidden), p[5]);
  return tape.reduce_sum(tape.softmax_cross_entropy(logits, target));
}

Matrix onehot_target(int label, int classes) {
  Matrix t = Matrix::Zero(classes, 1);
  t(label, 0) = 1.0;
  return t;
}

}  // namespace

Classifier train_classifier(const std::vector<EncodedSequence>& data,
                            const std::vector<int>& labels, const ClassifierConfig& config,
                            const Alphabet& alphabet, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("train_classifier: empty data");
  if (data.size() != labels.size())
    throw std::invalid_argument("train_classifier: one label per sequence required");
  if (config.num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
  for (int l : labels)
    if (l < 0 || l >= config.num_classes)
      throw std::invalid_argument("label out of range [0, K)");
  const bool needs_perturb = config.variant != ClassifierVariant::kPlain;
  if (needs_perturb && !config.perturbation)
    throw std::invalid_argument("this classifier variant requires a perturbation config");

  const int k_out = config.output_classes();
  Classifier model;
  model.config = config;
  model.train_seed = seed;
  Rng init_rng = Rng::derive(seed, 11);
  model.conv_w =
      numcore::xavier_uniform(config.filters, config.filter_width * config.alphabet_size,
                              init_rng);
  model.conv_b = Matrix::Zero(config.filters, 1);
  model.dense_w = numcore::xavier_uniform(config.dense_width, config.filters, init_rng);
  model.dense_b = Matrix::Zero(config.dense_width, 1);
  model.out_w = numcore::xavier_uniform(k_out, config.dense_width, init_rng);
  model.out_b = Matrix::Zero(k_out, 1);

  numcore::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  adam_cfg.beta1 = config.beta1;
  adam_cfg.beta2 = config.beta2;
  adam_cfg.epsilon = config.epsilon;
  adam_cfg.l2 = config.l2;
  ParamRefs refs = param_refs(model);
  std::vector<Matrix> params;
  for (Matrix* m : refs.values) params.push_back(*m);
  numcore::AdamState adam(params, adam_cfg);

  Rng batch_rng = Rng::derive(seed, 12);
  Rng perturb_rng = Rng::derive(seed, 13);
  const int n = static_cast<int>(data.size());
  const int bsz = std::min(config.batch_size, n);

  for (int step = 1; step <= config.steps; ++step) {
    numcore::Tape tape;
    std::vector<int> pids;
    for (const Matrix& m : params) pids.push_back(tape.leaf(m, true));

    std::vector<int> losses;
    double loss_weight_total = 0.0;
    for (int i = 0; i < bsz; ++i) {
      const int idx = batch_rng.uniform_int(n);
      const EncodedSequence& seq = data[idx];
      const int label = labels[idx];
      switch (config.variant) {
        case ClassifierVariant::kPlain:
          losses.push_back(example_loss(tape, pids, seq, onehot_target(label, k_out), config));
          loss_weight_total += 1.0;
          break;
        case ClassifierVariant::kBinary: {
          losses.push_back(example_loss(tape, pids, seq, onehot_target(0, 2), config));
          const EncodedSequence noisy = perturb(seq, *config.perturbation, alphabet, perturb_rng);
          losses.push_back(example_loss(tape, pids, noisy, onehot_target(1, 2), config));
          loss_weight_total += 2.0;
          break;
        }
        case ClassifierVariant::kKPlus1: {
          if (perturb_rng.bernoulli(0.5)) {
            const EncodedSequence noisy =
                perturb(seq, *config.perturbation, alphabet, perturb_rng);
            losses.push_back(
                example_loss(tape, pids, noisy, onehot_target(config.num_classes, k_out), config));
          } else {
            losses.push_back(example_loss(tape, pids, seq, onehot_target(label, k_out), config));
          }
          loss_weight_total += 1.0;
          break;
        }
        case ClassifierVariant::kCalibrated: {
          losses.push_back(example_loss(tape, pids, seq, onehot_target(label, k_out), config));
          const EncodedSequence noisy = perturb(seq, *config.perturbation, alphabet, perturb_rng);
          const Matrix uniform = Matrix::Constant(k_out, 1, 1.0 / k_out);
          losses.push_back(
              tape.scale(example_loss(tape, pids, noisy, uniform, config),
                         config.calibration_weight));
          loss_weight_total += 1.0 + config.calibration_weight;
          break;
        }
      }
    }
    int total = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i) total = tape.add(total, losses[i]);
    const int loss = tape.scale(total, 1.0 / loss_weight_total);

    auto grads = tape.backward(loss);
    std::vector<Matrix> grad_list;
    for (int id : pids) grad_list.push_back(std::move(grads.at(id)));
    adam.step(params, grad_list, ParamRefs::l2_mask());
  }

  for (std::size_t i = 0; i < params.size(); ++i) *refs.values[i] = std::move(params[i]);
  model.train_steps = config.steps;
  return model;
}

Eigen::VectorXd classifier_features(const Classifier& model, const EncodedSequence& seq) {
  const Matrix cols = im2col(seq, model.config.filter_width, model.config.alphabet_size);
  const Matrix conv =
      ((model.conv_w * cols).colwise() + Eigen::VectorXd(model.conv_b.col(0))).cwiseMax(0.0);
  const Eigen::VectorXd pool = conv.rowwise().maxCoeff();
  return ((model.dense_w * pool + model.dense_b.col(0)).cwiseMax(0.0));
}

Eigen::VectorXd logits_from_features(const Classifier& model, const Eigen::VectorXd& features) {
  return model.out_w * features + model.out_b.col(0);
}

Eigen::VectorXd predictive(const Classifier& model, const EncodedSequence& seq) {
  return numcore::softmax_columns(logits_from_features(model, classifier_features(model, seq)));
}

double classifier_accuracy(const Classifier& model, const std::vector<EncodedSequence>& data,
                           const std::vector<int>& labels) {
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Eigen::Index best;
    predictive(model, data[i]).maxCoeff(&best);
    hits += (static_cast<int>(best) == labels[i]);
  }
  return data.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(data.size());
}

double score_max_prob(const Classifier& model, const EncodedSequence& seq) {
  return predictive(model, seq).maxCoeff();
}

double score_neg_entropy(const Classifier& model, const EncodedSequence& seq) {
  const Eigen::VectorXd p = predictive(model, seq);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) acc += p(i) * std::log(p(i));
  return acc;
}

double score_odin(const Classifier& model, const EncodedSequence& seq, double temperature,
                  double epsilon) {
  if (temperature < 1.0) throw std::invalid_argument("ODIN temperature must be >= 1");
  if (epsilon < 0.0) throw std::invalid_argument("ODIN epsilon must be >= 0");
  Eigen::VectorXd features = classifier_features(model, seq);

  // gradient of log max-softmax(logits/T) w.r.t. the penultimate activations
  numcore::Tape tape;
  const int f = tape.leaf(features, true);
  const int w = tape.leaf(model.out_w);
  const int b = tape.leaf(model.out_b);
  const int logits = tape.scale(tape.add_colvec(tape.matmul(w, f), b), 1.0 / temperature);
  Eigen::Index top;
  tape.value(logits).col(0).maxCoeff(&top);
  const int ce = tape.reduce_sum(tape.softmax_cross_entropy(logits, {static_cast<int>(top)}));
  const Matrix grad_ce = tape.backward(ce).at(f);  // = -grad of log p_top

  for (Eigen::Index i = 0; i < features.size(); ++i) {
    const double s = grad_ce(i, 0) > 0.0 ? 1.0 : (grad_ce(i, 0) < 0.0 ? -1.0 : 0.0);
    features(i) -= epsilon * s;
  }
  const Eigen::VectorXd scaled = logits_from_features(model, features) / temperature;
  return numcore::softmax_columns(scaled).maxCoeff();
}

double ensemble_score(const std::vector<Classifier>& models, const EncodedSequence& seq) {
  if (models.empty()) throw std::invalid_argument("ensemble_score: no models");
  Eigen::VectorXd avg = predictive(models[0], seq);
  for (std::size_t i = 1; i < models.size(); ++i) avg += predictive(models[i], seq);
  avg /= static_cast<double>(models.size());
  return avg.maxCoeff();
}

double score_binary_logodds(const Classifier& model, const EncodedSequence& seq) {
  if (model.config.output_classes() != 2)
    throw std::invalid_argument("binary log-odds requires a 2-class classifier");
  const Eigen::VectorXd logits = logits_from_features(model, classifier_features(model, seq));
  // log p(in) - log p(perturbed) equals the logit difference exactly
  return logits(0) - logits(1);
}

double score_kplus1(const Classifier& model, const EncodedSequence& seq) {
  if (model.config.variant != ClassifierVariant::kKPlus1)
    throw std::invalid_argument("score_kplus1 requires the K+1 variant");
  const Eigen::VectorXd p = predictive(model, seq);
  return p.head(model.config.num_classes).maxCoeff();
}

MahalanobisFit fit_mahalanobis(const Classifier& model, const std::vector<EncodedSequence>& data,
                               const std::vector<int>& labels, double epsilon) {
  if (data.size() != labels.size())
    throw std::invalid_argument("fit_mahalanobis: one label per sequence required");
  const int k = model.config.num_classes;
  std::vector<int> counts(k, 0);
  for (int l : labels) {
    if (l < 0 || l >= k) throw std::invalid_argument("label out of range");
    ++counts[l];
  }
  for (int c : counts)
    if (c < 2) throw std::invalid_argument("every class needs >= 2 examples");

  std::vector<Eigen::VectorXd> features;
  features.reserve(data.size());
  for (const auto& seq : data) features.push_back(classifier_features(model, seq));
  const Eigen::Index dim = features[0].size();

  MahalanobisFit fit;
  fit.class_means.assign(k, Eigen::VectorXd::Zero(dim));
  for (std::size_t i = 0; i < data.size(); ++i) fit.class_means[labels[i]] += features[i];
  for (int c = 0; c < k; ++c) fit.class_means[c] /= static_cast<double>(counts[c]);

  fit.covariance = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd d = features[i] - fit.class_means[labels[i]];
    fit.covariance += d * d.transpose();
  }
  fit.covariance /= static_cast<double>(data.size());

  double eps = epsilon;
  if (eps < 0.0) {
    const double tr = fit.covariance.trace();
    eps = tr > 0.0 ? 1e-6 * tr / static_cast<double>(dim) : 1e-6;
  }
  fit.covariance += eps * Matrix::Identity(dim, dim);
  fit.solver.compute(fit.covariance);
  if (fit.solver.info() != Eigen::Success || !fit.solver.isPositive())
    throw std::runtime_error("covariance singular after regularization");
  return fit;
}

double score_mahalanobis(const MahalanobisFit& fit, const Classifier& model,
                         const EncodedSequence& seq) {
  const Eigen::VectorXd f = classifier_features(model, seq);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& mean : fit.class_means) {
    const Eigen::VectorXd d = f - mean;
    best = std::min(best, d.dot(fit.solver.solve(d)));
  }
  return -best;
}

namespace {
constexpr char kClassifierMagic[] = "SEQLRCLF1\n";
constexpr int kClassifierVersion = 1;

const std::vector<std::pair<std::string, Matrix Classifier::*>>& classifier_fields() {
  static const std::vector<std::pair<std::string, Matrix Classifier::*>> fields = {
      {"conv_w", &Classifier::conv_w},   {"conv_b", &Classifier::conv_b},
      {"dense_w", &Classifier::dense_w}, {"dense_b", &Classifier::dense_b},
      {"out_w", &Classifier::out_w},     {"out_b", &Classifier::out_b},
  };
  return fields;
}
}  // namespace

void save_classifier(const Classifier& model, const std::string& path) {
  std::string payload;
  json shapes = json::array();
  for (const auto& [name, field] : classifier_fields()) {
    const Matrix& m = model.*field;
    shapes.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        payload.append(reinterpret_cast<const char*>(&v), sizeof(double));
      }
  }
  json header = {
      {"version", kClassifierVersion},
      {"config", classifier_config_to_json(model.config)},
      {"params", shapes},
      {"train_steps", model.train_steps},
      {"train_seed", model.train_seed},
      {"fingerprint", fnv1a64(payload.data(), payload.size())},
  };
  const std::string header_str = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open classifier file for writing: " + path);
  out.write(kClassifierMagic, sizeof(kClassifierMagic) - 1);
  const std::uint64_t header_len = header_str.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("failed writing classifier: " + path);
}

Classifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open classifier file: " + path);
  char magic[sizeof(kClassifierMagic) - 1];
  if (!in.read(magic, sizeof(magic)) ||
      std::string(magic, sizeof(magic)) != std::string(kClassifierMagic))
    throw std::runtime_error("corrupt classifier (bad magic): " + path);
  std::uint64_t header_len = 0;
  if (!in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len)))
    throw std::runtime_error("corrupt classifier (truncated): " + path);
  std::string header_str(header_len, '\0');
  if (!in.read(header_str.data(), static_cast<std::streamsize>(header_len)))
    throw std::runtime_error("corrupt classifier (truncated header): " + path);
  json header;
  try {
    header = json::parse(header_str);
  } catch (const json::exception&) {
    throw std::runtime_error("corrupt classifier (bad header JSON): " + path);
  }
  if (header.value("version", -1) != kClassifierVersion)
    throw std::runtime_error("classifier version mismatch: " + path);

  Classifier model;
  model.config = classifier_config_from_json(header.at("config"));
  model.train_steps = header.value("train_steps", 0);
  model.train_seed = header.value("train_seed", std::uint64_t{0});

  std::string payload;
  std::size_t field_index = 0;
  for (const auto& shape : header.at("params")) {
    const Eigen::Index rows = shape.at("rows");
    const Eigen::Index cols = shape.at("cols");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
          throw std::runtime_error("corrupt classifier (truncated parameters): " + path);
        m(r, c) = v;
        payload.append(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    if (field_index >= classifier_fields().size() ||
        shape.at("name") != classifier_fields()[field_index].first)
      throw std::runtime_error("corrupt classifier (unexpected parameter order): " + path);
    model.*classifier_fields()[field_index].second = std::move(m);
    ++field_index;
  }
  const std::uint64_t expected = header.at("fingerprint");
  if (fnv1a64(payload.data(), payload.size()) != expected)
    throw std::runtime_error("classifier fingerprint mismatch: " + path);
  return model;
}

}  // namespace seqlr
