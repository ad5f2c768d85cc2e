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

#ifndef SEQLR_GENMODEL_HPP_
#define SEQLR_GENMODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqlr/seqdata.hpp"
#include "seqlr/tape.hpp"

namespace seqlr {

enum class ModelKind { kLstm, kNgram };

std::string model_kind_to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct TrainConfig {
  int steps = 5000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 0.0;  // applied to weight matrices, not biases
  // Present only for background models; applied freshly to every batch.
  std::optional<PerturbConfig> perturbation;
  int log_every = 200;
};

struct ARConfig {
  ModelKind kind = ModelKind::kLstm;
  int alphabet_size = 4;
  int hidden_units = 128;  // lstm
  int ngram_order = 4;     // longest context length
  // Jelinek-Mercer interpolation weights for orders 0..ngram_order; normalized
  // internally. Empty means uniform weights.
  std::vector<double> ngram_weights;
  TrainConfig training;
};

// Named parameter tensors plus the config that shaped them. For n-gram models
// the "parameters" are the per-order count tables.
struct Checkpoint {
  ARConfig config;
  std::vector<std::pair<std::string, numcore::Matrix>> params;
  std::int64_t train_steps = 0;
  std::uint64_t train_seed = 0;

  const numcore::Matrix& param(const std::string& name) const;
};

// Fits the model by mini-batch Adam (lstm) or closed-form counting (ngram).
// Background models (training.perturbation set) see freshly perturbed batches
// each step. Deterministic for a fixed seed. Optional validation data and a
// metrics sink receive JSON-lines {step, train_nll, val_nll, next_acc}.
Checkpoint train_ar(const std::vector<EncodedSequence>& data, const ARConfig& config,
                    const Alphabet& alphabet, std::uint64_t seed,
                    const std::vector<EncodedSequence>* val_data = nullptr,
                    std::ostream* metrics_log = nullptr);

// Entry d is log p(x_d | x_<d) in nats; the first entry conditions on the
// empty prefix (zero LSTM state / truncated n-gram context).
std::vector<double> per_position_log_prob(const Checkpoint& model,
                                          const EncodedSequence& seq);

// Sum of the per-position log probabilities.
double log_likelihood(const Checkpoint& model, const EncodedSequence& seq);

// Mean per-symbol negative log-likelihood over a dataset.
double mean_nll(const Checkpoint& model, const std::vector<EncodedSequence>& data);

// Fraction of positions where the model's argmax next-symbol prediction
// matches the observed symbol. Logged diagnostic only.
double next_symbol_accuracy(const Checkpoint& model,
                            const std::vector<EncodedSequence>& data);

// Self-describing container: magic, JSON header (config, shapes, seed,
// fingerprint), then little-endian IEEE-754 f64 blocks in declaration order.
void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace seqlr

#endif  // SEQLR_GENMODEL_HPP_
