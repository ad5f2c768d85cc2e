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

#include "seqlr/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "seqlr/hash.hpp"
#include "seqlr/json_io.hpp"
#include "seqlr/rng.hpp"

namespace seqlr {

using numcore::Matrix;
using nlohmann::json;

std::string model_kind_to_string(ModelKind kind) {
  return kind == ModelKind::kLstm ? "lstm" : "ngram";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "lstm") return ModelKind::kLstm;
  if (name == "ngram") return ModelKind::kNgram;
  throw std::invalid_argument("unknown model kind: " + name);
}

const Matrix& Checkpoint::param(const std::string& name) const {
  for (const auto& [n, m] : params)
    if (n == name) return m;
  throw std::out_of_range("checkpoint has no parameter: " + name);
}

namespace {

void check_alphabet(const Checkpoint& model, const EncodedSequence& seq) {
  for (auto s : seq.symbols)
    if (s >= model.config.alphabet_size)
      throw std::invalid_argument("sequence symbol outside model alphabet");
}

std::vector<double> normalized_ngram_weights(const ARConfig& config) {
  std::vector<double> w = config.ngram_weights;
  if (w.empty()) w.assign(config.ngram_order + 1, 1.0);
  if (static_cast<int>(w.size()) != config.ngram_order + 1)
    throw std::invalid_argument("ngram_weights must have order+1 entries");
  double total = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("ngram weights must be nonnegative");
    total += v;
  }
  if (total <= 0.0) throw std::invalid_argument("ngram weights must not all be zero");
  for (double& v : w) v /= total;
  return w;
}

std::size_t context_index(const EncodedSequence& seq, int pos, int order, int alpha) {
  std::size_t idx = 0;
  for (int i = pos - order; i < pos; ++i) idx = idx * alpha + seq.symbols[i];
  return idx;
}

Checkpoint train_ngram(const std::vector<EncodedSequence>& data, const ARConfig& config,
                       const Alphabet& alphabet, std::uint64_t seed) {
  const int alpha = config.alphabet_size;
  Checkpoint cp;
  cp.config = config;
  cp.config.ngram_weights = normalized_ngram_weights(config);
  cp.train_seed = seed;
  cp.train_steps = 1;  // single closed-form counting pass

  for (int order = 0; order <= config.ngram_order; ++order) {
    const auto rows = static_cast<Eigen::Index>(std::pow(alpha, order));
    cp.params.emplace_back("counts_" + std::to_string(order), Matrix::Zero(rows, alpha));
  }

  Rng rng = Rng::derive(seed, 0);
  for (const auto& raw : data) {
    // counting is a single pass, so "fresh" background perturbation reduces
    // to one perturbed copy per sequence
    const EncodedSequence seq = config.training.perturbation
                                    ? perturb(raw, *config.training.perturbation, alphabet, rng)
                                    : raw;
    for (int d = 0; d < seq.length(); ++d) {
      const int max_order = std::min(d, config.ngram_order);
      for (int order = 0; order <= max_order; ++order) {
        Matrix& counts = cp.params[order].second;
        counts(static_cast<Eigen::Index>(context_index(seq, d, order, alpha)),
               seq.symbols[d]) += 1.0;
      }
    }
  }
  return cp;
}

// Interpolated next-symbol distribution at position d. Orders longer than the
// available prefix (or with unseen contexts) fall back to uniform.
Eigen::VectorXd ngram_distribution(const Checkpoint& model, const EncodedSequence& seq,
                                   int d) {
  const int alpha = model.config.alphabet_size;
  const auto& w = model.config.ngram_weights;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(alpha);
  for (int order = 0; order <= model.config.ngram_order; ++order) {
    if (order > d) {
      p.array() += w[order] / alpha;
      continue;
    }
    const Matrix& counts = model.params[order].second;
    const auto ctx = static_cast<Eigen::Index>(context_index(seq, d, order, alpha));
    const double total = counts.row(ctx).sum();
    if (total <= 0.0) {
      p.array() += w[order] / alpha;
    } else {
      p += (w[order] / total) * counts.row(ctx).transpose();
    }
  }
  return p;
}

struct LstmDims {
  int alpha;
  int hidden;
};

// Gate order in the stacked weight matrix: input, forget, cell, output.
struct LstmStep {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

LstmStep lstm_cell(const Matrix& w, const Matrix& b, const Eigen::VectorXd& x,
                   const LstmStep& prev, const LstmDims& dims) {
  Eigen::VectorXd z(dims.alpha + dims.hidden);
  z << x, prev.h;
  Eigen::VectorXd pre = w * z + b.col(0);
  const int h = dims.hidden;
  Eigen::VectorXd gi = (1.0 / (1.0 + (-pre.segment(0, h).array()).exp()));
  Eigen::VectorXd gf = (1.0 / (1.0 + (-pre.segment(h, h).array()).exp()));
  Eigen::VectorXd gg = pre.segment(2 * h, h).array().tanh();
  Eigen::VectorXd go = (1.0 / (1.0 + (-pre.segment(3 * h, h).array()).exp()));
  LstmStep next;
  next.c = gf.cwiseProduct(prev.c) + gi.cwiseProduct(gg);
  next.h = go.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

std::vector<double> lstm_per_position(const Checkpoint& model, const EncodedSequence& seq) {
  const LstmDims dims{model.config.alphabet_size, model.config.hidden_units};
  const Matrix& w = model.param("lstm_w");
  const Matrix& b = model.param("lstm_b");
  const Matrix& wy = model.param("out_w");
  const Matrix& by = model.param("out_b");

  std::vector<double> out(seq.symbols.size());
  LstmStep state{Eigen::VectorXd::Zero(dims.hidden), Eigen::VectorXd::Zero(dims.hidden)};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dims.alpha);  // beginning-of-sequence input
  for (std::size_t d = 0; d < seq.symbols.size(); ++d) {
    state = lstm_cell(w, b, x, state, dims);
    Eigen::VectorXd logits = wy * state.h + by.col(0);
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    out[d] = logits(seq.symbols[d]) - lse;
    x.setZero();
    x(seq.symbols[d]) = 1.0;
  }
  return out;
}

struct LstmParams {
  std::vector<Matrix> values;  // lstm_w, lstm_b, out_w, out_b
  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {"lstm_w", "lstm_b", "out_w", "out_b"};
    return n;
  }
  static std::vector<bool> l2_mask() { return {true, false, true, false}; }
};

LstmParams init_lstm(const ARConfig& config, Rng& rng) {
  const int a = config.alphabet_size;
  const int h = config.hidden_units;
  LstmParams p;
  p.values.push_back(numcore::xavier_uniform(4 * h, a + h, rng));
  p.values.push_back(Matrix::Zero(4 * h, 1));
  p.values.push_back(numcore::xavier_uniform(a, h, rng));
  p.values.push_back(Matrix::Zero(a, 1));
  return p;
}

// Builds the training graph for one batch (sequences as columns) and returns
// the mean per-symbol cross-entropy node.
int lstm_batch_loss(numcore::Tape& tape, const std::vector<int>& param_ids,
                    const std::vector<const EncodedSequence*>& batch, const ARConfig& config) {
  const int a = config.alphabet_size;
  const int h = config.hidden_units;
  const int bsz = static_cast<int>(batch.size());
  const int length = batch[0]->length();
  for (const auto* seq : batch)
    if (seq->length() != length)
      throw std::invalid_argument("lstm training requires equal-length sequences per batch");

  const int w = param_ids[0], b = param_ids[1], wy = param_ids[2], by = param_ids[3];
  int hn = tape.leaf(Matrix::Zero(h, bsz));
  int cn = tape.leaf(Matrix::Zero(h, bsz));
  int xn = tape.leaf(Matrix::Zero(a, bsz));

  std::vector<int> losses;
  losses.reserve(length);
  for (int d = 0; d < length; ++d) {
    const int z = tape.concat_rows({xn, hn});
    const int pre = tape.add_colvec(tape.matmul(w, z), b);
    const int gi = tape.sigmoid(tape.slice_rows(pre, 0, h));
    const int gf = tape.sigmoid(tape.slice_rows(pre, h, h));
    const int gg = tape.tanh(tape.slice_rows(pre, 2 * h, h));
    const int go = tape.sigmoid(tape.slice_rows(pre, 3 * h, h));
    cn = tape.add(tape.mul(gf, cn), tape.mul(gi, gg));
    hn = tape.mul(go, tape.tanh(cn));
    const int logits = tape.add_colvec(tape.matmul(wy, hn), by);
    std::vector<int> labels(bsz);
    Matrix next_x = Matrix::Zero(a, bsz);
    for (int i = 0; i < bsz; ++i) {
      labels[i] = batch[i]->symbols[d];
      next_x(labels[i], i) = 1.0;
    }
    losses.push_back(tape.reduce_sum(tape.softmax_cross_entropy(logits, labels)));
    xn = tape.leaf(std::move(next_x));
  }
  int total = losses[0];
  for (std::size_t i = 1; i < losses.size(); ++i) total = tape.add(total, losses[i]);
  return tape.scale(total, 1.0 / (static_cast<double>(length) * bsz));
}

Checkpoint train_lstm(const std::vector<EncodedSequence>& data, const ARConfig& config,
                      const Alphabet& alphabet, std::uint64_t seed,
                      const std::vector<EncodedSequence>* val_data,
                      std::ostream* metrics_log) {
  Rng init_rng = Rng::derive(seed, 1);
  LstmParams params = init_lstm(config, init_rng);
  numcore::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.training.learning_rate;
  adam_cfg.beta1 = config.training.beta1;
  adam_cfg.beta2 = config.training.beta2;
  adam_cfg.epsilon = config.training.epsilon;
  adam_cfg.l2 = config.training.l2;
  numcore::AdamState adam(params.values, adam_cfg);

  Rng batch_rng = Rng::derive(seed, 2);
  Rng perturb_rng = Rng::derive(seed, 3);
  const int n = static_cast<int>(data.size());
  const int bsz = std::min(config.training.batch_size, n);

  Checkpoint snapshot;
  snapshot.config = config;
  snapshot.train_seed = seed;

  for (int step = 1; step <= config.training.steps; ++step) {
    std::vector<EncodedSequence> perturbed;
    std::vector<const EncodedSequence*> batch;
    batch.reserve(bsz);
    perturbed.reserve(config.training.perturbation ? bsz : 0);
    for (int i = 0; i < bsz; ++i) {
      const EncodedSequence& picked = data[batch_rng.uniform_int(n)];
      if (config.training.perturbation) {
        perturbed.push_back(perturb(picked, *config.training.perturbation, alphabet, perturb_rng));
        batch.push_back(&perturbed.back());
      } else {
        batch.push_back(&picked);
      }
    }

    numcore::Tape tape;
    std::vector<int> param_ids;
    for (const Matrix& p : params.values) param_ids.push_back(tape.leaf(p, true));
    const int loss = lstm_batch_loss(tape, param_ids, batch, config);
    auto grads = tape.backward(loss);
    std::vector<Matrix> grad_list;
    for (int id : param_ids) grad_list.push_back(std::move(grads.at(id)));
    adam.step(params.values, grad_list, LstmParams::l2_mask());

    if (metrics_log &&
        (step % config.training.log_every == 0 || step == config.training.steps)) {
      snapshot.params.clear();
      for (std::size_t i = 0; i < params.values.size(); ++i)
        snapshot.params.emplace_back(LstmParams::names()[i], params.values[i]);
      json rec = {{"step", step}, {"train_nll", tape.value(loss)(0, 0)}};
      if (val_data && !val_data->empty()) {
        rec["val_nll"] = mean_nll(snapshot, *val_data);
        rec["next_acc"] = next_symbol_accuracy(snapshot, *val_data);
      }
      (*metrics_log) << rec.dump() << "\n";
    }
  }

  snapshot.params.clear();
  for (std::size_t i = 0; i < params.values.size(); ++i)
    snapshot.params.emplace_back(LstmParams::names()[i], std::move(params.values[i]));
  snapshot.train_steps = config.training.steps;
  return snapshot;
}

}  // namespace

Checkpoint train_ar(const std::vector<EncodedSequence>& data, const ARConfig& config,
                    const Alphabet& alphabet, std::uint64_t seed,
                    const std::vector<EncodedSequence>* val_data, std::ostream* metrics_log) {
  if (data.empty()) throw std::invalid_argument("train_ar: empty training data");
  if (alphabet.size() != config.alphabet_size)
    throw std::invalid_argument("train_ar: alphabet size mismatch");
  for (const auto& seq : data)
    for (auto s : seq.symbols)
      if (s >= config.alphabet_size)
        throw std::invalid_argument("train_ar: sequence symbol outside alphabet");
  if (config.training.perturbation) {
    const double mu = config.training.perturbation->mutation_rate;
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("mutation rate must be in [0,1]");
  }

  if (config.kind == ModelKind::kNgram) return train_ngram(data, config, alphabet, seed);
  return train_lstm(data, config, alphabet, seed, val_data, metrics_log);
}

std::vector<double> per_position_log_prob(const Checkpoint& model,
                                          const EncodedSequence& seq) {
  check_alphabet(model, seq);
  if (model.config.kind == ModelKind::kLstm) return lstm_per_position(model, seq);
  std::vector<double> out(seq.symbols.size());
  for (int d = 0; d < seq.length(); ++d) {
    const Eigen::VectorXd p = ngram_distribution(model, seq, d);
    out[d] = std::log(p(seq.symbols[d]));
  }
  return out;
}

double log_likelihood(const Checkpoint& model, const EncodedSequence& seq) {
  double total = 0.0;
  for (double v : per_position_log_prob(model, seq)) total += v;
  return total;
}

double mean_nll(const Checkpoint& model, const std::vector<EncodedSequence>& data) {
  double total = 0.0;
  std::int64_t count = 0;
  for (const auto& seq : data) {
    total += log_likelihood(model, seq);
    count += seq.length();
  }
  if (count == 0) throw std::invalid_argument("mean_nll: no symbols");
  return -total / static_cast<double>(count);
}

double next_symbol_accuracy(const Checkpoint& model,
                            const std::vector<EncodedSequence>& data) {
  std::int64_t hits = 0, count = 0;
  for (const auto& seq : data) {
    check_alphabet(model, seq);
    if (model.config.kind == ModelKind::kNgram) {
      for (int d = 0; d < seq.length(); ++d) {
        Eigen::Index best;
        ngram_distribution(model, seq, d).maxCoeff(&best);
        hits += (best == seq.symbols[d]);
        ++count;
      }
    } else {
      // argmax of the per-position distribution; recompute via log-probs of
      // each candidate would be wasteful, so run the cell directly
      const LstmDims dims{model.config.alphabet_size, model.config.hidden_units};
      const Matrix& w = model.param("lstm_w");
      const Matrix& b = model.param("lstm_b");
      const Matrix& wy = model.param("out_w");
      const Matrix& by = model.param("out_b");
      LstmStep state{Eigen::VectorXd::Zero(dims.hidden), Eigen::VectorXd::Zero(dims.hidden)};
      Eigen::VectorXd x = Eigen::VectorXd::Zero(dims.alpha);
      for (auto s : seq.symbols) {
        state = lstm_cell(w, b, x, state, dims);
        Eigen::VectorXd logits = wy * state.h + by.col(0);
        Eigen::Index best;
        logits.maxCoeff(&best);
        hits += (best == s);
        ++count;
        x.setZero();
        x(s) = 1.0;
      }
    }
  }
  return count ? static_cast<double>(hits) / count : 0.0;
}

namespace {
constexpr char kCheckpointMagic[] = "SEQLRCKPT1\n";
constexpr int kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  std::string payload;
  json shapes = json::array();
  for (const auto& [name, m] : cp.params) {
    shapes.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
    // row-major block so the on-disk layout is independent of Eigen defaults
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        payload.append(reinterpret_cast<const char*>(&v), sizeof(double));
      }
  }
  json header = {
      {"version", kCheckpointVersion},
      {"config", ar_config_to_json(cp.config)},
      {"params", shapes},
      {"train_steps", cp.train_steps},
      {"train_seed", cp.train_seed},
      {"fingerprint", fnv1a64(payload.data(), payload.size())},
  };
  const std::string header_str = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  const std::uint64_t header_len = header_str.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
  char magic[sizeof(kCheckpointMagic) - 1];
  if (!in.read(magic, sizeof(magic)) ||
      std::string(magic, sizeof(magic)) != std::string(kCheckpointMagic))
    throw std::runtime_error("corrupt checkpoint (bad magic): " + path);
  std::uint64_t header_len = 0;
  if (!in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len)))
    throw std::runtime_error("corrupt checkpoint (truncated header length): " + path);
  std::string header_str(header_len, '\0');
  if (!in.read(header_str.data(), static_cast<std::streamsize>(header_len)))
    throw std::runtime_error("corrupt checkpoint (truncated header): " + path);
  json header;
  try {
    header = json::parse(header_str);
  } catch (const json::exception&) {
    throw std::runtime_error("corrupt checkpoint (bad header JSON): " + path);
  }
  if (header.value("version", -1) != kCheckpointVersion)
    throw std::runtime_error("checkpoint version mismatch: " + path);

  Checkpoint cp;
  cp.config = ar_config_from_json(header.at("config"));
  cp.train_steps = header.value("train_steps", 0);
  cp.train_seed = header.value("train_seed", std::uint64_t{0});

  std::string payload;
  for (const auto& shape : header.at("params")) {
    const Eigen::Index rows = shape.at("rows");
    const Eigen::Index cols = shape.at("cols");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v;
        if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
          throw std::runtime_error("corrupt checkpoint (truncated parameters): " + path);
        m(r, c) = v;
        payload.append(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    cp.params.emplace_back(shape.at("name").get<std::string>(), std::move(m));
  }
  const std::uint64_t expected = header.at("fingerprint");
  if (fnv1a64(payload.data(), payload.size()) != expected)
    throw std::runtime_error("checkpoint fingerprint mismatch: " + path);
  return cp;
}

}  // namespace seqlr
