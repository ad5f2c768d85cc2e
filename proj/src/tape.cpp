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

#include "seqlr/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "seqlr/rng.hpp"

namespace seqlr::numcore {

Matrix softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    Eigen::VectorXd col = logits.col(c);
    const double m = col.maxCoeff();
    Eigen::VectorXd e = (col.array() - m).exp();
    out.col(c) = e / e.sum();
  }
  return out;
}

int Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(Matrix value, bool trainable) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.trainable = trainable;
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Node n;
  n.op = Op::kMatMul;
  n.inputs = {a, b};
  n.value = A * B;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("add: shape mismatch");
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a, b};
  n.value = A + B;
  return push(std::move(n));
}

int Tape::add_colvec(int a, int bias) {
  const Matrix& A = value(a);
  const Matrix& B = value(bias);
  if (B.cols() != 1 || B.rows() != A.rows())
    throw std::invalid_argument("add_colvec: bias must be a column vector matching rows");
  Node n;
  n.op = Op::kAddColVec;
  n.inputs = {a, bias};
  n.value = A.colwise() + Eigen::VectorXd(B.col(0));
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("sub: shape mismatch");
  Node n;
  n.op = Op::kSub;
  n.inputs = {a, b};
  n.value = A - B;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("mul: shape mismatch");
  Node n;
  n.op = Op::kMul;
  n.inputs = {a, b};
  n.value = A.cwiseProduct(B);
  return push(std::move(n));
}

int Tape::scale(int a, double s) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a};
  n.scale = s;
  n.value = value(a) * s;
  return push(std::move(n));
}

int Tape::sigmoid(int a) {
  Node n;
  n.op = Op::kSigmoid;
  n.inputs = {a};
  n.value = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  return push(std::move(n));
}

int Tape::tanh(int a) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {a};
  n.value = value(a).array().tanh().matrix();
  return push(std::move(n));
}

int Tape::exp(int a) {
  Node n;
  n.op = Op::kExp;
  n.inputs = {a};
  n.value = value(a).array().exp().matrix();
  return push(std::move(n));
}

int Tape::log(int a) {
  Node n;
  n.op = Op::kLog;
  n.inputs = {a};
  n.value = value(a).array().log().matrix();
  return push(std::move(n));
}

int Tape::relu(int a) {
  Node n;
  n.op = Op::kRelu;
  n.inputs = {a};
  n.value = value(a).cwiseMax(0.0);
  return push(std::move(n));
}

int Tape::concat_rows(const std::vector<int>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts[0]).cols();
  for (int p : parts) {
    if (value(p).cols() != cols) throw std::invalid_argument("concat_rows: column mismatch");
    rows += value(p).rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.inputs = parts;
  n.value.resize(rows, cols);
  Eigen::Index r = 0;
  for (int p : parts) {
    n.value.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  return push(std::move(n));
}

int Tape::slice_rows(int a, int begin, int rows) {
  const Matrix& A = value(a);
  if (begin < 0 || rows < 1 || begin + rows > A.rows())
    throw std::invalid_argument("slice_rows: range out of bounds");
  Node n;
  n.op = Op::kSliceRows;
  n.inputs = {a};
  n.slice_begin = begin;
  n.slice_rows = rows;
  n.value = A.middleRows(begin, rows);
  return push(std::move(n));
}

int Tape::reduce_sum(int a) {
  Node n;
  n.op = Op::kReduceSum;
  n.inputs = {a};
  n.value = Matrix::Constant(1, 1, value(a).sum());
  return push(std::move(n));
}

int Tape::col_max(int a) {
  Node n;
  n.op = Op::kColMax;
  n.inputs = {a};
  n.value = value(a).rowwise().maxCoeff();
  return push(std::move(n));
}

int Tape::softmax_cross_entropy(int logits, Matrix targets) {
  const Matrix& L = value(logits);
  if (targets.rows() != L.rows() || targets.cols() != L.cols())
    throw std::invalid_argument("softmax_cross_entropy: target shape mismatch");
  Node n;
  n.op = Op::kSoftmaxCrossEntropy;
  n.inputs = {logits};
  n.targets = std::move(targets);
  n.value.resize(1, L.cols());
  for (Eigen::Index c = 0; c < L.cols(); ++c) {
    Eigen::VectorXd col = L.col(c);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col.array() - m).exp().sum());
    // -sum_k t_k * (logit_k - logsumexp)
    n.value(0, c) = -(n.targets.col(c).array() * (col.array() - lse)).sum();
  }
  return push(std::move(n));
}

int Tape::softmax_cross_entropy(int logits, const std::vector<int>& labels) {
  const Matrix& L = value(logits);
  if (static_cast<Eigen::Index>(labels.size()) != L.cols())
    throw std::invalid_argument("softmax_cross_entropy: one label per column required");
  Matrix targets = Matrix::Zero(L.rows(), L.cols());
  for (Eigen::Index c = 0; c < L.cols(); ++c) {
    if (labels[c] < 0 || labels[c] >= L.rows())
      throw std::invalid_argument("softmax_cross_entropy: label out of range");
    targets(labels[c], c) = 1.0;
  }
  return softmax_cross_entropy(logits, std::move(targets));
}

std::unordered_map<int, Matrix> Tape::backward(int loss_node) const {
  if (loss_node < 0 || loss_node >= size())
    throw std::invalid_argument("backward: dangling node reference");
  const Matrix& loss = value(loss_node);
  if (loss.rows() != 1 || loss.cols() != 1)
    throw std::invalid_argument("backward: loss node must be scalar");

  std::vector<Matrix> grads(nodes_.size());
  std::vector<bool> live(nodes_.size(), false);
  grads[loss_node] = Matrix::Ones(1, 1);
  live[loss_node] = true;

  auto accumulate = [&](int id, const Matrix& g) {
    if (!live[id]) {
      grads[id] = g;
      live[id] = true;
    } else {
      grads[id] += g;
    }
  };

  for (int id = loss_node; id >= 0; --id) {
    if (!live[id]) continue;
    const Node& n = nodes_[id];
    const Matrix& g = grads[id];
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kMatMul:
        accumulate(n.inputs[0], g * value(n.inputs[1]).transpose());
        accumulate(n.inputs[1], value(n.inputs[0]).transpose() * g);
        break;
      case Op::kAdd:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], g);
        break;
      case Op::kAddColVec:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], g.rowwise().sum());
        break;
      case Op::kSub:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], -g);
        break;
      case Op::kMul:
        accumulate(n.inputs[0], g.cwiseProduct(value(n.inputs[1])));
        accumulate(n.inputs[1], g.cwiseProduct(value(n.inputs[0])));
        break;
      case Op::kScale:
        accumulate(n.inputs[0], g * n.scale);
        break;
      case Op::kSigmoid: {
        const Matrix& s = n.value;
        accumulate(n.inputs[0], g.cwiseProduct(s.cwiseProduct(Matrix::Ones(s.rows(), s.cols()) - s)));
        break;
      }
      case Op::kTanh: {
        const Matrix& t = n.value;
        accumulate(n.inputs[0],
                   g.cwiseProduct((Matrix::Ones(t.rows(), t.cols()) - t.cwiseProduct(t))));
        break;
      }
      case Op::kExp:
        accumulate(n.inputs[0], g.cwiseProduct(n.value));
        break;
      case Op::kLog:
        accumulate(n.inputs[0], g.cwiseQuotient(value(n.inputs[0])));
        break;
      case Op::kRelu: {
        const Matrix& x = value(n.inputs[0]);
        accumulate(n.inputs[0],
                   g.cwiseProduct((x.array() > 0.0).cast<double>().matrix()));
        break;
      }
      case Op::kConcatRows: {
        Eigen::Index r = 0;
        for (int p : n.inputs) {
          accumulate(p, g.middleRows(r, value(p).rows()));
          r += value(p).rows();
        }
        break;
      }
      case Op::kSliceRows: {
        Matrix gin = Matrix::Zero(value(n.inputs[0]).rows(), value(n.inputs[0]).cols());
        gin.middleRows(n.slice_begin, n.slice_rows) = g;
        accumulate(n.inputs[0], std::move(gin));
        break;
      }
      case Op::kReduceSum: {
        const Matrix& in = value(n.inputs[0]);
        accumulate(n.inputs[0], Matrix::Constant(in.rows(), in.cols(), g(0, 0)));
        break;
      }
      case Op::kColMax: {
        const Matrix& in = value(n.inputs[0]);
        Matrix gin = Matrix::Zero(in.rows(), in.cols());
        for (Eigen::Index r = 0; r < in.rows(); ++r) {
          Eigen::Index argmax = 0;
          in.row(r).maxCoeff(&argmax);  // first maximum, so ties break deterministically
          gin(r, argmax) = g(r, 0);
        }
        accumulate(n.inputs[0], std::move(gin));
        break;
      }
      case Op::kSoftmaxCrossEntropy: {
        const Matrix& L = value(n.inputs[0]);
        Matrix p = softmax_columns(L);
        Matrix gin(L.rows(), L.cols());
        for (Eigen::Index c = 0; c < L.cols(); ++c)
          gin.col(c) = g(0, c) * (p.col(c) - n.targets.col(c));
        accumulate(n.inputs[0], std::move(gin));
        break;
      }
    }
  }

  std::unordered_map<int, Matrix> result;
  for (int id = 0; id <= loss_node; ++id) {
    if (nodes_[id].trainable) {
      if (live[id]) {
        result.emplace(id, grads[id]);
      } else {
        result.emplace(id, Matrix::Zero(value(id).rows(), value(id).cols()));
      }
    }
  }
  return result;
}

AdamState::AdamState(const std::vector<Matrix>& params, AdamConfig config)
    : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Matrix& p : params) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void AdamState::step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
                     const std::vector<bool>& apply_l2) {
  if (params.size() != m_.size() || grads.size() != m_.size() ||
      apply_l2.size() != m_.size())
    throw std::invalid_argument("adam_step: parameter count mismatch");
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, step_);
  const double bc2 = 1.0 - std::pow(config_.beta2, step_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params[i].rows() || grads[i].cols() != params[i].cols())
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    Matrix g = grads[i];
    if (apply_l2[i] && config_.l2 > 0.0) g += config_.l2 * params[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    const Matrix mhat = m_[i] / bc1;
    const Matrix vhat = v_[i] / bc2;
    params[i] -= config_.learning_rate *
                 mhat.cwiseQuotient((vhat.cwiseSqrt().array() + config_.epsilon).matrix());
  }
}

double finite_diff_check(const std::function<double(const std::vector<Matrix>&)>& f,
                         const std::vector<Matrix>& params,
                         const std::vector<Matrix>& analytic_grads, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h must be positive");
  std::vector<Matrix> work = params;
  double max_err = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (Eigen::Index r = 0; r < params[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < params[i].cols(); ++c) {
        const double orig = work[i](r, c);
        work[i](r, c) = orig + h;
        const double fp = f(work);
        work[i](r, c) = orig - h;
        const double fm = f(work);
        work[i](r, c) = orig;
        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = analytic_grads[i](r, c);
        const double denom =
            std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_err = std::max(max_err, std::abs(analytic - numeric) / denom);
      }
    }
  }
  return max_err;
}

Matrix xavier_uniform(int rows, int cols, seqlr::Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform_real(-limit, limit);
  return m;
}

}  // namespace seqlr::numcore
