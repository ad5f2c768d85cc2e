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

#ifndef SEQLR_TAPE_HPP_
#define SEQLR_TAPE_HPP_

#include <Eigen/Dense>
#include <functional>
#include <unordered_map>
#include <vector>

namespace seqlr {
class Rng;
}

namespace seqlr::numcore {

using Matrix = Eigen::MatrixXd;

// Row-stable softmax over each column of `logits` (subtracts the column max).
Matrix softmax_columns(const Matrix& logits);

// Reverse-mode tape over dense double matrices. Nodes are appended in
// evaluation order, so the tape is topologically sorted by construction.
class Tape {
 public:
  enum class Op {
    kLeaf,
    kMatMul,
    kAdd,
    kAddColVec,  // broadcast a column vector across all columns
    kSub,
    kMul,  // elementwise
    kScale,
    kSigmoid,
    kTanh,
    kExp,
    kLog,
    kRelu,
    kConcatRows,
    kSliceRows,
    kReduceSum,   // sum of all entries, 1x1 result
    kColMax,      // max over columns per row, Nx1 result
    kSoftmaxCrossEntropy,  // per-column loss row vector vs. soft targets
  };

  struct Node {
    Op op;
    std::vector<int> inputs;
    Matrix value;
    bool trainable = false;
    // op-specific attributes
    int slice_begin = 0;
    int slice_rows = 0;
    double scale = 1.0;
    Matrix targets;  // soft target distribution per column (softmax CE)
  };

  int leaf(Matrix value, bool trainable = false);
  int matmul(int a, int b);
  int add(int a, int b);
  int add_colvec(int a, int bias);
  int sub(int a, int b);
  int mul(int a, int b);
  int scale(int a, double s);
  int sigmoid(int a);
  int tanh(int a);
  int exp(int a);
  int log(int a);
  int relu(int a);
  int concat_rows(const std::vector<int>& parts);
  int slice_rows(int a, int begin, int rows);
  int reduce_sum(int a);
  int col_max(int a);
  // Fused, numerically stable softmax + cross-entropy. `targets` holds one
  // distribution per column; returns a 1xB row of per-column losses.
  int softmax_cross_entropy(int logits, Matrix targets);
  // Convenience overload for hard labels.
  int softmax_cross_entropy(int logits, const std::vector<int>& labels);

  const Matrix& value(int id) const { return nodes_.at(id).value; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Gradients of the scalar loss node w.r.t. every trainable leaf.
  // Deterministic: a fixed tape yields bit-identical gradients.
  std::unordered_map<int, Matrix> backward(int loss_node) const;

 private:
  int push(Node node);
  std::vector<Node> nodes_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 0.0;  // added to the gradient as l2 * param
};

class AdamState {
 public:
  AdamState(const std::vector<Matrix>& params, AdamConfig config);

  // In-place update. `apply_l2[i]` marks parameters (weight matrices, not
  // biases) that receive the L2 gradient term.
  void step(std::vector<Matrix>& params, const std::vector<Matrix>& grads,
            const std::vector<bool>& apply_l2);

  int step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  int step_ = 0;
};

// Max relative error between analytic gradients and central finite
// differences of `f`, with denominator max(|analytic|, |numeric|, 1e-8).
double finite_diff_check(const std::function<double(const std::vector<Matrix>&)>& f,
                         const std::vector<Matrix>& params,
                         const std::vector<Matrix>& analytic_grads, double h);

// Xavier-uniform fan-in/fan-out initialization.
Matrix xavier_uniform(int rows, int cols, seqlr::Rng& rng);

}  // namespace seqlr::numcore

#endif  // SEQLR_TAPE_HPP_
