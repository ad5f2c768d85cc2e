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
#include <vector>

#include "seqlr/rng.hpp"
#include "seqlr/tape.hpp"

using seqlr::Rng;
using seqlr::numcore::AdamConfig;
using seqlr::numcore::AdamState;
using seqlr::numcore::Matrix;
using seqlr::numcore::Tape;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform_real(-scale, scale);
  return m;
}

}  // namespace

TEST_CASE("rng is deterministic and derive gives distinct streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng s1 = Rng::derive(42, 1), s2 = Rng::derive(42, 2);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("rng uniform helpers stay in range") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const int v = rng.uniform_int(13);
    CHECK(v >= 0);
    CHECK(v < 13);
    const double r = rng.uniform_real();
    CHECK(r >= 0.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("rng uniform_int is roughly uniform") {
  Rng rng(3);
  std::vector<int> counts(4, 0);
  const int n = 400000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_int(4)]++;
  for (int c : counts) CHECK(std::abs(c - n / 4) < 4 * std::sqrt(n * 0.25 * 0.75));
}

TEST_CASE("softmax columns sum to one and are shift invariant") {
  Rng rng(11);
  Matrix logits = random_matrix(5, 3, rng, 10.0);
  Matrix p = seqlr::numcore::softmax_columns(logits);
  for (int j = 0; j < 3; ++j) CHECK(p.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
  Matrix shifted = logits;
  shifted.array() += 500.0;
  Matrix p2 = seqlr::numcore::softmax_columns(shifted);
  CHECK((p - p2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tape gradients match finite differences on randomized graphs") {
  // randomized composite graphs over all op types
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(100 + trial);
    Matrix w = random_matrix(4, 3, rng);
    Matrix b = random_matrix(4, 1, rng);
    Matrix x = random_matrix(3, 2, rng);

    auto build = [&](const std::vector<Matrix>& params, std::vector<int>* leaves) {
      Tape tape;
      const int wi = tape.leaf(params[0], true);
      const int bi = tape.leaf(params[1], true);
      const int xi = tape.leaf(x);
      const int lin = tape.add_colvec(tape.matmul(wi, xi), bi);
      const int act = tape.tanh(tape.sigmoid(lin));
      const int top = tape.relu(tape.sub(act, tape.scale(act, 0.25)));
      const int ce = tape.softmax_cross_entropy(top, std::vector<int>{1, 3});
      const int loss = tape.reduce_sum(ce);
      if (leaves) *leaves = {wi, bi};
      return std::make_pair(std::move(tape), loss);
    };

    std::vector<int> leaves;
    auto [tape, loss] = build({w, b}, &leaves);
    auto grads = tape.backward(loss);
    std::vector<Matrix> analytic = {grads.at(leaves[0]), grads.at(leaves[1])};

    const double err = seqlr::numcore::finite_diff_check(
        [&](const std::vector<Matrix>& params) {
          auto [t, l] = build(params, nullptr);
          return t.value(l)(0, 0);
        },
        {w, b}, analytic, 1e-5);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("tape gradients match finite differences on an lstm cell") {
  Rng rng(55);
  const int A = 4, H = 5, B = 2;
  Matrix w = random_matrix(4 * H, A + H, rng, 0.5);
  Matrix bias = random_matrix(4 * H, 1, rng, 0.1);
  Matrix x = random_matrix(A, B, rng);
  Matrix h0 = random_matrix(H, B, rng, 0.3);
  Matrix c0 = random_matrix(H, B, rng, 0.3);

  auto build = [&](const std::vector<Matrix>& params, std::vector<int>* leaves) {
    Tape tape;
    const int wi = tape.leaf(params[0], true);
    const int bi = tape.leaf(params[1], true);
    const int xi = tape.leaf(x);
    const int hi = tape.leaf(h0);
    const int ci = tape.leaf(c0);
    const int xh = tape.concat_rows({xi, hi});
    const int z = tape.add_colvec(tape.matmul(wi, xh), bi);
    const int ig = tape.sigmoid(tape.slice_rows(z, 0, H));
    const int fg = tape.sigmoid(tape.slice_rows(z, H, H));
    const int gg = tape.tanh(tape.slice_rows(z, 2 * H, H));
    const int og = tape.sigmoid(tape.slice_rows(z, 3 * H, H));
    const int c1 = tape.add(tape.mul(fg, ci), tape.mul(ig, gg));
    const int h1 = tape.mul(og, tape.tanh(c1));
    const int loss = tape.reduce_sum(tape.mul(h1, h1));
    if (leaves) *leaves = {wi, bi};
    return std::make_pair(std::move(tape), loss);
  };

  std::vector<int> leaves;
  auto [tape, loss] = build({w, bias}, &leaves);
  auto grads = tape.backward(loss);
  const double err = seqlr::numcore::finite_diff_check(
      [&](const std::vector<Matrix>& params) {
        auto [t, l] = build(params, nullptr);
        return t.value(l)(0, 0);
      },
      {w, bias}, {grads.at(leaves[0]), grads.at(leaves[1])}, 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("col_max and log/exp gradients check out") {
  Rng rng(77);
  Matrix a = random_matrix(3, 4, rng).array() + 2.0;  // keep log in range
  auto build = [&](const std::vector<Matrix>& params, int* leaf) {
    Tape tape;
    const int ai = tape.leaf(params[0], true);
    const int mx = tape.col_max(tape.exp(tape.log(ai)));
    const int loss = tape.reduce_sum(mx);
    if (leaf) *leaf = ai;
    return std::make_pair(std::move(tape), loss);
  };
  int leaf = -1;
  auto [tape, loss] = build({a}, &leaf);
  auto grads = tape.backward(loss);
  const double err = seqlr::numcore::finite_diff_check(
      [&](const std::vector<Matrix>& params) {
        auto [t, l] = build(params, nullptr);
        return t.value(l)(0, 0);
      },
      {a}, {grads.at(leaf)}, 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("softmax cross entropy value matches explicit formula") {
  Matrix logits(3, 1);
  logits << 1.0, 2.0, 0.5;
  Tape tape;
  const int li = tape.leaf(logits);
  const int ce = tape.softmax_cross_entropy(li, std::vector<int>{1});
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(0.5);
  CHECK(tape.value(ce)(0, 0) == doctest::Approx(-std::log(std::exp(2.0) / z)).epsilon(1e-12));
}

TEST_CASE("backward returns zero gradients for unused trainables") {
  Tape tape;
  const int used = tape.leaf(Matrix::Ones(2, 2), true);
  const int unused = tape.leaf(Matrix::Ones(3, 1), true);
  const int loss = tape.reduce_sum(tape.mul(used, used));
  auto grads = tape.backward(loss);
  CHECK(grads.at(unused).isZero(0.0));
  CHECK(grads.at(used).isApprox(2.0 * Matrix::Ones(2, 2)));
}

TEST_CASE("adam first step moves by lr with hand-computed bias correction") {
  // With m=g, v=g^2 after one step, the bias-corrected update is exactly
  // lr * g / (|g| + eps') which for scalar g>0 is close to lr.
  std::vector<Matrix> params = {Matrix::Constant(1, 1, 1.0)};
  std::vector<Matrix> grads = {Matrix::Constant(1, 1, 0.5)};
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epsilon = 0.0;
  AdamState adam(params, cfg);
  adam.step(params, grads, {false});
  CHECK(params[0](0, 0) == doctest::Approx(1.0 - 0.1).epsilon(1e-12));
}

TEST_CASE("adam applies l2 only where masked") {
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.l2 = 1.0;
  std::vector<Matrix> with_l2 = {Matrix::Constant(1, 1, 2.0)};
  std::vector<Matrix> without = {Matrix::Constant(1, 1, 2.0)};
  std::vector<Matrix> zero_grad = {Matrix::Zero(1, 1)};
  AdamState a(with_l2, cfg), b(without, cfg);
  a.step(with_l2, zero_grad, {true});
  b.step(without, zero_grad, {false});
  CHECK(with_l2[0](0, 0) < 2.0);          // decayed toward zero
  CHECK(without[0](0, 0) == 2.0);         // untouched
}

TEST_CASE("xavier uniform respects the fan bound and is deterministic") {
  Rng r1(9), r2(9);
  Matrix a = seqlr::numcore::xavier_uniform(16, 8, r1);
  Matrix b = seqlr::numcore::xavier_uniform(16, 8, r2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  const double bound = std::sqrt(6.0 / (16 + 8));
  CHECK(a.cwiseAbs().maxCoeff() <= bound);
  CHECK(a.cwiseAbs().maxCoeff() > 0.0);
}
