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

#include "seqlr/d2s.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqlr {

namespace {

std::vector<double> word_counts(const EncodedSequence& seq, int k, int alpha,
                                std::size_t n_words) {
  std::vector<double> counts(n_words, 0.0);
  const int n = seq.length() - k + 1;
  for (int start = 0; start < n; ++start) {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) idx = idx * alpha + seq.symbols[start + i];
    counts[idx] += 1.0;
  }
  return counts;
}

// Order-m Markov background fitted to the concatenation of both sequences.
struct Background {
  int order;
  int alpha;
  std::vector<double> context_counts;     // |A|^m
  std::vector<double> transition_counts;  // |A|^(m+1)
  double context_total = 0.0;

  double word_prob(std::size_t word, int k) const {
    // decode most-significant-first
    std::vector<int> sym(k);
    std::size_t w = word;
    for (int i = k - 1; i >= 0; --i) {
      sym[i] = static_cast<int>(w % alpha);
      w /= alpha;
    }
    if (order == 0) {
      double p = 1.0;
      for (int i = 0; i < k; ++i) {
        if (context_total == 0.0) return 0.0;
        p *= transition_counts[sym[i]] / context_total;
      }
      return p;
    }
    const std::size_t n_ctx = context_counts.size();
    std::size_t ctx = 0;
    for (int i = 0; i < order; ++i) ctx = ctx * alpha + sym[i];
    if (context_total == 0.0 || context_counts[ctx] == 0.0) return 0.0;
    double p = context_counts[ctx] / context_total;
    for (int i = order; i < k; ++i) {
      if (context_counts[ctx] == 0.0) return 0.0;
      const std::size_t tr = ctx * alpha + sym[i];
      p *= transition_counts[tr] / context_counts[ctx];
      ctx = tr % n_ctx;
    }
    return p;
  }
};

Background fit_background(const EncodedSequence& a, const EncodedSequence& b, int m,
                          int alpha) {
  Background bg;
  bg.order = m;
  bg.alpha = alpha;
  const std::size_t n_ctx = static_cast<std::size_t>(std::pow(alpha, m));
  const std::size_t n_tr = n_ctx * alpha;
  bg.context_counts.assign(n_ctx, 0.0);
  bg.transition_counts.assign(n_tr, 0.0);
  for (const EncodedSequence* seq : {&a, &b}) {
    if (m == 0) {
      for (auto s : seq->symbols) {
        bg.transition_counts[s] += 1.0;
        bg.context_total += 1.0;
      }
    } else {
      const int n = seq->length() - m;
      for (int start = 0; start < n; ++start) {
        std::size_t ctx = 0;
        for (int i = 0; i < m; ++i) ctx = ctx * alpha + seq->symbols[start + i];
        bg.context_counts[ctx] += 1.0;
        bg.context_total += 1.0;
        bg.transition_counts[ctx * alpha + seq->symbols[start + m]] += 1.0;
      }
    }
  }
  return bg;
}

}  // namespace

double d2s_distance(const EncodedSequence& a, const EncodedSequence& b, int k, int m,
                    const Alphabet& alphabet) {
  if (k < 1 || m < 0 || k < m + 1) throw std::invalid_argument("d2s requires k >= m+1 >= 1");
  if (a.length() <= k || b.length() <= k)
    throw std::invalid_argument("d2s requires sequences longer than k");
  const int alpha = alphabet.size();
  const double n_words_d = std::pow(alpha, k);
  if (n_words_d > (1u << 26)) throw std::invalid_argument("d2s word space too large");
  const std::size_t n_words = static_cast<std::size_t>(n_words_d);

  const std::vector<double> xc = word_counts(a, k, alpha, n_words);
  const std::vector<double> yc = word_counts(b, k, alpha, n_words);
  const Background bg = fit_background(a, b, m, alpha);

  const double na = a.length() - k + 1;
  const double nb = b.length() - k + 1;
  double s_ab = 0.0, s_aa = 0.0, s_bb = 0.0;
  for (std::size_t w = 0; w < n_words; ++w) {
    const double pw = bg.word_prob(w, k);
    const double xt = xc[w] - na * pw;
    const double yt = yc[w] - nb * pw;
    const double d = std::sqrt(xt * xt + yt * yt);
    if (d > 0.0) s_ab += xt * yt / d;
    if (xt != 0.0) s_aa += std::abs(xt) / std::sqrt(2.0);
    if (yt != 0.0) s_bb += std::abs(yt) / std::sqrt(2.0);
  }

  const double denom = std::sqrt(s_aa * s_bb);
  if (denom == 0.0) return a.symbols == b.symbols ? 0.0 : 0.5;
  const double ratio = std::clamp(s_ab / denom, -1.0, 1.0);
  return 0.5 * (1.0 - ratio);
}

double min_distance_to_set(const EncodedSequence& query,
                           const std::vector<EncodedSequence>& references, int k, int m,
                           const Alphabet& alphabet) {
  if (references.empty()) throw std::invalid_argument("reference set must be non-empty");
  double best = 1.0;
  for (const auto& ref : references)
    best = std::min(best, d2s_distance(query, ref, k, m, alphabet));
  return best;
}

}  // namespace seqlr
