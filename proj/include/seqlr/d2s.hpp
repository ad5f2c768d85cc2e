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

#ifndef SEQLR_D2S_HPP_
#define SEQLR_D2S_HPP_

#include <vector>

#include "seqlr/seqdata.hpp"

namespace seqlr {

// Alignment-free d2S distance between two sequences.
//
// Word counts of length k are centered by their expectation under an order-m
// Markov background fitted to the concatenation of the two sequences:
//   X~_w = X_w - (len - k + 1) * p_w
// The statistic D2S = sum_w X~_w Y~_w / sqrt(X~_w^2 + Y~_w^2) (words with a
// zero denominator skipped) is self-normalized into a distance
//   d = 0.5 * (1 - D2S(A,B) / sqrt(D2S(A,A) * D2S(B,B)))
// so identical sequences are at distance 0. Result lies in [0,1] and is
// symmetric. Requires both sequences longer than k and k >= m + 1.
double d2s_distance(const EncodedSequence& a, const EncodedSequence& b, int k, int m,
                    const Alphabet& alphabet);

// Exact minimum d2s_distance from the query to a non-empty reference set.
double min_distance_to_set(const EncodedSequence& query,
                           const std::vector<EncodedSequence>& references, int k, int m,
                           const Alphabet& alphabet);

}  // namespace seqlr

#endif  // SEQLR_D2S_HPP_
