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

#ifndef SEQLR_SYNTH_HPP_
#define SEQLR_SYNTH_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "seqlr/seqdata.hpp"

namespace seqlr {

// One benchmark class: an i.i.d. background with a target GC fraction plus a
// set of short motifs planted at random non-overlapping offsets.
struct SyntheticClass {
  int label = 0;
  double gc_target = 0.5;           // P(G)+P(C), split evenly within {G,C} and {A,T}
  std::vector<std::string> motifs;  // DNA strings, each shorter than the sequence length
  double planting_rate = 1.0;       // per motif per sequence
};

struct SyntheticSpec {
  std::vector<SyntheticClass> in_classes;
  std::vector<SyntheticClass> val_ood_classes;   // labels disjoint from test_ood
  std::vector<SyntheticClass> test_ood_classes;
  int sequence_length = 250;
  int train_per_class = 0;
  int val_per_class = 0;
  int test_per_class = 0;
};

struct DatasetSplit {
  std::vector<EncodedSequence> train;
  std::vector<EncodedSequence> val_in;
  std::vector<EncodedSequence> val_ood;
  std::vector<EncodedSequence> test_in;
  std::vector<EncodedSequence> test_ood;
  // Ground-truth planted-motif masks keyed by sequence id (1 = motif span).
  std::unordered_map<std::string, std::vector<std::uint8_t>> motif_masks;
};

// Throws if the split invariants are violated: val_ood labels disjoint from
// test_ood labels, train labels disjoint from all OOD labels.
void validate_split(const DatasetSplit& split);

// Deterministic for a fixed seed.
DatasetSplit synth_generate(const SyntheticSpec& spec, const Alphabet& alphabet, Rng& rng);

}  // namespace seqlr

#endif  // SEQLR_SYNTH_HPP_
