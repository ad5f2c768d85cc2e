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

#include "seqlr/synth.hpp"

#include <set>
#include <stdexcept>

namespace seqlr {

namespace {

void validate_class(const SyntheticClass& cls, int sequence_length) {
  if (cls.gc_target <= 0.0 || cls.gc_target >= 1.0)
    throw std::invalid_argument("GC target must be in (0,1)");
  if (cls.planting_rate < 0.0 || cls.planting_rate > 1.0)
    throw std::invalid_argument("planting rate must be in [0,1]");
  for (const auto& motif : cls.motifs)
    if (static_cast<int>(motif.size()) >= sequence_length)
      throw std::invalid_argument("motif must be shorter than the sequence length");
}

// i.i.d. background draw with P(G)=P(C)=gc/2 and P(A)=P(T)=(1-gc)/2.
std::uint8_t draw_base(const Alphabet& alphabet, double gc, Rng& rng) {
  const double u = rng.uniform_real();
  char symbol;
  if (u < gc / 2) symbol = 'G';
  else if (u < gc) symbol = 'C';
  else if (u < gc + (1.0 - gc) / 2) symbol = 'A';
  else symbol = 'T';
  return static_cast<std::uint8_t>(alphabet.code(symbol));
}

EncodedSequence make_sequence(const SyntheticClass& cls, int length, Origin origin,
                              const std::string& id, const Alphabet& alphabet, Rng& rng,
                              std::vector<std::uint8_t>* mask_out) {
  EncodedSequence seq;
  seq.id = id;
  seq.class_label = cls.label;
  seq.origin = origin;
  seq.symbols.resize(length);
  for (auto& s : seq.symbols) s = draw_base(alphabet, cls.gc_target, rng);

  std::vector<std::uint8_t> mask(length, 0);
  for (const auto& motif : cls.motifs) {
    if (!rng.bernoulli(cls.planting_rate)) continue;
    const int mlen = static_cast<int>(motif.size());
    const int n_offsets = length - mlen + 1;
    int offset = -1;
    for (int attempt = 0; attempt < 256; ++attempt) {
      const int cand = rng.uniform_int(n_offsets);
      bool clear = true;
      for (int i = 0; i < mlen && clear; ++i)
        if (mask[cand + i]) clear = false;
      if (clear) {
        offset = cand;
        break;
      }
    }
    if (offset < 0) throw std::runtime_error("non-overlapping motif placement impossible");
    for (int i = 0; i < mlen; ++i) {
      seq.symbols[offset + i] = static_cast<std::uint8_t>(alphabet.code(motif[i]));
      mask[offset + i] = 1;
    }
  }
  if (mask_out) *mask_out = std::move(mask);
  return seq;
}

void emit(const SyntheticClass& cls, int count, int length, Origin origin,
          const std::string& split_name, const Alphabet& alphabet, Rng& rng,
          std::vector<EncodedSequence>& out, DatasetSplit& split) {
  for (int i = 0; i < count; ++i) {
    const std::string id = "synth_c" + std::to_string(cls.label) + "_" + split_name + "_" +
                           std::to_string(i);
    std::vector<std::uint8_t> mask;
    out.push_back(make_sequence(cls, length, origin, id, alphabet, rng, &mask));
    split.motif_masks.emplace(id, std::move(mask));
  }
}

}  // namespace

void validate_split(const DatasetSplit& split) {
  auto labels_of = [](const std::vector<EncodedSequence>& seqs) {
    std::set<int> labels;
    for (const auto& s : seqs)
      if (s.class_label) labels.insert(*s.class_label);
    return labels;
  };
  const auto train = labels_of(split.train);
  const auto val_ood = labels_of(split.val_ood);
  const auto test_ood = labels_of(split.test_ood);
  for (int l : val_ood) {
    if (test_ood.count(l))
      throw std::runtime_error("val_ood and test_ood class labels must be disjoint");
    if (train.count(l)) throw std::runtime_error("train and OOD class labels must be disjoint");
  }
  for (int l : test_ood)
    if (train.count(l)) throw std::runtime_error("train and OOD class labels must be disjoint");
}

DatasetSplit synth_generate(const SyntheticSpec& spec, const Alphabet& alphabet, Rng& rng) {
  if (spec.sequence_length < 1) throw std::invalid_argument("sequence length must be >= 1");
  for (const auto& cls : spec.in_classes) validate_class(cls, spec.sequence_length);
  for (const auto& cls : spec.val_ood_classes) validate_class(cls, spec.sequence_length);
  for (const auto& cls : spec.test_ood_classes) validate_class(cls, spec.sequence_length);

  DatasetSplit split;
  for (const auto& cls : spec.in_classes) {
    emit(cls, spec.train_per_class, spec.sequence_length, Origin::kInDistribution, "train",
         alphabet, rng, split.train, split);
    emit(cls, spec.val_per_class, spec.sequence_length, Origin::kInDistribution, "val",
         alphabet, rng, split.val_in, split);
    emit(cls, spec.test_per_class, spec.sequence_length, Origin::kInDistribution, "test",
         alphabet, rng, split.test_in, split);
  }
  for (const auto& cls : spec.val_ood_classes)
    emit(cls, spec.val_per_class, spec.sequence_length, Origin::kOod, "val", alphabet, rng,
         split.val_ood, split);
  for (const auto& cls : spec.test_ood_classes)
    emit(cls, spec.test_per_class, spec.sequence_length, Origin::kOod, "test", alphabet, rng,
         split.test_ood, split);

  validate_split(split);
  return split;
}

}  // namespace seqlr
