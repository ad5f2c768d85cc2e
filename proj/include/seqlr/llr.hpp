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

#ifndef SEQLR_LLR_HPP_
#define SEQLR_LLR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "seqlr/genmodel.hpp"

namespace seqlr {

// Foreground model paired with a background model trained on perturbed
// inputs. Larger scores mean more in-distribution.
struct LLRScorer {
  Checkpoint foreground;
  Checkpoint background;

  void validate() const;
};

// log p_fg(x) - log p_bg(x), in nats.
double llr_score(const LLRScorer& scorer, const EncodedSequence& seq);

// Per-position log-ratio track; sums to llr_score.
std::vector<double> per_position_llr(const LLRScorer& scorer, const EncodedSequence& seq);

// Mean minus population variance of the per-model total log-likelihoods over
// independently seeded generative models.
double waic_score(const std::vector<Checkpoint>& models, const EncodedSequence& seq);

struct SweepGrid {
  std::vector<double> mus;      // in [0,1]
  std::vector<double> lambdas;  // >= 0
};

struct SweepCell {
  double mu = 0.0;
  double lambda = 0.0;
  double val_auroc = 0.0;
  Checkpoint background;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  int selected = -1;  // index into cells

  const SweepCell& best() const { return cells.at(selected); }
};

// Trains one background model per (mu, lambda) cell against the shared
// foreground and scores validation AUROC of the LLR. Ties break toward
// smaller mu, then smaller lambda.
SweepResult sweep(const std::vector<EncodedSequence>& train_data,
                  const Checkpoint& foreground, const SweepGrid& grid,
                  const std::vector<EncodedSequence>& val_in,
                  const std::vector<EncodedSequence>& val_ood, const ARConfig& bg_base,
                  const Alphabet& alphabet, std::uint64_t seed);

// Sweep with val_ood replaced by perturbed copies of val_in at rate
// `sim_rate` (> 0 required); no real OOD data consulted.
SweepResult simulated_ood_tune(const std::vector<EncodedSequence>& train_data,
                               const Checkpoint& foreground, const SweepGrid& grid,
                               const std::vector<EncodedSequence>& val_in, double sim_rate,
                               const ARConfig& bg_base, const Alphabet& alphabet,
                               std::uint64_t seed);

}  // namespace seqlr

#endif  // SEQLR_LLR_HPP_
