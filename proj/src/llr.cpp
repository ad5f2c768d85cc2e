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

#include "seqlr/llr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "seqlr/metrics.hpp"
#include "seqlr/rng.hpp"

namespace seqlr {

void LLRScorer::validate() const {
  if (foreground.config.kind != background.config.kind)
    throw std::invalid_argument("foreground and background must share the model kind");
  if (foreground.config.alphabet_size != background.config.alphabet_size)
    throw std::invalid_argument("foreground and background must share the alphabet");
}

double llr_score(const LLRScorer& scorer, const EncodedSequence& seq) {
  return log_likelihood(scorer.foreground, seq) - log_likelihood(scorer.background, seq);
}

std::vector<double> per_position_llr(const LLRScorer& scorer, const EncodedSequence& seq) {
  std::vector<double> fg = per_position_log_prob(scorer.foreground, seq);
  const std::vector<double> bg = per_position_log_prob(scorer.background, seq);
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] -= bg[i];
  return fg;
}

double waic_score(const std::vector<Checkpoint>& models, const EncodedSequence& seq) {
  if (models.size() < 2) throw std::invalid_argument("waic_score requires >= 2 models");
  std::vector<double> lls;
  lls.reserve(models.size());
  for (const auto& m : models) lls.push_back(log_likelihood(m, seq));
  double mean = 0.0;
  for (double v : lls) mean += v;
  mean /= static_cast<double>(lls.size());
  double var = 0.0;  // population variance
  for (double v : lls) var += (v - mean) * (v - mean);
  var /= static_cast<double>(lls.size());
  return mean - var;
}

namespace {

SweepResult run_sweep(const std::vector<EncodedSequence>& train_data,
                      const Checkpoint& foreground, const SweepGrid& grid,
                      const std::vector<EncodedSequence>& val_in,
                      const std::vector<EncodedSequence>& val_ood, const ARConfig& bg_base,
                      const Alphabet& alphabet, std::uint64_t seed) {
  if (grid.mus.empty() || grid.lambdas.empty())
    throw std::invalid_argument("sweep grid must be non-empty");
  if (val_in.empty() || val_ood.empty())
    throw std::invalid_argument("sweep requires non-empty validation sets");
  for (double mu : grid.mus)
    if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("sweep mu must be in [0,1]");

  std::vector<double> mus = grid.mus, lambdas = grid.lambdas;
  std::sort(mus.begin(), mus.end());
  std::sort(lambdas.begin(), lambdas.end());

  std::vector<double> fg_val_in, fg_val_ood;
  fg_val_in.reserve(val_in.size());
  fg_val_ood.reserve(val_ood.size());
  for (const auto& s : val_in) fg_val_in.push_back(log_likelihood(foreground, s));
  for (const auto& s : val_ood) fg_val_ood.push_back(log_likelihood(foreground, s));

  SweepResult result;
  std::uint64_t cell_index = 0;
  for (double mu : mus) {
    for (double lambda : lambdas) {
      ARConfig cfg = bg_base;
      PerturbConfig pc = cfg.training.perturbation.value_or(PerturbConfig{});
      pc.mutation_rate = mu;
      cfg.training.perturbation = pc;
      cfg.training.l2 = lambda;

      SweepCell cell;
      cell.mu = mu;
      cell.lambda = lambda;
      cell.background = train_ar(train_data, cfg, alphabet,
                                 Rng::derive(seed, cell_index).next_u64());
      std::vector<double> in_scores(fg_val_in), ood_scores(fg_val_ood);
      for (std::size_t i = 0; i < val_in.size(); ++i)
        in_scores[i] -= log_likelihood(cell.background, val_in[i]);
      for (std::size_t i = 0; i < val_ood.size(); ++i)
        ood_scores[i] -= log_likelihood(cell.background, val_ood[i]);
      cell.val_auroc = auroc(in_scores, ood_scores);

      // strict > keeps the first (smallest mu, then lambda) of any tie
      if (result.selected < 0 || cell.val_auroc > result.cells[result.selected].val_auroc)
        result.selected = static_cast<int>(result.cells.size());
      result.cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return result;
}

}  // namespace

SweepResult sweep(const std::vector<EncodedSequence>& train_data, const Checkpoint& foreground,
                  const SweepGrid& grid, const std::vector<EncodedSequence>& val_in,
                  const std::vector<EncodedSequence>& val_ood, const ARConfig& bg_base,
                  const Alphabet& alphabet, std::uint64_t seed) {
  return run_sweep(train_data, foreground, grid, val_in, val_ood, bg_base, alphabet, seed);
}

SweepResult simulated_ood_tune(const std::vector<EncodedSequence>& train_data,
                               const Checkpoint& foreground, const SweepGrid& grid,
                               const std::vector<EncodedSequence>& val_in, double sim_rate,
                               const ARConfig& bg_base, const Alphabet& alphabet,
                               std::uint64_t seed) {
  if (sim_rate <= 0.0) throw std::invalid_argument("simulated OOD mutation rate must be > 0");
  PerturbConfig sim;
  sim.mutation_rate = sim_rate;
  Rng rng = Rng::derive(seed, 0x51u);
  std::vector<EncodedSequence> sim_ood;
  sim_ood.reserve(val_in.size());
  for (const auto& s : val_in) {
    EncodedSequence p = perturb(s, sim, alphabet, rng);
    p.origin = Origin::kOod;
    sim_ood.push_back(std::move(p));
  }
  return run_sweep(train_data, foreground, grid, val_in, sim_ood, bg_base, alphabet, seed);
}

}  // namespace seqlr
