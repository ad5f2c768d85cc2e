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

#ifndef SEQLR_PIPELINE_HPP_
#define SEQLR_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqlr/baselines.hpp"
#include "seqlr/genmodel.hpp"
#include "seqlr/llr.hpp"
#include "seqlr/metrics.hpp"
#include "seqlr/synth.hpp"

namespace seqlr {

// Exit-code-bearing error categories for the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FastaClassSpec {
  int label = 0;
  std::string role;  // "in", "val_ood", "test_ood"
  std::string path;
};

struct FastaIngestSpec {
  int fragment_length = 250;
  int train_fragments = 0;  // per in-distribution genome
  int val_fragments = 0;
  int test_fragments = 0;
  std::vector<FastaClassSpec> classes;
};

struct DistanceSpec {
  bool enabled = false;
  int k = 6;
  int m = 0;
  int sequences_per_class = 20;  // concatenated into a class representative
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::optional<SyntheticSpec> synthetic;
  std::optional<FastaIngestSpec> fasta;
  ARConfig foreground;
  ARConfig background;  // perturbation + l2 filled from mu/lambda fields
  SweepGrid grid;
  double sim_rate = 0.1;
  ClassifierConfig classifier;
  std::vector<int> ensemble_sizes = {5, 10, 20};
  int waic_models = 5;
  std::vector<std::string> methods;
  DistanceSpec distance;
  ReportOptions eval;

  std::string config_hash() const;  // over the canonical config serialization
  nlohmann::json raw;               // parsed config file contents
};

RunConfig load_run_config(const std::string& path,
                          std::optional<std::uint64_t> seed_override = std::nullopt,
                          std::optional<std::string> out_override = std::nullopt);

// Stage drivers; each reads/writes only declared files under out_dir.
void cmd_synth(const RunConfig& config);
void cmd_ingest(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_train_bg(const RunConfig& config);
void cmd_train_clf(const RunConfig& config);
void cmd_score(const RunConfig& config, const std::vector<std::string>& methods);
void cmd_sweep(const RunConfig& config);
void cmd_tune_sim(const RunConfig& config);
void cmd_eval(const RunConfig& config, const std::string& scores_path);
void cmd_report(const RunConfig& config, const std::string& scores_path);

// Canonical file locations under out_dir.
std::string dataset_path(const RunConfig& config, const std::string& split);
std::string scores_path(const RunConfig& config);

void write_eval_report(const EvalReport& report, const std::string& dir,
                       const struct Provenance& prov, bool plot_tables);

}  // namespace seqlr

#endif  // SEQLR_PIPELINE_HPP_
