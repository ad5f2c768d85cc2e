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

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqlr/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kNumericError = 4;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> methods;
  std::string scores;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_methods = false,
                bool with_scores = false) {
  cmd->add_option("--config", opts.config_path, "run config JSON")->required();
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out_dir, "override the output directory");
  if (with_methods)
    cmd->add_option("--methods", opts.methods, "comma-separated method subset")
        ->delimiter(',');
  if (with_scores) cmd->add_option("--scores", opts.scores, "score records JSONL path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"likelihood-ratio out-of-distribution detection for discrete sequences"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
  CLI::App* ingest = app.add_subcommand("ingest", "fragment FASTA genomes into a dataset");
  CLI::App* train = app.add_subcommand("train", "train the foreground model");
  CLI::App* train_bg = app.add_subcommand("train-bg", "train the perturbed background model");
  CLI::App* train_clf = app.add_subcommand("train-clf", "train classifier baselines");
  CLI::App* score = app.add_subcommand("score", "score the test split with trained models");
  CLI::App* sweep = app.add_subcommand("sweep", "grid-search mu/lambda on validation OOD");
  CLI::App* tune_sim =
      app.add_subcommand("tune-sim", "grid-search mu/lambda on simulated OOD");
  CLI::App* eval = app.add_subcommand("eval", "compute metrics from score records");
  CLI::App* report = app.add_subcommand("report", "metrics plus plot-ready tables");
  for (CLI::App* c : {synth, ingest, train, train_bg, train_clf, sweep, tune_sim})
    add_common(c, opts);
  add_common(score, opts, /*with_methods=*/true);
  add_common(eval, opts, false, /*with_scores=*/true);
  add_common(report, opts, false, /*with_scores=*/true);

  CLI11_PARSE(app, argc, argv);

  try {
    const seqlr::RunConfig config =
        seqlr::load_run_config(opts.config_path, opts.seed, opts.out_dir);
    if (synth->parsed()) seqlr::cmd_synth(config);
    if (ingest->parsed()) seqlr::cmd_ingest(config);
    if (train->parsed()) seqlr::cmd_train(config);
    if (train_bg->parsed()) seqlr::cmd_train_bg(config);
    if (train_clf->parsed()) seqlr::cmd_train_clf(config);
    if (score->parsed()) seqlr::cmd_score(config, opts.methods);
    if (sweep->parsed()) seqlr::cmd_sweep(config);
    if (tune_sim->parsed()) seqlr::cmd_tune_sim(config);
    if (eval->parsed()) seqlr::cmd_eval(config, opts.scores);
    if (report->parsed()) seqlr::cmd_report(config, opts.scores);
  } catch (const seqlr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const seqlr::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumericError;
  } catch (const seqlr::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  }
  return kOk;
}
