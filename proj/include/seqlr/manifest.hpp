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

#ifndef SEQLR_MANIFEST_HPP_
#define SEQLR_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlr/metrics.hpp"
#include "seqlr/seqdata.hpp"

namespace seqlr {

// Audit header carried by every output file: first JSONL line or a leading
// '#' comment line in CSVs.
struct Provenance {
  std::string stage;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::string csv_comment() const;
  std::string jsonl_line() const;
};

// Dataset manifests: JSON-lines {id, class, origin, sequence}.
void write_dataset_jsonl(const std::string& path, const std::vector<EncodedSequence>& seqs,
                         const Alphabet& alphabet, const Provenance& prov);
std::vector<EncodedSequence> read_dataset_jsonl(const std::string& path,
                                                const Alphabet& alphabet);

void write_motif_masks(const std::string& path,
                       const std::unordered_map<std::string, std::vector<std::uint8_t>>& masks,
                       const Provenance& prov);
std::unordered_map<std::string, std::vector<std::uint8_t>> read_motif_masks(
    const std::string& path);

// ScoreRecord streams: JSON-lines {id, origin, method, score, ...covariates}.
void write_score_records(const std::string& path, const std::vector<ScoreRecord>& records,
                         const Provenance& prov);
std::vector<ScoreRecord> read_score_records(const std::string& path);

}  // namespace seqlr

#endif  // SEQLR_MANIFEST_HPP_
