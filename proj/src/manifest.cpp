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

#include "seqlr/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace seqlr {

using nlohmann::json;

std::string Provenance::csv_comment() const {
  return "# stage=" + stage + " seed=" + std::to_string(seed) + " config_hash=" + config_hash;
}

std::string Provenance::jsonl_line() const {
  const json j = {{"provenance",
                   {{"stage", stage}, {"seed", seed}, {"config_hash", config_hash}}}};
  return j.dump();
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

bool is_provenance(const json& j) { return j.contains("provenance"); }

}  // namespace

void write_dataset_jsonl(const std::string& path, const std::vector<EncodedSequence>& seqs,
                         const Alphabet& alphabet, const Provenance& prov) {
  auto out = open_out(path);
  out << prov.jsonl_line() << "\n";
  for (const auto& seq : seqs) {
    json j = {{"id", seq.id},
              {"origin", origin_to_string(seq.origin)},
              {"sequence", seq.decode(alphabet)}};
    if (seq.class_label) j["class"] = *seq.class_label;
    out << j.dump() << "\n";
  }
}

std::vector<EncodedSequence> read_dataset_jsonl(const std::string& path,
                                                const Alphabet& alphabet) {
  auto in = open_in(path);
  std::vector<EncodedSequence> seqs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw std::runtime_error("corrupted manifest line in " + path);
    }
    if (is_provenance(j)) continue;
    EncodedSequence seq = encode(j.at("id"), j.at("sequence"), alphabet);
    seq.origin = origin_from_string(j.at("origin"));
    if (j.contains("class")) seq.class_label = j.at("class").get<int>();
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

void write_motif_masks(const std::string& path,
                       const std::unordered_map<std::string, std::vector<std::uint8_t>>& masks,
                       const Provenance& prov) {
  auto out = open_out(path);
  out << prov.jsonl_line() << "\n";
  // sorted by id so the file is byte-stable
  std::vector<const std::string*> ids;
  ids.reserve(masks.size());
  for (const auto& [id, mask] : masks) ids.push_back(&id);
  std::sort(ids.begin(), ids.end(), [](const auto* a, const auto* b) { return *a < *b; });
  for (const auto* id : ids) {
    std::string bits;
    for (auto b : masks.at(*id)) bits.push_back(b ? '1' : '0');
    out << json{{"id", *id}, {"mask", bits}}.dump() << "\n";
  }
}

std::unordered_map<std::string, std::vector<std::uint8_t>> read_motif_masks(
    const std::string& path) {
  auto in = open_in(path);
  std::unordered_map<std::string, std::vector<std::uint8_t>> masks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (is_provenance(j)) continue;
    const std::string bits = j.at("mask");
    std::vector<std::uint8_t> mask(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) mask[i] = bits[i] == '1';
    masks.emplace(j.at("id").get<std::string>(), std::move(mask));
  }
  return masks;
}

void write_score_records(const std::string& path, const std::vector<ScoreRecord>& records,
                         const Provenance& prov) {
  auto out = open_out(path);
  out << prov.jsonl_line() << "\n";
  for (const auto& rec : records) {
    json j = {{"id", rec.id},
              {"origin", origin_to_string(rec.origin)},
              {"method", rec.method},
              {"score", rec.score}};
    if (rec.gc_content) j["gc"] = *rec.gc_content;
    if (rec.class_label) j["class"] = *rec.class_label;
    if (rec.min_d2s) j["min_d2s"] = *rec.min_d2s;
    if (rec.seed) j["seed"] = *rec.seed;
    out << j.dump() << "\n";
  }
}

std::vector<ScoreRecord> read_score_records(const std::string& path) {
  auto in = open_in(path);
  std::vector<ScoreRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw std::runtime_error("corrupted score record in " + path);
    }
    if (is_provenance(j)) continue;
    ScoreRecord rec;
    rec.id = j.at("id");
    rec.origin = origin_from_string(j.at("origin"));
    rec.method = j.at("method");
    rec.score = j.at("score");
    if (j.contains("gc")) rec.gc_content = j.at("gc").get<double>();
    if (j.contains("class")) rec.class_label = j.at("class").get<int>();
    if (j.contains("min_d2s")) rec.min_d2s = j.at("min_d2s").get<double>();
    if (j.contains("seed")) rec.seed = j.at("seed").get<std::uint64_t>();
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace seqlr
