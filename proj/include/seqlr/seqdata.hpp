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

#ifndef SEQLR_SEQDATA_HPP_
#define SEQLR_SEQDATA_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "seqlr/rng.hpp"

namespace seqlr {

class Alphabet {
 public:
  explicit Alphabet(std::string symbols);
  static Alphabet dna() { return Alphabet("ACGT"); }

  int size() const { return static_cast<int>(symbols_.size()); }
  char symbol(int code) const { return symbols_.at(code); }
  // -1 if the character is not in the alphabet.
  int code(char symbol) const { return lookup_[static_cast<unsigned char>(symbol)]; }
  bool contains(char symbol) const { return code(symbol) >= 0; }
  const std::string& symbols() const { return symbols_; }
  bool is_dna() const { return symbols_ == "ACGT"; }

 private:
  std::string symbols_;
  int lookup_[256];
};

enum class Origin { kInDistribution, kOod, kUnknown };

std::string origin_to_string(Origin origin);
Origin origin_from_string(const std::string& name);

struct EncodedSequence {
  std::string id;
  std::optional<int> class_label;
  Origin origin = Origin::kUnknown;
  std::vector<std::uint8_t> symbols;

  int length() const { return static_cast<int>(symbols.size()); }
  std::string decode(const Alphabet& alphabet) const;
};

EncodedSequence encode(const std::string& id, const std::string& raw,
                       const Alphabet& alphabet);

struct FastaRecord {
  std::string id;
  std::string sequence;  // uppercased, lines joined
};

// '>'-header FASTA with wrapped sequence lines. Headers are kept verbatim
// (without the '>'), lowercase bases are uppercased. Throws on sequence data
// before the first header and on empty records.
std::vector<FastaRecord> parse_fasta(std::istream& in);
std::vector<FastaRecord> parse_fasta_file(const std::string& path);
void serialize_fasta(const std::vector<FastaRecord>& records, std::ostream& out,
                     int wrap = 70);

enum class FragmentMode { kRandomStarts, kStrideTiling };

// Samples `count` fragments of length `length` at distinct start positions.
// Fragments containing symbols outside the alphabet (e.g. N) are rejected and
// resampled. Throws if fewer than `count` valid start positions exist.
std::vector<EncodedSequence> fragment(const std::string& genome, int length, int count,
                                      const Alphabet& alphabet, Rng& rng,
                                      FragmentMode mode = FragmentMode::kRandomStarts);

// (#G + #C) / D. Requires the DNA alphabet.
double gc_content(const EncodedSequence& seq, const Alphabet& alphabet);

enum class PerturbSemantics {
  kFullAlphabet,   // selected positions resampled from the whole alphabet
  kOtherSymbols,   // selected positions resampled from the other |A|-1 symbols
};

struct PerturbConfig {
  double mutation_rate = 0.0;
  PerturbSemantics semantics = PerturbSemantics::kFullAlphabet;
};

// Positions selected i.i.d. Bernoulli(mutation_rate) and resampled per the
// configured semantics. Length preserved; mu = 0 is the identity.
EncodedSequence perturb(const EncodedSequence& seq, const PerturbConfig& config,
                        const Alphabet& alphabet, Rng& rng);

}  // namespace seqlr

#endif  // SEQLR_SEQDATA_HPP_
