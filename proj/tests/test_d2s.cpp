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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "seqlr/d2s.hpp"
#include "seqlr/rng.hpp"

using namespace seqlr;

namespace {

EncodedSequence random_dna(const std::string& id, int length, Rng& rng,
                           const Alphabet& alphabet) {
  std::string raw;
  for (int i = 0; i < length; ++i) raw.push_back("ACGT"[rng.uniform_int(4)]);
  return encode(id, raw, alphabet);
}

EncodedSequence mutate(const EncodedSequence& base, double rate, Rng& rng,
                       const Alphabet& alphabet) {
  return perturb(base, {rate, PerturbSemantics::kOtherSymbols}, alphabet, rng);
}

}  // namespace

TEST_CASE("identical sequences are at distance zero") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(1);
  const EncodedSequence a = random_dna("a", 500, rng, dna);
  CHECK(d2s_distance(a, a, 6, 0, dna) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("distance is symmetric and bounded") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const EncodedSequence a = random_dna("a", 400, rng, dna);
    const EncodedSequence b = random_dna("b", 400, rng, dna);
    const double ab = d2s_distance(a, b, 5, 0, dna);
    const double ba = d2s_distance(b, a, 5, 0, dna);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("distance grows with mutation load") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(3);
  const EncodedSequence base = random_dna("base", 2000, rng, dna);
  const EncodedSequence light = mutate(base, 0.02, rng, dna);
  const EncodedSequence heavy = mutate(base, 0.40, rng, dna);
  const double d_light = d2s_distance(base, light, 6, 0, dna);
  const double d_heavy = d2s_distance(base, heavy, 6, 0, dna);
  CHECK(d_light < d_heavy);
}

TEST_CASE("markov order parameter is honored") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(4);
  const EncodedSequence a = random_dna("a", 800, rng, dna);
  const EncodedSequence b = random_dna("b", 800, rng, dna);
  const double d0 = d2s_distance(a, b, 5, 0, dna);
  const double d1 = d2s_distance(a, b, 5, 1, dna);
  CHECK(d0 >= 0.0);
  CHECK(d1 >= 0.0);
  CHECK(d1 <= 1.0);
}

TEST_CASE("argument validation") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(5);
  const EncodedSequence a = random_dna("a", 10, rng, dna);
  const EncodedSequence b = random_dna("b", 10, rng, dna);
  CHECK_THROWS(d2s_distance(a, b, 10, 0, dna));  // k >= length
  CHECK_THROWS(d2s_distance(a, b, 3, 3, dna));   // k < m + 1
  CHECK_THROWS(min_distance_to_set(a, {}, 3, 0, dna));
}

TEST_CASE("min distance to set picks the closest reference") {
  const Alphabet dna = Alphabet::dna();
  Rng rng(6);
  const EncodedSequence query = random_dna("q", 1000, rng, dna);
  const EncodedSequence close = mutate(query, 0.05, rng, dna);
  const EncodedSequence far = random_dna("far", 1000, rng, dna);
  const double dmin = min_distance_to_set(query, {far, close}, 6, 0, dna);
  CHECK(dmin == doctest::Approx(d2s_distance(query, close, 6, 0, dna)).epsilon(1e-12));
}
