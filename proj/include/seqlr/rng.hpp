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

#ifndef SEQLR_RNG_HPP_
#define SEQLR_RNG_HPP_

#include <cstdint>

namespace seqlr {

// Counter-based splitmix64 generator. Standard-library distributions are
// implementation defined, so all sampling helpers live here to keep runs
// bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Rejection sampling, so no modulo bias.
  std::uint64_t uniform_u64(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  int uniform_int(int n) { return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(n))); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  bool bernoulli(double p) { return uniform_real() < p; }

  // Derive an independent stream, e.g. per task index.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    Rng mix(seed ^ (0x6a09e667f3bcc909ULL * (stream + 1)));
    return Rng(mix.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace seqlr

#endif  // SEQLR_RNG_HPP_
