// Copyright 2026 The groundvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GROUNDVEC_RANDOM_H_
#define GROUNDVEC_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace groundvec {

using Rng = std::mt19937_64;

// Stream identifiers used to split one user seed into independent
// per-stage generators.
enum class Stream : std::uint32_t {
  kPretrain = 1,
  kClustering = 2,
  kGrounding = 3,
  kParaphrase = 4,
};

// Deterministic generator for (seed, stream, substream). std::seed_seq has a
// fully specified mixing algorithm, so results do not depend on the library.
Rng MakeRng(std::uint64_t seed, std::uint32_t stream,
            std::uint32_t substream = 0);
inline Rng MakeRng(std::uint64_t seed, Stream stream,
                   std::uint32_t substream = 0) {
  return MakeRng(seed, static_cast<std::uint32_t>(stream), substream);
}

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n must be positive.
std::size_t UniformIndex(Rng& rng, std::size_t n);

// Fisher-Yates shuffle driven by UniformIndex.
template <typename It>
void Shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = UniformIndex(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace groundvec

#endif  // GROUNDVEC_RANDOM_H_
