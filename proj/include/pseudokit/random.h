// Copyright 2026 The Pseudokit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSEUDOKIT_RANDOM_H_
#define PSEUDOKIT_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace pseudokit {

// mt19937_64 output is fixed by the standard, so seeded runs reproduce across
// toolchains. Distributions below are hand-rolled for the same reason.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Per-document seed: mixes the run seed with a stable hash of `key`.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

// Unbiased integer in [0, n). n must be > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

}  // namespace pseudokit

#endif  // PSEUDOKIT_RANDOM_H_
