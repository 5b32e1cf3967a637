// SPDX-License-Identifier: Apache-2.0
//
// scgpr: correlated-MIMO channel estimation with spatial-correlation kernels
// Copyright (C) 2026 The scgpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>

#include "types.hpp"

namespace scgpr
{

// SplitMix64 finalizer. Used both as the output function of CounterRng and
// as the hash that derives sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// seed XOR hash(stream): independent sub-stream for a counter value.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return seed ^ mix64(stream + 0x9E3779B97F4A7C15ULL);
}

/// Counter-based 64-bit generator: the i-th output (i = 1, 2, ...) is
/// mix64(seed + i * 0x9E3779B97F4A7C15), i.e. the SplitMix64 sequence.
/// Normal deviates use Box-Muller on two consecutive uniforms, so the stream
/// is reproducible from this description alone.
class CounterRng
{
  public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    std::uint64_t next_u64() noexcept
    {
        ++counter_;
        return mix64(seed_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential() noexcept;

    // Proper complex Gaussian CN(0, variance): real and imaginary parts are
    // i.i.d. N(0, variance / 2).
    cd complex_normal(double variance = 1.0) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

CVector complex_normal_vector(CounterRng &rng, Eigen::Index n, double variance = 1.0);

} // namespace scgpr
