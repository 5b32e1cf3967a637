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

#include "rng.hpp"

#include <cmath>
#include <numbers>

namespace scgpr
{

double CounterRng::exponential() noexcept { return -std::log(uniform()); }

cd CounterRng::complex_normal(double variance) noexcept
{
    const double u1 = uniform();
    const double u2 = uniform();
    // Box-Muller radius for N(0, 1/2) components is sqrt(-ln u1).
    const double radius = std::sqrt(-std::log(u1) * variance);
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

CVector complex_normal_vector(CounterRng &rng, Eigen::Index n, double variance)
{
    CVector out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = rng.complex_normal(variance);
    return out;
}

} // namespace scgpr
