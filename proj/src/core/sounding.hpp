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
#include <vector>

#include "types.hpp"

namespace scgpr
{

/// Reduced-pilot sounding plan: every stride-th transmit antenna is active
/// (0-based active[i] = i * stride), the active antennas send the rows of an
/// orthonormal pilot matrix S (n_active x pilot_len) and F = I(:, active)
/// maps them onto the array.
struct SoundingPlan
{
    GridShape shape;
    int stride = 1;
    int pilot_len = 0;
    std::vector<int> active;
    CMatrix pilot;     // S, n_active x pilot_len, S S^H = I
    RMatrix selection; // F, n_tx x n_active

    int n_active() const { return static_cast<int>(active.size()); }
};

// floor((n_tx - 1) / stride) + 1
int active_count(int n_tx, int stride);

/// pilot_len = 0 selects the minimum length T = n_active. S holds the first
/// n_active rows of the T x T unitary DFT matrix.
SoundingPlan make_plan(const GridShape &shape, int stride, int pilot_len = 0);

// First n_rows rows of the unitary len x len DFT matrix.
CMatrix dft_pilot(int n_rows, int len);

/// GPR training data: noisy samples of the sounded channel entries, ordered
/// column-major over (r, active t).
struct TrainingSet
{
    GridShape shape;
    std::vector<GridIndex> inputs;
    CVector values;
    double noise_var = 0.0;
};

/// Unobserved entries, column-major over the columns not in the plan.
struct TestSet
{
    GridShape shape;
    std::vector<GridIndex> inputs;
};

struct Observation
{
    TrainingSet train;
    TestSet test;
};

/// N_r x N_t matrix of i.i.d. CN(0, noise_var) entries drawn column-major.
CMatrix noise_matrix(const GridShape &shape, double noise_var, std::uint64_t seed);

/// De-spread observations H F + W with W[:, i] taken from the full-grid
/// noise_matrix(seed) at column active[i]. Plans with different strides but
/// the same seed therefore share the noise on common columns.
Observation observe(const ChannelMatrix &h_true, const SoundingPlan &plan, double noise_var, std::uint64_t seed);

/// Full pilot transmission Y = H F S + N, N i.i.d. CN(0, noise_var)
/// (N_r x pilot_len).
CMatrix transmit(const ChannelMatrix &h_true, const SoundingPlan &plan, double noise_var, std::uint64_t seed);

// Y S^H
CMatrix despread(const CMatrix &y, const SoundingPlan &plan);

// Training/test split of a de-spread observation matrix (N_r x n_active).
Observation split_observations(const CMatrix &y_tilde, const SoundingPlan &plan, double noise_var);

// Grid entries that are not sounded by plan, column-major.
TestSet complement(const SoundingPlan &plan);

} // namespace scgpr
