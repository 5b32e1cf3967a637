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

#include <vector>

#include "covariance.hpp"
#include "sounding.hpp"
#include "types.hpp"

namespace scgpr
{

/// Ĥ = Y S^H (S S^H)^{-1}. When S S^H = I (1e-10) no system is solved.
/// Throws Errc::not_positive_definite for rank-deficient S.
ChannelMatrix ls_estimate(const CMatrix &y, const CMatrix &pilot);

// A = S^T (x) I_{n_rx}, so that vec(H S) = A vec(H).
CMatrix mixing_matrix(const CMatrix &pilot, int n_rx);

/// Full-array MMSE from raw received pilots y = vec(Y):
///   û = R A^H (A R A^H + noise_var I)^{-1} y.
/// Forms A explicitly: O((T N_r)^3) plus the dense products.
ChannelMatrix mmse_full(const CVector &y, const CMatrix &pilot, const ChannelCovariance &cov, double noise_var);

/// Same estimator for orthonormal-row pilots, from the de-spread Ỹ = Y S^H
/// (N_r x N_t): û = R (R + noise_var I)^{-1} vec(Ỹ).
ChannelMatrix mmse_full_despread(const CMatrix &y_tilde, const ChannelCovariance &cov, double noise_var);

// diag of R - R (R + noise_var I)^{-1} R, the per-entry error variance of
// mmse_full_despread.
RVector mmse_full_error_variance(const ChannelCovariance &cov, double noise_var);

/// y = B u + e with B selecting the entries listed in selected (vectorized,
/// column-major indices).
struct ObservationVec
{
    CVector y;
    std::vector<int> selected;
    double noise_var = 0.0;
    int n_entries = 0; // N_r N_t

    RMatrix selector() const; // B, P x n_entries

    static ObservationVec from_training(const TrainingSet &train);
};

struct SubsampledMmse
{
    CVector estimate;        // û, length N_r N_t
    CMatrix error_covariance; // C = R - R B^H (B R B^H + s I)^{-1} B R
    double jitter = 0.0;
};

/// Linear MMSE estimate of the whole vectorized channel from the selected
/// entries, computed from the explicit selector products.
SubsampledMmse mmse_subsampled(const ObservationVec &obs, const ChannelCovariance &cov);

} // namespace scgpr
