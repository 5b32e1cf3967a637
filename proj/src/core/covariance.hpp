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
#include <numbers>
#include <string>

#include "types.hpp"

namespace scgpr
{

enum class CovarianceModel
{
    Kronecker,
    Weichselberger,
    Custom,
};

const char *model_name(CovarianceModel model) noexcept;
CovarianceModel parse_model(const std::string &name);

/// Channel covariance R_H = E[u u^H] over the column-wise vectorized grid.
///
/// Construction validates the invariants: Hermitian (1e-12 relative,
/// entrywise), PSD (min eigenvalue >= -1e-10 max eigenvalue) and unit
/// diagonal (1e-9). Instances are immutable.
class ChannelCovariance
{
  public:
    static ChannelCovariance create(const GridShape &shape, CMatrix matrix, CovarianceModel model);

    // Skips the eigenvalue PSD check; for builders whose construction
    // already guarantees it. Hermitian and unit-diagonal checks still run.
    static ChannelCovariance create_psd_by_construction(const GridShape &shape, CMatrix matrix,
                                                        CovarianceModel model);

    const GridShape &shape() const noexcept { return shape_; }
    const CMatrix &matrix() const noexcept { return matrix_; }
    CovarianceModel model() const noexcept { return model_; }

    cd at(GridIndex a, GridIndex b) const { return matrix_(shape_.vec_index(a.r, a.t), shape_.vec_index(b.r, b.t)); }

  private:
    ChannelCovariance(const GridShape &shape, CMatrix matrix, CovarianceModel model)
        : shape_(shape), matrix_(std::move(matrix)), model_(model)
    {
    }

    GridShape shape_;
    CMatrix matrix_;
    CovarianceModel model_;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitDiagTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-10;

/// Uniform power-angular-spectrum correlation of a uniform linear array:
///   R[p,q] = (1/spread) * integral over [center - spread/2, center + spread/2]
///            of exp(j 2 pi spacing (p - q) sin(theta)) d theta,
/// evaluated with 64-point Gauss-Legendre quadrature. Hermitian Toeplitz
/// with unit diagonal.
CMatrix side_correlation(int n, double spacing_wl, double center_rad, double spread_rad);

/// R_H = transpose(r_tx) (x) r_rx, so that
/// R_H[(r,t),(r',t')] = r_rx[r,r'] * r_tx[t',t].
ChannelCovariance kronecker_covariance(const CMatrix &r_tx, const CMatrix &r_rx);

/// (u_tx (x) u_rx) diag(vec(coupling)) (u_tx (x) u_rx)^H before any
/// normalization. coupling is N_r x N_t, vectorized column-wise.
CMatrix weichselberger_matrix(const CMatrix &u_tx, const CMatrix &u_rx, const RMatrix &coupling);

/// Weichselberger covariance rescaled as D^{-1/2} R D^{-1/2}, D = diag(R),
/// so every entry has unit power.
ChannelCovariance weichselberger_covariance(const CMatrix &u_tx, const CMatrix &u_rx, const RMatrix &coupling);

/// Coupling matrix Omega[r,t] = rx_power[r] * tx_power[t] * E[r,t] with
/// E i.i.d. unit-rate exponential drawn from seed.
RMatrix draw_coupling(const RVector &rx_power, const RVector &tx_power, std::uint64_t seed);

/// Array/propagation parameters shared by both sides of the link.
struct ArrayGeometry
{
    double spacing_wl = 0.5;
    double center_tx_rad = std::numbers::pi / 3.0;
    double center_rx_rad = std::numbers::pi / 3.0;
    double spread_rad = std::numbers::pi / 6.0;
};

/// Model covariance for the experiment: side correlations from geometry;
/// Kronecker uses them directly, Weichselberger uses their eigenbases
/// (of r_rx and r_tx^T) with a coupling drawn from coupling_seed.
ChannelCovariance model_covariance(CovarianceModel model, const GridShape &shape, const ArrayGeometry &geometry,
                                   std::uint64_t coupling_seed);

/// Draws u = R_H^{1/2} g, g ~ CN(0, I). The Hermitian square root comes from
/// an eigendecomposition with negative eigenvalues clamped to zero and is
/// computed once per sampler.
class ChannelSampler
{
  public:
    explicit ChannelSampler(const ChannelCovariance &cov);

    ChannelMatrix draw(std::uint64_t seed) const;
    const CMatrix &root() const noexcept { return root_; }

  private:
    GridShape shape_;
    CMatrix root_;
};

ChannelMatrix sample_channel(const ChannelCovariance &cov, std::uint64_t seed);

} // namespace scgpr
