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
#include <span>

#include "types.hpp"

namespace scgpr
{

/// 10 log10(||H - Ĥ||_F^2 / ||H||_F^2); -infinity for an exact estimate.
/// Throws Errc::invalid_argument when H is zero.
double nmse_db(const ChannelMatrix &h_true, const ChannelMatrix &h_est);

// chi-square(2) 95% quantile used for credible-ellipse areas.
inline constexpr double kChi2TwoDof95 = 5.991;
// two-sided 95% normal quantile used for per-component intervals.
inline constexpr double kZ95 = 1.96;

struct EllipseStats
{
    double area95 = 0.0;     // pi * 5.991 * sqrt(det Sigma_2)
    double axis_ratio = 1.0; // sqrt(lambda_max / lambda_min); +inf if degenerate
    double coverage = 0.0;   // fraction of +-1.96 sigma intervals hitting the truth
};

/// Streaming form of ellipse_stats so errors can be pooled across trials
/// without storing them.
class EllipseAccumulator
{
  public:
    void add(cd error, double posterior_var);
    void add(std::span<const cd> errors, std::span<const double> posterior_var);
    void merge(const EllipseAccumulator &other);

    std::int64_t count() const noexcept { return n_; }
    EllipseStats stats() const;

  private:
    std::int64_t n_ = 0;
    std::int64_t inside_ = 0; // real and imaginary hits, out of 2n
    double sum_re_ = 0.0, sum_im_ = 0.0;
    double sum_re2_ = 0.0, sum_im2_ = 0.0, sum_reim_ = 0.0;
};

/// Empirical 2x2 covariance of (Re e, Im e) gives the area and axis ratio;
/// coverage uses sigma_re = sigma_im = sqrt(posterior_var / 2) per entry.
EllipseStats ellipse_stats(std::span<const cd> errors, std::span<const double> posterior_var);

/// W = (Ĥ Ĥ^H + (N_t / snr) I)^{-1} Ĥ, columns are the per-stream filters.
CMatrix lmmse_detector(const ChannelMatrix &h_est, double snr);

struct LinkReport
{
    double se_true = 0.0; // bit/s/Hz with the detector built from H
    double se_est = 0.0;  // bit/s/Hz with the detector built from Ĥ
    double relative_se = 0.0;
    RVector sinr; // per stream, detector from Ĥ
};

// Post-equalization SINR of every stream for detector w on channel h.
RVector stream_sinr(const CMatrix &w, const ChannelMatrix &h_true, double snr);

LinkReport spectral_efficiency(const ChannelMatrix &h_true, const ChannelMatrix &h_est, double snr);

} // namespace scgpr
