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

#include "metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "linalg.hpp"

namespace scgpr
{

double nmse_db(const ChannelMatrix &h_true, const ChannelMatrix &h_est)
{
    require(h_true.entries.rows() == h_est.entries.rows() && h_true.entries.cols() == h_est.entries.cols(),
            Errc::shape_mismatch, "true and estimated channels differ in shape");
    const double power = h_true.entries.squaredNorm();
    require(power > 0.0, Errc::invalid_argument, "true channel is zero; NMSE undefined");
    const double err = (h_true.entries - h_est.entries).squaredNorm();
    if (err == 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(err / power);
}

void EllipseAccumulator::add(cd error, double posterior_var)
{
    require(posterior_var >= 0.0, Errc::invalid_argument, "posterior variance must be non-negative");
    const double re = error.real();
    const double im = error.imag();
    ++n_;
    sum_re_ += re;
    sum_im_ += im;
    sum_re2_ += re * re;
    sum_im2_ += im * im;
    sum_reim_ += re * im;
    const double half_width = kZ95 * std::sqrt(posterior_var / 2.0);
    inside_ += (std::abs(re) <= half_width) + (std::abs(im) <= half_width);
}

void EllipseAccumulator::add(std::span<const cd> errors, std::span<const double> posterior_var)
{
    require(errors.size() == posterior_var.size(), Errc::shape_mismatch, "errors and variances differ in length");
    for (std::size_t i = 0; i < errors.size(); ++i)
        add(errors[i], posterior_var[i]);
}

void EllipseAccumulator::merge(const EllipseAccumulator &o)
{
    n_ += o.n_;
    inside_ += o.inside_;
    sum_re_ += o.sum_re_;
    sum_im_ += o.sum_im_;
    sum_re2_ += o.sum_re2_;
    sum_im2_ += o.sum_im2_;
    sum_reim_ += o.sum_reim_;
}

EllipseStats EllipseAccumulator::stats() const
{
    require(n_ > 0, Errc::invalid_argument, "ellipse statistics need at least one error");
    const double n = static_cast<double>(n_);
    const double mre = sum_re_ / n;
    const double mim = sum_im_ / n;
    // Unbiased sample covariance; a single sample has zero spread.
    const double denom = n_ > 1 ? n - 1.0 : 1.0;
    const double sxx = n_ > 1 ? std::max(0.0, (sum_re2_ - n * mre * mre) / denom) : 0.0;
    const double syy = n_ > 1 ? std::max(0.0, (sum_im2_ - n * mim * mim) / denom) : 0.0;
    const double sxy = n_ > 1 ? (sum_reim_ - n * mre * mim) / denom : 0.0;

    const double det = std::max(0.0, sxx * syy - sxy * sxy);
    const double half_trace = 0.5 * (sxx + syy);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy));
    const double lmax = half_trace + disc;
    const double lmin = half_trace - disc;

    EllipseStats s;
    s.area95 = std::numbers::pi * kChi2TwoDof95 * std::sqrt(det);
    s.axis_ratio = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();
    s.coverage = static_cast<double>(inside_) / (2.0 * n);
    return s;
}

EllipseStats ellipse_stats(std::span<const cd> errors, std::span<const double> posterior_var)
{
    require(!errors.empty(), Errc::invalid_argument, "ellipse statistics need at least one error");
    EllipseAccumulator acc;
    acc.add(errors, posterior_var);
    return acc.stats();
}

CMatrix lmmse_detector(const ChannelMatrix &h_est, double snr)
{
    require(snr > 0.0 && std::isfinite(snr), Errc::invalid_argument, "SNR must be positive and finite");
    const CMatrix &h = h_est.entries;
    CMatrix g = h * h.adjoint();
    g.diagonal().array() += static_cast<double>(h.cols()) / snr;
    return linalg::factor_with_jitter(linalg::hermitian_part(g)).solve(h);
}

RVector stream_sinr(const CMatrix &w, const ChannelMatrix &h_true, double snr)
{
    const CMatrix &h = h_true.entries;
    require(w.rows() == h.rows() && w.cols() == h.cols(), Errc::shape_mismatch, "detector and channel differ in shape");
    const CMatrix g = w.adjoint() * h; // g(k, j) = w_k^H h_j
    const double noise = static_cast<double>(h.cols()) / snr;
    RVector sinr(h.cols());
    for (Eigen::Index k = 0; k < h.cols(); ++k)
    {
        const double signal = std::norm(g(k, k));
        const double interference = g.row(k).squaredNorm() - signal;
        const double denom = std::max(0.0, interference) + noise * w.col(k).squaredNorm();
        sinr[k] = denom > 0.0 ? signal / denom : 0.0;
    }
    return sinr;
}

LinkReport spectral_efficiency(const ChannelMatrix &h_true, const ChannelMatrix &h_est, double snr)
{
    require(h_true.shape == h_est.shape, Errc::shape_mismatch, "true and estimated channels differ in shape");
    auto se_of = [](const RVector &sinr) { return sinr.unaryExpr([](double s) { return std::log2(1.0 + s); }).sum(); };
    LinkReport rep;
    rep.sinr = stream_sinr(lmmse_detector(h_est, snr), h_true, snr);
    rep.se_est = se_of(rep.sinr);
    rep.se_true = se_of(stream_sinr(lmmse_detector(h_true, snr), h_true, snr));
    rep.relative_se = rep.se_true > 0.0 ? rep.se_est / rep.se_true : 1.0;
    return rep;
}

} // namespace scgpr
