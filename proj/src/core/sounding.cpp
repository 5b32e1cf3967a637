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

#include "sounding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace scgpr
{

int active_count(int n_tx, int stride)
{
    require(n_tx >= 1, Errc::invalid_argument, "n_tx must be positive");
    require(stride >= 1, Errc::invalid_argument, "stride must be at least 1");
    return (n_tx - 1) / stride + 1;
}

CMatrix dft_pilot(int n_rows, int len)
{
    require(n_rows >= 1 && len >= n_rows, Errc::invalid_argument, "pilot length must be at least the row count");
    CMatrix s(n_rows, len);
    const double norm = 1.0 / std::sqrt(static_cast<double>(len));
    for (int tau = 0; tau < len; ++tau)
        for (int i = 0; i < n_rows; ++i)
        {
            // Reduce the exponent modulo len to keep the phase argument small.
            const long long k = (static_cast<long long>(i) * tau) % len;
            s(i, tau) = std::polar(norm, -2.0 * std::numbers::pi * static_cast<double>(k) / len);
        }
    return s;
}

SoundingPlan make_plan(const GridShape &shape, int stride, int pilot_len)
{
    shape.validate();
    require(stride >= 1, Errc::invalid_argument, "stride must be at least 1");
    const int n_active = active_count(shape.n_tx, stride);
    if (pilot_len == 0)
        pilot_len = n_active;
    require(pilot_len >= n_active, Errc::invalid_argument,
            "pilot length " + std::to_string(pilot_len) + " is shorter than the " + std::to_string(n_active) +
                " active antennas");

    SoundingPlan plan;
    plan.shape = shape;
    plan.stride = stride;
    plan.pilot_len = pilot_len;
    plan.active.reserve(n_active);
    for (int i = 0; i < n_active; ++i)
        plan.active.push_back(i * stride);
    plan.pilot = dft_pilot(n_active, pilot_len);
    plan.selection = RMatrix::Zero(shape.n_tx, n_active);
    for (int i = 0; i < n_active; ++i)
        plan.selection(plan.active[i], i) = 1.0;
    return plan;
}

CMatrix noise_matrix(const GridShape &shape, double noise_var, std::uint64_t seed)
{
    CounterRng rng(seed);
    CMatrix w(shape.n_rx, shape.n_tx);
    for (int t = 0; t < shape.n_tx; ++t)
        for (int r = 0; r < shape.n_rx; ++r)
            w(r, t) = rng.complex_normal(noise_var);
    return w;
}

TestSet complement(const SoundingPlan &plan)
{
    TestSet test{plan.shape, {}};
    std::vector<bool> sounded(plan.shape.n_tx, false);
    for (int a : plan.active)
        sounded[a] = true;
    test.inputs.reserve(static_cast<std::size_t>(plan.shape.n_rx) * (plan.shape.n_tx - plan.n_active()));
    for (int t = 0; t < plan.shape.n_tx; ++t)
        if (!sounded[t])
            for (int r = 0; r < plan.shape.n_rx; ++r)
                test.inputs.push_back({r, t});
    return test;
}

Observation split_observations(const CMatrix &y_tilde, const SoundingPlan &plan, double noise_var)
{
    require(y_tilde.rows() == plan.shape.n_rx && y_tilde.cols() == plan.n_active(), Errc::shape_mismatch,
            "de-spread observations must be N_r x n_active");
    require(noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    Observation obs;
    obs.train.shape = plan.shape;
    obs.train.noise_var = noise_var;
    obs.train.inputs.reserve(y_tilde.size());
    obs.train.values.resize(y_tilde.size());
    Eigen::Index n = 0;
    for (int i = 0; i < plan.n_active(); ++i)
        for (int r = 0; r < plan.shape.n_rx; ++r)
        {
            obs.train.inputs.push_back({r, plan.active[i]});
            obs.train.values[n++] = y_tilde(r, i);
        }
    obs.test = complement(plan);
    return obs;
}

Observation observe(const ChannelMatrix &h_true, const SoundingPlan &plan, double noise_var, std::uint64_t seed)
{
    require(h_true.shape == plan.shape, Errc::shape_mismatch, "channel and plan shapes differ");
    require(noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    const CMatrix w = noise_matrix(plan.shape, noise_var, seed);
    CMatrix y_tilde(plan.shape.n_rx, plan.n_active());
    for (int i = 0; i < plan.n_active(); ++i)
        y_tilde.col(i) = h_true.entries.col(plan.active[i]) + w.col(plan.active[i]);
    return split_observations(y_tilde, plan, noise_var);
}

CMatrix transmit(const ChannelMatrix &h_true, const SoundingPlan &plan, double noise_var, std::uint64_t seed)
{
    require(h_true.shape == plan.shape, Errc::shape_mismatch, "channel and plan shapes differ");
    require(noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    CMatrix sounded(plan.shape.n_rx, plan.n_active());
    for (int i = 0; i < plan.n_active(); ++i)
        sounded.col(i) = h_true.entries.col(plan.active[i]);
    CMatrix y = sounded * plan.pilot;
    CounterRng rng(seed);
    for (Eigen::Index tau = 0; tau < y.cols(); ++tau)
        for (Eigen::Index r = 0; r < y.rows(); ++r)
            y(r, tau) += rng.complex_normal(noise_var);
    return y;
}

CMatrix despread(const CMatrix &y, const SoundingPlan &plan)
{
    require(y.rows() == plan.shape.n_rx && y.cols() == plan.pilot_len, Errc::shape_mismatch,
            "received pilots must be N_r x T");
    return y * plan.pilot.adjoint();
}

} // namespace scgpr
