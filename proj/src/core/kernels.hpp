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

#include <memory>
#include <string>
#include <vector>

#include "covariance.hpp"
#include "sounding.hpp"
#include "types.hpp"

namespace scgpr
{

enum class KernelFamily
{
    SC,
    RBF,
    Matern15,
    RQ,
};

const char *family_name(KernelFamily family) noexcept;

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Kernel choice and hyperparameters. The SC family reads the covariance
/// directly and ignores scale/lengthscale/rq_alpha; the distance families
/// never touch sc_cov.
struct KernelSpec
{
    KernelFamily family = KernelFamily::RBF;
    std::shared_ptr<const ChannelCovariance> sc_cov;
    double scale = 1.0;
    double lengthscale = 0.5;
    double rq_alpha = 0.5;

    static constexpr double matern_nu = 1.5;

    static KernelSpec spatial_correlation(std::shared_ptr<const ChannelCovariance> cov);
};

/// Hyperparameter search box for the learned kernels.
struct HyperBounds
{
    Interval scale{1e-2, 1e2};
    Interval lengthscale{1e-2, 10.0};
    Interval rq_alpha{1e-1, 5.0};
};

// Defaults for RBF/Matern: lengthscale [1e-2, 10]; RQ: [1e-2, 5].
HyperBounds default_bounds(KernelFamily family);
// scale 1, lengthscale 0.5, rq_alpha 0.5.
KernelSpec default_init(KernelFamily family);

void validate(const KernelSpec &spec, const GridShape &shape);

/// k(z, z'). SC: R_H[n, m] with n = r + t N_r. Distance kernels use the
/// Euclidean distance between integer grid coordinates:
///   RBF       scale * exp(-d^2 / (2 l^2))
///   Matern15  scale * (1 + sqrt(3) d / l) exp(-sqrt(3) d / l)
///   RQ        scale * (1 + d^2 / (2 alpha l^2))^(-alpha)
cd kernel_eval(const KernelSpec &spec, GridIndex z, GridIndex z2, const GridShape &shape);

// Distance-kernel profile as a function of d (no grid check).
double distance_kernel(const KernelSpec &spec, double distance);

struct GramSet
{
    CMatrix k_train; // K,    P x P
    CMatrix k_cross; // K_*,  P x M
    CMatrix k_test;  // K_**, M x M
};

// k(a_i, b_j) for all pairs.
CMatrix kernel_matrix(const KernelSpec &spec, const std::vector<GridIndex> &a, const std::vector<GridIndex> &b,
                      const GridShape &shape);

/// Gram matrices for a training/test split. For SC the entries are read out
/// of R_H by index; no products are formed.
GramSet gram(const KernelSpec &spec, const TrainingSet &train, const TestSet &test);

} // namespace scgpr
