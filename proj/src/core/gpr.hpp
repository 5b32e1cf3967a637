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

#include <optional>
#include <vector>

#include "kernels.hpp"
#include "sounding.hpp"
#include "types.hpp"

namespace scgpr
{

struct PosteriorOptions
{
    // Also form the full M x M posterior covariance (the diagonal is always
    // computed).
    bool full_covariance = false;
};

/// Complex GP posterior at the test inputs, plus the Bayesian update at the
/// training inputs under the same model.
struct PosteriorEstimate
{
    CVector mean;                      // K_*^H (K + s I)^{-1} h
    RVector variance;                  // diag of Sigma_*
    std::optional<CMatrix> covariance; // Sigma_* = K_** - K_*^H (K + s I)^{-1} K_*
    CVector train_mean;                // K (K + s I)^{-1} h
    RVector train_variance;            // diag of K - K (K + s I)^{-1} K
    double jitter = 0.0;               // diagonal load added to K + s I
};

/// One jittered Cholesky factorization of K + noise_var I serves the mean,
/// the variances and the optional full covariance.
PosteriorEstimate posterior(const GramSet &grams, const CVector &h, double noise_var, const PosteriorOptions &opts = {});

/// Proper complex Gaussian log evidence:
///   -h^H C^{-1} h - log det(pi C),  C = K + noise_var I.
/// Throws Errc::not_positive_definite if C cannot be factored.
double log_marginal_likelihood(const CMatrix &k, const CVector &h, double noise_var);

struct FitReport
{
    KernelSpec fitted;
    std::vector<double> lml_trace;
    int iterations = 0;
    int evaluations = 0;
};

/// Maximizes the log evidence over (scale, lengthscale[, rq_alpha]) with
/// bounded Nelder-Mead in log-parameter space (one restart, shared budget of
/// max_iters iterations). The noise variance is taken from the training set.
FitReport fit_hyperparameters(KernelFamily family, const TrainingSet &train, const KernelSpec &init,
                              const HyperBounds &bounds, int max_iters);

enum class ObservedEntries
{
    BayesianUpdate, // observed entries get their posterior mean/variance
    PassThrough,    // observed entries keep the raw observation, variance = noise_var
};

struct Reconstruction
{
    ChannelMatrix estimate;
    RMatrix variance; // per-entry posterior variance, N_r x N_t
    double jitter = 0.0;
};

Reconstruction reconstruct(const TrainingSet &train, const TestSet &test, const PosteriorEstimate &post,
                           ObservedEntries mode = ObservedEntries::BayesianUpdate);

// gram + posterior + reconstruct.
Reconstruction estimate_channel(const KernelSpec &spec, const Observation &obs,
                                ObservedEntries mode = ObservedEntries::BayesianUpdate);

} // namespace scgpr
