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

#include "gpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "linalg.hpp"
#include "optim.hpp"

namespace scgpr
{

PosteriorEstimate posterior(const GramSet &grams, const CVector &h, double noise_var, const PosteriorOptions &opts)
{
    const Eigen::Index p = grams.k_train.rows();
    const Eigen::Index m = grams.k_cross.cols();
    require(grams.k_train.cols() == p && grams.k_cross.rows() == p && h.size() == p, Errc::shape_mismatch,
            "training Gram matrix, cross-covariance and observations disagree in size");
    require(grams.k_test.rows() == m && grams.k_test.cols() == m, Errc::shape_mismatch,
            "test Gram matrix does not match the cross-covariance");
    require(noise_var >= 0.0 && std::isfinite(noise_var), Errc::invalid_argument,
            "noise variance must be finite and non-negative");

    CMatrix c = grams.k_train;
    c.diagonal().array() += noise_var;
    const linalg::Cholesky chol = linalg::factor_with_jitter(c);

    PosteriorEstimate out;
    out.jitter = chol.jitter;
    const CVector alpha = chol.solve(h);
    out.mean = grams.k_cross.adjoint() * alpha;

    const CMatrix v = chol.half_solve(grams.k_cross);
    out.variance = (grams.k_test.diagonal().real() - v.colwise().squaredNorm().transpose()).cwiseMax(0.0);
    if (opts.full_covariance)
        out.covariance = linalg::hermitian_part(grams.k_test - v.adjoint() * v);

    out.train_mean = grams.k_train * alpha;
    const CMatrix w = chol.half_solve(grams.k_train);
    out.train_variance = (grams.k_train.diagonal().real() - w.colwise().squaredNorm().transpose()).cwiseMax(0.0);
    return out;
}

double log_marginal_likelihood(const CMatrix &k, const CVector &h, double noise_var)
{
    require(k.rows() == k.cols() && k.rows() == h.size(), Errc::shape_mismatch, "kernel matrix and data disagree");
    CMatrix c = k;
    c.diagonal().array() += noise_var;
    const linalg::Cholesky chol = linalg::factor_strict(c);
    const double quad = chol.half_solve(h).squaredNorm();
    return -quad - chol.log_det() - static_cast<double>(h.size()) * std::log(std::numbers::pi);
}

namespace
{

// Distance kernels are real; factoring the real matrix is 4x cheaper than
// the complex path and gives the same value.
double real_kernel_lml(const RMatrix &k, const CVector &h, double noise_var)
{
    RMatrix c = k;
    c.diagonal().array() += noise_var;
    Eigen::LLT<RMatrix> llt(c);
    if (llt.info() != Eigen::Success)
        return -std::numeric_limits<double>::infinity();
    const auto &l = llt.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i)
    {
        if (!(l(i, i) > 0.0))
            return -std::numeric_limits<double>::infinity();
        log_det += 2.0 * std::log(l(i, i));
    }
    RMatrix parts(h.size(), 2);
    parts.col(0) = h.real();
    parts.col(1) = h.imag();
    const double quad = llt.matrixL().solve(parts).squaredNorm();
    return -quad - log_det - static_cast<double>(h.size()) * std::log(std::numbers::pi);
}

struct ParamLayout
{
    KernelFamily family;
    Eigen::Index dims() const { return family == KernelFamily::RQ ? 3 : 2; }

    RVector pack(const KernelSpec &s) const
    {
        RVector x(dims());
        x[0] = std::log(s.scale);
        x[1] = std::log(s.lengthscale);
        if (dims() == 3)
            x[2] = std::log(s.rq_alpha);
        return x;
    }

    KernelSpec unpack(const RVector &x) const
    {
        KernelSpec s;
        s.family = family;
        s.scale = std::exp(x[0]);
        s.lengthscale = std::exp(x[1]);
        if (dims() == 3)
            s.rq_alpha = std::exp(x[2]);
        return s;
    }
};

void check_in_bounds(const KernelSpec &s, const HyperBounds &b)
{
    require(b.scale.lo > 0.0 && b.scale.lo <= b.scale.hi && b.lengthscale.lo > 0.0 &&
                b.lengthscale.lo <= b.lengthscale.hi && b.rq_alpha.lo > 0.0 && b.rq_alpha.lo <= b.rq_alpha.hi,
            Errc::invalid_argument, "hyperparameter bounds must be positive intervals");
    require(b.scale.contains(s.scale) && b.lengthscale.contains(s.lengthscale) &&
                (s.family != KernelFamily::RQ || b.rq_alpha.contains(s.rq_alpha)),
            Errc::invalid_argument, "initial hyperparameters lie outside their bounds");
}

} // namespace

FitReport fit_hyperparameters(KernelFamily family, const TrainingSet &train, const KernelSpec &init,
                              const HyperBounds &bounds, int max_iters)
{
    require(family != KernelFamily::SC, Errc::invalid_argument, "the SC kernel has no hyperparameters to fit");
    require(max_iters >= 0, Errc::invalid_argument, "iteration budget must be non-negative");
    require(static_cast<Eigen::Index>(train.inputs.size()) == train.values.size() && !train.inputs.empty(),
            Errc::invalid_argument, "training set is empty or inconsistent");
    KernelSpec start = init;
    start.family = family;
    start.sc_cov.reset();
    validate(start, train.shape);
    check_in_bounds(start, bounds);

    const ParamLayout layout{family};
    const auto p = static_cast<Eigen::Index>(train.inputs.size());
    RMatrix dist(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
        {
            const double dr = train.inputs[i].r - train.inputs[j].r;
            const double dt = train.inputs[i].t - train.inputs[j].t;
            dist(i, j) = std::sqrt(dr * dr + dt * dt);
        }

    auto objective = [&](const RVector &x) {
        const KernelSpec s = layout.unpack(x);
        const RMatrix k = dist.unaryExpr([&](double d) { return distance_kernel(s, d); });
        return real_kernel_lml(k, train.values, train.noise_var);
    };

    const RVector x0 = layout.pack(start);
    const double lml0 = objective(x0);
    require(std::isfinite(lml0), Errc::init_failure, "log marginal likelihood is not finite at the initial point");

    RVector lower(layout.dims()), upper(layout.dims());
    lower[0] = std::log(bounds.scale.lo), upper[0] = std::log(bounds.scale.hi);
    lower[1] = std::log(bounds.lengthscale.lo), upper[1] = std::log(bounds.lengthscale.hi);
    if (layout.dims() == 3)
        lower[2] = std::log(bounds.rq_alpha.lo), upper[2] = std::log(bounds.rq_alpha.hi);

    NelderMeadOptions opts;
    opts.max_iters = max_iters;
    const NelderMeadResult nm = nelder_mead_maximize(objective, x0, lower, upper, opts);

    FitReport report;
    report.fitted = max_iters == 0 ? start : layout.unpack(nm.x);
    // exp(log(x)) can land one ulp outside the box.
    report.fitted.scale = std::clamp(report.fitted.scale, bounds.scale.lo, bounds.scale.hi);
    report.fitted.lengthscale = std::clamp(report.fitted.lengthscale, bounds.lengthscale.lo, bounds.lengthscale.hi);
    if (family == KernelFamily::RQ)
        report.fitted.rq_alpha = std::clamp(report.fitted.rq_alpha, bounds.rq_alpha.lo, bounds.rq_alpha.hi);
    report.lml_trace = nm.trace;
    report.iterations = nm.iterations;
    report.evaluations = nm.evaluations;
    return report;
}

Reconstruction reconstruct(const TrainingSet &train, const TestSet &test, const PosteriorEstimate &post,
                           ObservedEntries mode)
{
    require(train.shape == test.shape, Errc::shape_mismatch, "training and test sets live on different grids");
    require(post.mean.size() == static_cast<Eigen::Index>(test.inputs.size()) &&
                post.train_mean.size() == static_cast<Eigen::Index>(train.inputs.size()),
            Errc::shape_mismatch, "posterior does not match the training/test split");

    const GridShape &shape = train.shape;
    Reconstruction out;
    out.estimate = {shape, CMatrix::Zero(shape.n_rx, shape.n_tx)};
    out.variance = RMatrix::Zero(shape.n_rx, shape.n_tx);
    out.jitter = post.jitter;
    for (std::size_t i = 0; i < test.inputs.size(); ++i)
    {
        const auto z = test.inputs[i];
        out.estimate.entries(z.r, z.t) = post.mean[static_cast<Eigen::Index>(i)];
        out.variance(z.r, z.t) = post.variance[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t i = 0; i < train.inputs.size(); ++i)
    {
        const auto z = train.inputs[i];
        const auto k = static_cast<Eigen::Index>(i);
        if (mode == ObservedEntries::BayesianUpdate)
        {
            out.estimate.entries(z.r, z.t) = post.train_mean[k];
            out.variance(z.r, z.t) = post.train_variance[k];
        }
        else
        {
            out.estimate.entries(z.r, z.t) = train.values[k];
            out.variance(z.r, z.t) = train.noise_var;
        }
    }
    return out;
}

Reconstruction estimate_channel(const KernelSpec &spec, const Observation &obs, ObservedEntries mode)
{
    const GramSet g = gram(spec, obs.train, obs.test);
    const PosteriorEstimate post = posterior(g, obs.train.values, obs.train.noise_var);
    return reconstruct(obs.train, obs.test, post, mode);
}

} // namespace scgpr
