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

#include "kernels.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace scgpr
{

const char *family_name(KernelFamily family) noexcept
{
    switch (family)
    {
    case KernelFamily::SC: return "SC";
    case KernelFamily::RBF: return "RBF";
    case KernelFamily::Matern15: return "Matern15";
    case KernelFamily::RQ: return "RQ";
    }
    return "?";
}

KernelSpec KernelSpec::spatial_correlation(std::shared_ptr<const ChannelCovariance> cov)
{
    KernelSpec spec;
    spec.family = KernelFamily::SC;
    spec.sc_cov = std::move(cov);
    return spec;
}

HyperBounds default_bounds(KernelFamily family)
{
    HyperBounds b;
    if (family == KernelFamily::RQ)
        b.lengthscale = {1e-2, 5.0};
    return b;
}

KernelSpec default_init(KernelFamily family)
{
    KernelSpec spec;
    spec.family = family;
    return spec;
}

void validate(const KernelSpec &spec, const GridShape &shape)
{
    if (spec.family == KernelFamily::SC)
    {
        require(spec.sc_cov != nullptr, Errc::invalid_argument, "SC kernel requires a channel covariance");
        require(spec.sc_cov->shape() == shape, Errc::shape_mismatch, "SC covariance does not match the grid shape");
        return;
    }
    require(spec.scale > 0.0 && std::isfinite(spec.scale), Errc::invalid_argument, "kernel scale must be positive");
    require(spec.lengthscale > 0.0 && std::isfinite(spec.lengthscale), Errc::invalid_argument,
            "kernel lengthscale must be positive");
    if (spec.family == KernelFamily::RQ)
        require(spec.rq_alpha > 0.0 && std::isfinite(spec.rq_alpha), Errc::invalid_argument,
                "RQ shape alpha must be positive");
}

double distance_kernel(const KernelSpec &spec, double distance)
{
    const double l = spec.lengthscale;
    switch (spec.family)
    {
    case KernelFamily::RBF: return spec.scale * std::exp(-distance * distance / (2.0 * l * l));
    case KernelFamily::Matern15:
    {
        const double a = std::sqrt(3.0) * distance / l;
        return spec.scale * (1.0 + a) * std::exp(-a);
    }
    case KernelFamily::RQ:
        return spec.scale * std::pow(1.0 + distance * distance / (2.0 * spec.rq_alpha * l * l), -spec.rq_alpha);
    case KernelFamily::SC: break;
    }
    fail(Errc::invalid_argument, "SC is not a distance kernel");
}

namespace
{

void check_on_grid(GridIndex z, const GridShape &shape)
{
    require(z.r >= 0 && z.r < shape.n_rx && z.t >= 0 && z.t < shape.n_tx, Errc::invalid_argument,
            "grid index (" + std::to_string(z.r) + ", " + std::to_string(z.t) + ") is off the grid");
}

} // namespace

cd kernel_eval(const KernelSpec &spec, GridIndex z, GridIndex z2, const GridShape &shape)
{
    validate(spec, shape);
    check_on_grid(z, shape);
    check_on_grid(z2, shape);
    if (spec.family == KernelFamily::SC)
        return spec.sc_cov->at(z, z2);
    const double dr = z.r - z2.r;
    const double dt = z.t - z2.t;
    return distance_kernel(spec, std::sqrt(dr * dr + dt * dt));
}

CMatrix kernel_matrix(const KernelSpec &spec, const std::vector<GridIndex> &a, const std::vector<GridIndex> &b,
                      const GridShape &shape)
{
    validate(spec, shape);
    for (const auto &z : a)
        check_on_grid(z, shape);
    for (const auto &z : b)
        check_on_grid(z, shape);

    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    CMatrix k(na, nb);
    if (spec.family == KernelFamily::SC)
    {
        const CMatrix &r = spec.sc_cov->matrix();
        std::vector<Eigen::Index> ia(a.size()), ib(b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            ia[i] = shape.vec_index(a[i].r, a[i].t);
        for (std::size_t j = 0; j < b.size(); ++j)
            ib[j] = shape.vec_index(b[j].r, b[j].t);
        k = r(ia, ib);
        return k;
    }

    // Stationary: tabulate the profile over the squared integer distances.
    const int max_d2 = (shape.n_rx - 1) * (shape.n_rx - 1) + (shape.n_tx - 1) * (shape.n_tx - 1);
    std::vector<double> table(max_d2 + 1);
    for (int d2 = 0; d2 <= max_d2; ++d2)
        table[d2] = distance_kernel(spec, std::sqrt(static_cast<double>(d2)));
    for (Eigen::Index j = 0; j < nb; ++j)
        for (Eigen::Index i = 0; i < na; ++i)
        {
            const int dr = a[i].r - b[j].r;
            const int dt = a[i].t - b[j].t;
            k(i, j) = table[dr * dr + dt * dt];
        }
    return k;
}

GramSet gram(const KernelSpec &spec, const TrainingSet &train, const TestSet &test)
{
    require(train.shape == test.shape, Errc::shape_mismatch, "training and test sets live on different grids");
    require(static_cast<Eigen::Index>(train.inputs.size()) == train.values.size(), Errc::shape_mismatch,
            "training inputs and values differ in length");
    GramSet g;
    g.k_train = kernel_matrix(spec, train.inputs, train.inputs, train.shape);
    g.k_cross = kernel_matrix(spec, train.inputs, test.inputs, train.shape);
    g.k_test = kernel_matrix(spec, test.inputs, test.inputs, train.shape);
    return g;
}

} // namespace scgpr
