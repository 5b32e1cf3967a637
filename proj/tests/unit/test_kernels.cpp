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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "core/covariance.hpp"
#include "core/kernels.hpp"
#include "core/linalg.hpp"
#include "core/sounding.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace scgpr;

namespace
{

std::shared_ptr<const ChannelCovariance> random_cov(GridShape s, int rank, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    return std::make_shared<const ChannelCovariance>(ChannelCovariance::create(
        s, testing_util::random_correlation(s.size(), rank, gen), CovarianceModel::Custom));
}

std::vector<GridIndex> all_inputs(GridShape s)
{
    std::vector<GridIndex> v;
    for (int t = 0; t < s.n_tx; ++t)
        for (int r = 0; r < s.n_rx; ++r)
            v.push_back({r, t});
    return v;
}

} // namespace

TEST(Kernels, ScReadsCovarianceEntry)
{
    const GridShape s{3, 4};
    auto cov = random_cov(s, 5, 1);
    const KernelSpec k = KernelSpec::spatial_correlation(cov);
    // (r, t) -> r + t N_r
    EXPECT_EQ(kernel_eval(k, {2, 1}, {0, 3}, s), cov->matrix()(2 + 1 * 3, 0 + 3 * 3));
    EXPECT_EQ(kernel_matrix(k, all_inputs(s), all_inputs(s), s), cov->matrix());
}

TEST(Kernels, ScIgnoresDistanceHyperparameters)
{
    const GridShape s{2, 3};
    auto cov = random_cov(s, 3, 2);
    KernelSpec a = KernelSpec::spatial_correlation(cov), b = a;
    b.scale = 7.0;
    b.lengthscale = 0.01;
    EXPECT_EQ(kernel_matrix(a, all_inputs(s), all_inputs(s), s), kernel_matrix(b, all_inputs(s), all_inputs(s), s));
}

TEST(Kernels, MaternMatchesBesselForm)
{
    KernelSpec k = default_init(KernelFamily::Matern15);
    k.scale = 1.7;
    k.lengthscale = 2.3;
    for (double d : {0.0, 0.5, 1.0, std::sqrt(2.0), 3.0, 10.0})
    {
        const double want = oracle::matern(d, k.lengthscale, k.scale);
        EXPECT_NEAR(distance_kernel(k, d), want, 1e-12 * k.scale) << d;
    }
}

TEST(Kernels, RbfAndRqFormulas)
{
    KernelSpec rbf = default_init(KernelFamily::RBF);
    rbf.scale = 2.0;
    rbf.lengthscale = 1.5;
    EXPECT_DOUBLE_EQ(distance_kernel(rbf, 0.0), 2.0);
    EXPECT_NEAR(distance_kernel(rbf, 2.0), 2.0 * std::exp(-4.0 / (2 * 2.25)), 1e-15);

    KernelSpec rq = default_init(KernelFamily::RQ);
    rq.scale = 2.0;
    rq.lengthscale = 1.5;
    rq.rq_alpha = 0.7;
    EXPECT_NEAR(distance_kernel(rq, 2.0), 2.0 * std::pow(1 + 4.0 / (2 * 0.7 * 2.25), -0.7), 1e-15);
    // large alpha approaches the RBF
    rq.rq_alpha = 1e7;
    EXPECT_NEAR(distance_kernel(rq, 2.0), distance_kernel(rbf, 2.0), 1e-6);
}

TEST(Kernels, DistanceIsJointEuclideanOnGrid)
{
    const GridShape s{5, 5};
    KernelSpec k = default_init(KernelFamily::RBF);
    k.lengthscale = 1.0;
    EXPECT_NEAR(kernel_eval(k, {0, 0}, {3, 4}, s).real(), std::exp(-25.0 / 2), 1e-15);
    EXPECT_EQ(kernel_eval(k, {0, 0}, {3, 4}, s).imag(), 0.0);
}

TEST(Kernels, DistanceKernelMatrixMatchesPointwise)
{
    const GridShape s{4, 5};
    for (auto f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        KernelSpec k = default_init(f);
        k.lengthscale = 1.3;
        const auto in = all_inputs(s);
        const CMatrix m = kernel_matrix(k, in, in, s);
        for (std::size_t i = 0; i < in.size(); ++i)
            for (std::size_t j = 0; j < in.size(); ++j)
                ASSERT_NEAR(std::abs(m(i, j) - kernel_eval(k, in[i], in[j], s)), 0.0, 1e-14);
    }
}

TEST(Kernels, ScGramIsSelectionOfCovariance)
{
    const GridShape s{4, 4};
    auto cov = random_cov(s, 6, 3);
    const SoundingPlan plan = make_plan(s, 2);
    const Observation obs = observe(ChannelMatrix{s, CMatrix::Zero(4, 4)}, plan, 0.1, 0);
    const GramSet g = gram(KernelSpec::spatial_correlation(cov), obs.train, obs.test);

    std::vector<int> tr, te;
    for (auto z : obs.train.inputs)
        tr.push_back(s.vec_index(z.r, z.t));
    for (auto z : obs.test.inputs)
        te.push_back(s.vec_index(z.r, z.t));
    const CMatrix et = oracle::selection(16, tr), es = oracle::selection(16, te);
    EXPECT_EQ(g.k_train, CMatrix(et.adjoint() * cov->matrix() * et));
    EXPECT_EQ(g.k_cross, CMatrix(et.adjoint() * cov->matrix() * es));
    EXPECT_EQ(g.k_test, CMatrix(es.adjoint() * cov->matrix() * es));
}

TEST(Kernels, DistanceGramsArePsd)
{
    const GridShape s{6, 6};
    const auto in = all_inputs(s);
    for (auto f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        KernelSpec k = default_init(f);
        k.lengthscale = 2.0;
        EXPECT_TRUE(linalg::is_psd(kernel_matrix(k, in, in, s), 1e-10)) << family_name(f);
    }
}

TEST(Kernels, ValidationErrors)
{
    const GridShape s{3, 3};
    KernelSpec sc;
    sc.family = KernelFamily::SC;
    EXPECT_ERRC(validate(sc, s), Errc::invalid_argument);
    EXPECT_ERRC(validate(KernelSpec::spatial_correlation(random_cov({2, 2}, 2, 4)), s), Errc::shape_mismatch);

    KernelSpec rq = default_init(KernelFamily::RQ);
    rq.rq_alpha = 0.0;
    EXPECT_ERRC(validate(rq, s), Errc::invalid_argument);
    KernelSpec rbf = default_init(KernelFamily::RBF);
    rbf.lengthscale = -1.0;
    EXPECT_ERRC(validate(rbf, s), Errc::invalid_argument);
    EXPECT_ERRC(kernel_eval(default_init(KernelFamily::RBF), {3, 0}, {0, 0}, s), Errc::invalid_argument);
}

TEST(Kernels, DefaultBoundsAndInit)
{
    const HyperBounds b = default_bounds(KernelFamily::RQ);
    EXPECT_EQ(b.lengthscale.hi, 5.0);
    EXPECT_EQ(default_bounds(KernelFamily::RBF).lengthscale.hi, 10.0);
    EXPECT_EQ(b.scale.lo, 1e-2);
    EXPECT_EQ(b.scale.hi, 1e2);
    EXPECT_EQ(b.rq_alpha.lo, 0.1);
    const KernelSpec k = default_init(KernelFamily::RQ);
    EXPECT_EQ(k.scale, 1.0);
    EXPECT_EQ(k.lengthscale, 0.5);
    EXPECT_EQ(k.rq_alpha, 0.5);
}
