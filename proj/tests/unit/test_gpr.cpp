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

#include <random>

#include <gtest/gtest.h>

#include "core/covariance.hpp"
#include "core/estimators.hpp"
#include "core/gpr.hpp"
#include "core/sounding.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace scgpr;

namespace
{

struct Fixture
{
    std::shared_ptr<const ChannelCovariance> cov;
    Observation obs;
    std::vector<int> train_idx, test_idx;
};

Fixture make_setup(GridShape s, int stride, double noise_var, std::uint64_t seed,
                 CovarianceModel model = CovarianceModel::Weichselberger)
{
    Fixture st;
    st.cov = std::make_shared<const ChannelCovariance>(model_covariance(model, s, ArrayGeometry{}, seed));
    const ChannelMatrix h = sample_channel(*st.cov, seed + 1);
    st.obs = observe(h, make_plan(s, stride), noise_var, seed + 2);
    for (auto z : st.obs.train.inputs)
        st.train_idx.push_back(s.vec_index(z.r, z.t));
    for (auto z : st.obs.test.inputs)
        st.test_idx.push_back(s.vec_index(z.r, z.t));
    return st;
}

} // namespace

TEST(Posterior, MatchesJointGaussianConditioning)
{
    for (double nv : {0.01, 0.1, 1.0})
    {
        const Fixture st = make_setup({5, 6}, 2, nv, 3);
        const KernelSpec k = KernelSpec::spatial_correlation(st.cov);
        PosteriorOptions opts;
        opts.full_covariance = true;
        const PosteriorEstimate post = posterior(gram(k, st.obs.train, st.obs.test), st.obs.train.values, nv, opts);
        const auto ref = oracle::condition(st.cov->matrix(), st.train_idx, st.test_idx, st.obs.train.values, nv);
        EXPECT_LT(testing_util::max_rel_diff(post.mean, ref.mean), 1e-10);
        EXPECT_LT(testing_util::max_rel_diff(*post.covariance, ref.cov), 1e-9);
        EXPECT_LT((post.variance - ref.cov.diagonal().real()).cwiseAbs().maxCoeff(), 1e-10);

        const auto self = oracle::condition(st.cov->matrix(), st.train_idx, st.train_idx, st.obs.train.values, nv);
        EXPECT_LT(testing_util::max_rel_diff(post.train_mean, self.mean), 1e-10);
        EXPECT_LT((post.train_variance - self.cov.diagonal().real()).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_EQ(post.jitter, 0.0);
    }
}

TEST(Posterior, ScMeanEqualsSubsampledMmse)
{
    for (int stride : {1, 2, 3, 4})
        for (double nv : {0.01, 0.1, 1.0})
            for (auto model : {CovarianceModel::Kronecker, CovarianceModel::Weichselberger})
            {
                const Fixture st = make_setup({6, 8}, stride, nv, 10 + stride, model);
                const Reconstruction rec = estimate_channel(KernelSpec::spatial_correlation(st.cov), st.obs);
                const SubsampledMmse ref = mmse_subsampled(ObservationVec::from_training(st.obs.train), *st.cov);
                if (rec.jitter == 0.0 && ref.jitter == 0.0)
                    EXPECT_LT(testing_util::max_rel_diff(rec.estimate.vec(), ref.estimate), 1e-10)
                        << "stride " << stride << " nv " << nv;
                EXPECT_LT((Eigen::Map<const RVector>(rec.variance.data(), rec.variance.size()) -
                           ref.error_covariance.diagonal().real())
                              .cwiseAbs()
                              .maxCoeff(),
                          1e-9);
            }
}

TEST(Posterior, PassThroughKeepsObservations)
{
    const Fixture st = make_setup({4, 4}, 2, 0.2, 5);
    const Reconstruction rec =
        estimate_channel(KernelSpec::spatial_correlation(st.cov), st.obs, ObservedEntries::PassThrough);
    for (std::size_t i = 0; i < st.obs.train.inputs.size(); ++i)
    {
        const auto z = st.obs.train.inputs[i];
        EXPECT_EQ(rec.estimate.entries(z.r, z.t), st.obs.train.values[static_cast<Eigen::Index>(i)]);
        EXPECT_EQ(rec.variance(z.r, z.t), 0.2);
    }
}

TEST(Posterior, NoiselessRankDeficientUsesJitter)
{
    // Low-rank covariance with zero noise leaves K singular.
    std::mt19937_64 gen(4);
    const GridShape s{4, 4};
    auto cov = std::make_shared<const ChannelCovariance>(
        ChannelCovariance::create(s, testing_util::random_correlation(16, 2, gen), CovarianceModel::Custom));
    const Observation obs = observe(sample_channel(*cov, 1), make_plan(s, 2), 0.0, 2);
    const Reconstruction rec = estimate_channel(KernelSpec::spatial_correlation(cov), obs);
    EXPECT_GT(rec.jitter, 0.0);
    EXPECT_LE(rec.jitter, 1e-6);
    EXPECT_TRUE(rec.estimate.entries.allFinite());
}

TEST(Posterior, ShapeErrors)
{
    const Fixture st = make_setup({4, 4}, 2, 0.1, 6);
    GramSet g = gram(KernelSpec::spatial_correlation(st.cov), st.obs.train, st.obs.test);
    EXPECT_ERRC(posterior(g, CVector::Zero(3), 0.1), Errc::shape_mismatch);
    EXPECT_ERRC(posterior(g, st.obs.train.values, -1.0), Errc::invalid_argument);
    g.k_test.resize(2, 2);
    EXPECT_ERRC(posterior(g, st.obs.train.values, 0.1), Errc::shape_mismatch);
}

TEST(LogMarginalLikelihood, MatchesDenseOracle)
{
    const Fixture st = make_setup({4, 6}, 2, 0.3, 8);
    for (auto f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        KernelSpec k = default_init(f);
        k.lengthscale = 1.7;
        k.scale = 0.8;
        const CMatrix kk = kernel_matrix(k, st.obs.train.inputs, st.obs.train.inputs, st.obs.train.shape);
        const double got = log_marginal_likelihood(kk, st.obs.train.values, 0.3);
        const double want = oracle::lml(kk, st.obs.train.values, 0.3);
        EXPECT_NEAR(got, want, 1e-9 * std::abs(want));
    }
    const CMatrix sc = gram(KernelSpec::spatial_correlation(st.cov), st.obs.train, st.obs.test).k_train;
    EXPECT_NEAR(log_marginal_likelihood(sc, st.obs.train.values, 0.3), oracle::lml(sc, st.obs.train.values, 0.3),
                1e-9 * std::abs(oracle::lml(sc, st.obs.train.values, 0.3)));
}

TEST(LogMarginalLikelihood, SingularWithoutNoiseThrows)
{
    const CMatrix k = CMatrix::Ones(3, 3);
    EXPECT_ERRC(log_marginal_likelihood(k, CVector::Ones(3), 0.0), Errc::not_positive_definite);
}

TEST(Fit, ImprovesEvidenceAndStaysInBounds)
{
    const Fixture st = make_setup({6, 6}, 2, 0.1, 12, CovarianceModel::Kronecker);
    for (auto f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        const HyperBounds b = default_bounds(f);
        const FitReport r = fit_hyperparameters(f, st.obs.train, default_init(f), b, 30);
        ASSERT_GE(r.lml_trace.size(), 2u);
        EXPECT_GE(r.lml_trace.back(), r.lml_trace.front());
        EXPECT_LE(r.iterations, 30);
        EXPECT_TRUE(b.scale.contains(r.fitted.scale));
        EXPECT_TRUE(b.lengthscale.contains(r.fitted.lengthscale));
        if (f == KernelFamily::RQ)
            EXPECT_TRUE(b.rq_alpha.contains(r.fitted.rq_alpha));
        // reported trace value is the evidence of the fitted spec
        const CMatrix k = kernel_matrix(r.fitted, st.obs.train.inputs, st.obs.train.inputs, st.obs.train.shape);
        EXPECT_NEAR(log_marginal_likelihood(k, st.obs.train.values, 0.1), r.lml_trace.back(),
                    1e-6 * std::abs(r.lml_trace.back()));
    }
}

TEST(Fit, RecoversLengthscaleOfSampledRbfField)
{
    // Draw from an RBF prior and check the fit moves towards the truth.
    const GridShape s{8, 8};
    KernelSpec truth = default_init(KernelFamily::RBF);
    truth.lengthscale = 2.0;
    truth.scale = 1.0;
    std::vector<GridIndex> in;
    for (int t = 0; t < 8; ++t)
        for (int r = 0; r < 8; ++r)
            in.push_back({r, t});
    CMatrix k = kernel_matrix(truth, in, in, s);
    k.diagonal().array() += 1e-8;
    const CMatrix l = k.llt().matrixL();
    std::mt19937_64 gen(3);
    double avg = 0.0;
    const int reps = 8;
    for (int rep = 0; rep < reps; ++rep)
    {
        const CVector u = l * testing_util::random_complex(64, 1, gen) / std::sqrt(2.0);
        TrainingSet train{s, in, u + 0.1 * testing_util::random_complex(64, 1, gen) / std::sqrt(2.0), 0.01};
        avg += std::log(fit_hyperparameters(KernelFamily::RBF, train, default_init(KernelFamily::RBF),
                                            default_bounds(KernelFamily::RBF), 80)
                            .fitted.lengthscale);
    }
    EXPECT_NEAR(std::exp(avg / reps), 2.0, 0.4);
}

TEST(Fit, ErrorCases)
{
    const Fixture st = make_setup({4, 4}, 2, 0.1, 13);
    EXPECT_ERRC(fit_hyperparameters(KernelFamily::SC, st.obs.train, default_init(KernelFamily::RBF),
                                    default_bounds(KernelFamily::RBF), 5),
                Errc::invalid_argument);
    KernelSpec out = default_init(KernelFamily::RBF);
    out.lengthscale = 50.0;
    EXPECT_ERRC(fit_hyperparameters(KernelFamily::RBF, st.obs.train, out, default_bounds(KernelFamily::RBF), 5),
                Errc::invalid_argument);
    // zero noise with coincident inputs: the Gram is singular at the start
    TrainingSet dup{{4, 4}, {{0, 0}, {0, 0}}, CVector::Ones(2), 0.0};
    EXPECT_ERRC(fit_hyperparameters(KernelFamily::RBF, dup, default_init(KernelFamily::RBF),
                                    default_bounds(KernelFamily::RBF), 5),
                Errc::init_failure);
}

TEST(Fit, ZeroIterationsReturnsInit)
{
    const Fixture st = make_setup({4, 4}, 2, 0.1, 14);
    KernelSpec init = default_init(KernelFamily::RQ);
    init.lengthscale = 0.9;
    const FitReport r =
        fit_hyperparameters(KernelFamily::RQ, st.obs.train, init, default_bounds(KernelFamily::RQ), 0);
    EXPECT_EQ(r.fitted.lengthscale, 0.9);
    EXPECT_EQ(r.fitted.scale, init.scale);
    EXPECT_EQ(r.iterations, 0);
}
