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

#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "core/covariance.hpp"
#include "core/linalg.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace scgpr;
constexpr double pi = std::numbers::pi;

TEST(SideCorrelation, MatchesTrapezoidQuadrature)
{
    const int n = 12;
    for (auto [center, spread] : {std::pair{pi / 3, pi / 6}, std::pair{0.0, pi / 6}, std::pair{0.3, pi}})
    {
        const CMatrix r = side_correlation(n, 0.5, center, spread);
        for (int lag : {1, 4, 11})
            EXPECT_LT(std::abs(r(lag, 0) - oracle::side_entry(lag, 0.5, center, spread)), 1e-9)
                << "lag " << lag << " center " << center;
    }
}

TEST(SideCorrelation, ToeplitzHermitianUnitDiagonalPsd)
{
    const CMatrix r = side_correlation(20, 0.5, pi / 3, pi / 6);
    for (int i = 0; i < 20; ++i)
        EXPECT_EQ(r(i, i), cd(1.0, 0.0));
    for (int i = 1; i < 20; ++i)
        for (int j = 1; j < 20; ++j)
            EXPECT_EQ(r(i, j), r(i - 1, j - 1));
    EXPECT_TRUE(linalg::is_hermitian(r, 1e-14));
    EXPECT_TRUE(linalg::is_psd(r, 1e-10));
}

TEST(SideCorrelation, BroadsideIsReal)
{
    // Symmetric spread about 0 makes the integrand's imaginary part odd.
    const CMatrix r = side_correlation(6, 0.5, 0.0, pi / 4);
    EXPECT_LT(r.imag().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SideCorrelation, RejectsBadArguments)
{
    EXPECT_ERRC(side_correlation(0, 0.5, 0.0, 0.1), Errc::invalid_argument);
    EXPECT_ERRC(side_correlation(4, 0.5, 0.0, 0.0), Errc::invalid_argument);
    EXPECT_ERRC(side_correlation(4, 0.5, 0.0, 4.0), Errc::invalid_argument);
    EXPECT_ERRC(side_correlation(4, -1.0, 0.0, 0.1), Errc::invalid_argument);
}

TEST(Kronecker, MatchesIndexFormula)
{
    const CMatrix r_tx = side_correlation(4, 0.5, 0.4, pi / 5);
    const CMatrix r_rx = side_correlation(3, 0.5, -0.2, pi / 7);
    const ChannelCovariance cov = kronecker_covariance(r_tx, r_rx);
    EXPECT_EQ(cov.shape(), (GridShape{3, 4}));
    EXPECT_EQ(cov.matrix(), oracle::kronecker_by_index(r_tx, r_rx));
    EXPECT_EQ(cov.at({1, 2}, {0, 3}), r_rx(1, 0) * r_tx(3, 2));
}

TEST(Kronecker, RejectsIndefiniteFactor)
{
    CMatrix bad = CMatrix::Identity(3, 3);
    bad(0, 1) = bad(1, 0) = 2.0;
    EXPECT_ERRC(kronecker_covariance(bad, CMatrix::Identity(2, 2)), Errc::invalid_argument);
}

TEST(Weichselberger, RankOneCouplingReproducesKronecker)
{
    const CMatrix r_tx = side_correlation(5, 0.5, pi / 3, pi / 6);
    const CMatrix r_rx = side_correlation(4, 0.5, pi / 4, pi / 5);
    Eigen::SelfAdjointEigenSolver<CMatrix> tx(r_tx.transpose()), rx(r_rx);
    const RMatrix omega = rx.eigenvalues().cwiseMax(0.0) * tx.eigenvalues().cwiseMax(0.0).transpose();
    const ChannelCovariance w = weichselberger_covariance(tx.eigenvectors(), rx.eigenvectors(), omega);
    const ChannelCovariance k = kronecker_covariance(r_tx, r_rx);
    EXPECT_LT(testing_util::max_rel_diff(w.matrix(), k.matrix()), 1e-10);
}

TEST(Weichselberger, RawMatrixHasCouplingSpectrum)
{
    std::mt19937_64 gen(9);
    CMatrix u_tx = Eigen::HouseholderQR<CMatrix>(testing_util::random_complex(3, 3, gen)).householderQ();
    CMatrix u_rx = Eigen::HouseholderQR<CMatrix>(testing_util::random_complex(2, 2, gen)).householderQ();
    RMatrix omega(2, 3);
    omega << 1, 2, 3, 4, 5, 6;
    const CMatrix r = weichselberger_matrix(u_tx, u_rx, omega);
    RVector ev = linalg::hermitian_eigenvalues(r);
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(ev[i], i + 1.0, 1e-12);
    omega(0, 0) = -1;
    EXPECT_ERRC(weichselberger_matrix(u_tx, u_rx, omega), Errc::invalid_argument);
    EXPECT_ERRC(weichselberger_matrix(2.0 * u_tx, u_rx, omega.cwiseAbs()), Errc::invalid_argument);
}

TEST(ModelCovariance, BothModelsSatisfyInvariants)
{
    for (auto m : {CovarianceModel::Kronecker, CovarianceModel::Weichselberger})
    {
        const ChannelCovariance cov = model_covariance(m, {6, 5}, ArrayGeometry{}, 7);
        EXPECT_EQ(cov.model(), m);
        const CMatrix &r = cov.matrix();
        EXPECT_TRUE(linalg::is_hermitian(r, kHermitianTol));
        EXPECT_TRUE(linalg::is_psd(r, kPsdTol));
        EXPECT_LT((r.diagonal().array() - 1.0).abs().maxCoeff(), kUnitDiagTol);
    }
}

TEST(ModelCovariance, CouplingSeedChangesOnlyWeichselberger)
{
    const ArrayGeometry g;
    EXPECT_EQ(model_covariance(CovarianceModel::Kronecker, {4, 4}, g, 1).matrix(),
              model_covariance(CovarianceModel::Kronecker, {4, 4}, g, 2).matrix());
    EXPECT_NE(model_covariance(CovarianceModel::Weichselberger, {4, 4}, g, 1).matrix(),
              model_covariance(CovarianceModel::Weichselberger, {4, 4}, g, 2).matrix());
}

TEST(ChannelCovariance, CreateValidatesInvariants)
{
    std::mt19937_64 gen(11);
    const CMatrix good = testing_util::random_correlation(6, 2, gen);
    EXPECT_NO_THROW(ChannelCovariance::create({3, 2}, good, CovarianceModel::Custom));
    EXPECT_ERRC(ChannelCovariance::create({2, 2}, good, CovarianceModel::Custom), Errc::shape_mismatch);

    CMatrix not_herm = good;
    not_herm(0, 1) += cd(0.0, 1e-3);
    EXPECT_ERRC(ChannelCovariance::create({3, 2}, not_herm, CovarianceModel::Custom), Errc::invalid_argument);

    CMatrix diag = good;
    diag(2, 2) = 1.5;
    EXPECT_ERRC(ChannelCovariance::create({3, 2}, diag, CovarianceModel::Custom), Errc::invalid_argument);

    CMatrix indefinite = CMatrix::Identity(4, 4);
    indefinite(0, 1) = indefinite(1, 0) = 1.5;
    EXPECT_ERRC(ChannelCovariance::create({2, 2}, indefinite, CovarianceModel::Custom), Errc::invalid_argument);
}

TEST(ChannelSampler, EmpiricalCovarianceMatchesModel)
{
    const ChannelCovariance cov = model_covariance(CovarianceModel::Weichselberger, {3, 3}, ArrayGeometry{}, 3);
    const ChannelSampler sampler(cov);
    const int n = 40000;
    CMatrix acc = CMatrix::Zero(9, 9);
    for (int i = 0; i < n; ++i)
    {
        const CVector u = sampler.draw(static_cast<std::uint64_t>(i) + 1000).vec();
        acc += u * u.adjoint();
    }
    acc /= n;
    // entrywise standard error ~ 1/sqrt(n) = 0.005
    EXPECT_LT((acc - cov.matrix()).cwiseAbs().maxCoeff(), 0.03);
}

TEST(ChannelSampler, RootSquaresToCovariance)
{
    const ChannelCovariance cov = model_covariance(CovarianceModel::Kronecker, {4, 3}, ArrayGeometry{}, 0);
    const ChannelSampler s(cov);
    EXPECT_LT((s.root() * s.root().adjoint() - cov.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(s.draw(5).entries, sample_channel(cov, 5).entries);
}
