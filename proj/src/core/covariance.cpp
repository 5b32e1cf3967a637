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

#include "covariance.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace scgpr
{

const char *model_name(CovarianceModel model) noexcept
{
    switch (model)
    {
    case CovarianceModel::Kronecker: return "Kronecker";
    case CovarianceModel::Weichselberger: return "Weichselberger";
    case CovarianceModel::Custom: return "Custom";
    }
    return "?";
}

CovarianceModel parse_model(const std::string &name)
{
    if (name == "Kronecker" || name == "kronecker" || name == "K")
        return CovarianceModel::Kronecker;
    if (name == "Weichselberger" || name == "weichselberger" || name == "W")
        return CovarianceModel::Weichselberger;
    fail(Errc::invalid_argument, "unknown covariance model '" + name + "'");
}

namespace
{

void check_structure(const GridShape &shape, const CMatrix &matrix)
{
    shape.validate();
    require(matrix.rows() == shape.size() && matrix.cols() == shape.size(), Errc::shape_mismatch,
            "covariance must be (N_r N_t) x (N_r N_t)");
    require(matrix.allFinite(), Errc::invalid_argument, "covariance has non-finite entries");
    require(linalg::is_hermitian(matrix, kHermitianTol), Errc::invalid_argument, "covariance is not Hermitian");
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
        require(std::abs(matrix(i, i) - 1.0) <= kUnitDiagTol, Errc::invalid_argument,
                "covariance diagonal entry " + std::to_string(i) + " is not 1");
}

} // namespace

ChannelCovariance ChannelCovariance::create(const GridShape &shape, CMatrix matrix, CovarianceModel model)
{
    check_structure(shape, matrix);
    require(linalg::is_psd(matrix, kPsdTol), Errc::invalid_argument, "covariance is not positive semidefinite");
    return ChannelCovariance(shape, std::move(matrix), model);
}

ChannelCovariance ChannelCovariance::create_psd_by_construction(const GridShape &shape, CMatrix matrix,
                                                                CovarianceModel model)
{
    check_structure(shape, matrix);
    return ChannelCovariance(shape, std::move(matrix), model);
}

CMatrix side_correlation(int n, double spacing_wl, double center_rad, double spread_rad)
{
    require(n >= 1, Errc::invalid_argument, "array size must be positive");
    require(spread_rad > 0.0 && spread_rad <= std::numbers::pi, Errc::invalid_argument,
            "angular spread must lie in (0, pi]");
    require(spacing_wl > 0.0, Errc::invalid_argument, "element spacing must be positive");

    using Rule = boost::math::quadrature::gauss<double, 64>;
    const auto &nodes = Rule::abscissa();
    const auto &weights = Rule::weights();

    // Boost stores the non-negative half of the symmetric rule.
    auto lag_value = [&](int lag) {
        const double k = 2.0 * std::numbers::pi * spacing_wl * lag;
        cd acc = 0.0;
        auto add = [&](double x, double w) {
            const double theta = center_rad + 0.5 * spread_rad * x;
            acc += w * std::polar(1.0, k * std::sin(theta));
        };
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            if (nodes[i] == 0.0)
                add(0.0, weights[i]);
            else
            {
                add(nodes[i], weights[i]);
                add(-nodes[i], weights[i]);
            }
        }
        // d theta = (spread/2) dx and the 1/spread prefactor leave 1/2.
        return 0.5 * acc;
    };

    std::vector<cd> lags(n);
    lags[0] = 1.0;
    for (int d = 1; d < n; ++d)
        lags[d] = lag_value(d);

    CMatrix r(n, n);
    for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p)
            r(p, q) = p >= q ? lags[p - q] : std::conj(lags[q - p]);
    return r;
}

namespace
{

void check_side(const CMatrix &m, const char *what)
{
    require(m.rows() == m.cols() && m.rows() >= 1, Errc::shape_mismatch, std::string(what) + " must be square");
    require(linalg::is_hermitian(m, kHermitianTol), Errc::invalid_argument, std::string(what) + " is not Hermitian");
    require(linalg::is_psd(m, kPsdTol), Errc::invalid_argument, std::string(what) + " is not positive semidefinite");
}

} // namespace

ChannelCovariance kronecker_covariance(const CMatrix &r_tx, const CMatrix &r_rx)
{
    check_side(r_tx, "transmit correlation");
    check_side(r_rx, "receive correlation");
    const GridShape shape{static_cast<int>(r_rx.rows()), static_cast<int>(r_tx.rows())};
    const Eigen::Index nr = shape.n_rx;
    const Eigen::Index nt = shape.n_tx;

    CMatrix r(shape.size(), shape.size());
    for (Eigen::Index t2 = 0; t2 < nt; ++t2)
        for (Eigen::Index t = 0; t < nt; ++t)
            r.block(t * nr, t2 * nr, nr, nr) = r_tx(t2, t) * r_rx;
    // Eigenvalues of a Kronecker product are products of the factors'.
    return ChannelCovariance::create_psd_by_construction(shape, std::move(r), CovarianceModel::Kronecker);
}

CMatrix weichselberger_matrix(const CMatrix &u_tx, const CMatrix &u_rx, const RMatrix &coupling)
{
    require(u_tx.rows() == u_tx.cols() && u_rx.rows() == u_rx.cols(), Errc::shape_mismatch,
            "eigenbases must be square");
    require(coupling.rows() == u_rx.rows() && coupling.cols() == u_tx.rows(), Errc::shape_mismatch,
            "coupling must be N_r x N_t");
    require(linalg::unitarity_error(u_tx) <= kUnitaryTol, Errc::invalid_argument, "transmit eigenbasis is not unitary");
    require(linalg::unitarity_error(u_rx) <= kUnitaryTol, Errc::invalid_argument, "receive eigenbasis is not unitary");
    require((coupling.array() >= 0.0).all() && coupling.allFinite(), Errc::invalid_argument,
            "coupling entries must be finite and non-negative");

    const Eigen::Index nr = u_rx.rows();
    const Eigen::Index nt = u_tx.rows();
    const Eigen::Index n = nr * nt;

    CMatrix basis(n, n);
    for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < nt; ++i)
            basis.block(i * nr, j * nr, nr, nr) = u_tx(i, j) * u_rx;

    const RVector power = Eigen::Map<const RVector>(coupling.data(), n);
    CMatrix scaled = basis * power.cast<cd>().asDiagonal();
    return linalg::hermitian_part(scaled * basis.adjoint());
}

ChannelCovariance weichselberger_covariance(const CMatrix &u_tx, const CMatrix &u_rx, const RMatrix &coupling)
{
    CMatrix r = weichselberger_matrix(u_tx, u_rx, coupling);
    const RVector d = r.diagonal().real();
    require((d.array() > 0.0).all(), Errc::invalid_argument,
            "coupling leaves a channel entry with zero power; cannot normalize");
    const RVector inv_sqrt = d.array().rsqrt();
    r = inv_sqrt.cast<cd>().asDiagonal() * r * inv_sqrt.cast<cd>().asDiagonal();
    r.diagonal().setOnes();
    const GridShape shape{static_cast<int>(u_rx.rows()), static_cast<int>(u_tx.rows())};
    // Non-negative spectrum in a unitary basis, then a diagonal congruence.
    return ChannelCovariance::create_psd_by_construction(shape, std::move(r), CovarianceModel::Weichselberger);
}

RMatrix draw_coupling(const RVector &rx_power, const RVector &tx_power, std::uint64_t seed)
{
    CounterRng rng(seed);
    RMatrix omega(rx_power.size(), tx_power.size());
    for (Eigen::Index t = 0; t < omega.cols(); ++t)
        for (Eigen::Index r = 0; r < omega.rows(); ++r)
            omega(r, t) = rx_power[r] * tx_power[t] * rng.exponential();
    return omega;
}

ChannelCovariance model_covariance(CovarianceModel model, const GridShape &shape, const ArrayGeometry &geometry,
                                   std::uint64_t coupling_seed)
{
    shape.validate();
    const CMatrix r_tx = side_correlation(shape.n_tx, geometry.spacing_wl, geometry.center_tx_rad, geometry.spread_rad);
    const CMatrix r_rx = side_correlation(shape.n_rx, geometry.spacing_wl, geometry.center_rx_rad, geometry.spread_rad);

    switch (model)
    {
    case CovarianceModel::Kronecker: return kronecker_covariance(r_tx, r_rx);
    case CovarianceModel::Weichselberger:
    {
        // Eigenbasis of r_tx^T so that a rank-one coupling reproduces the
        // Kronecker covariance exactly.
        Eigen::SelfAdjointEigenSolver<CMatrix> tx(r_tx.transpose());
        Eigen::SelfAdjointEigenSolver<CMatrix> rx(r_rx);
        const RVector tx_power = tx.eigenvalues().cwiseMax(0.0);
        const RVector rx_power = rx.eigenvalues().cwiseMax(0.0);
        return weichselberger_covariance(tx.eigenvectors(), rx.eigenvectors(),
                                         draw_coupling(rx_power, tx_power, coupling_seed));
    }
    case CovarianceModel::Custom: break;
    }
    fail(Errc::invalid_argument, "model_covariance needs Kronecker or Weichselberger");
}

ChannelSampler::ChannelSampler(const ChannelCovariance &cov) : shape_(cov.shape())
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(cov.matrix());
    require(es.info() == Eigen::Success, Errc::invalid_argument, "covariance eigendecomposition failed");
    const RVector sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = es.eigenvectors() * sqrt_ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

ChannelMatrix ChannelSampler::draw(std::uint64_t seed) const
{
    CounterRng rng(seed);
    const CVector g = complex_normal_vector(rng, shape_.size());
    return ChannelMatrix::from_vec(shape_, root_ * g);
}

ChannelMatrix sample_channel(const ChannelCovariance &cov, std::uint64_t seed) { return ChannelSampler(cov).draw(seed); }

} // namespace scgpr
