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

#include "estimators.hpp"

#include <set>

#include "error.hpp"
#include "linalg.hpp"

namespace scgpr
{

ChannelMatrix ls_estimate(const CMatrix &y, const CMatrix &pilot)
{
    require(y.cols() == pilot.cols(), Errc::shape_mismatch, "received pilots and pilot matrix differ in length");
    require(pilot.cols() >= pilot.rows(), Errc::invalid_argument, "pilot length must be at least the antenna count");
    const GridShape shape{static_cast<int>(y.rows()), static_cast<int>(pilot.rows())};
    const CMatrix gram = pilot * pilot.adjoint();
    const CMatrix ysh = y * pilot.adjoint();
    const double dev = (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (dev <= 1e-10)
        return {shape, ysh};

    linalg::Cholesky chol;
    try
    {
        chol = linalg::factor_strict(gram);
    }
    catch (const Error &)
    {
        fail(Errc::not_positive_definite, "pilot matrix is rank deficient");
    }
    // Ĥ = Y S^H G^{-1}  <=>  Ĥ^H = G^{-1} S Y^H.
    return {shape, chol.solve(CMatrix(ysh.adjoint())).adjoint()};
}

CMatrix mixing_matrix(const CMatrix &pilot, int n_rx)
{
    require(n_rx >= 1, Errc::invalid_argument, "n_rx must be positive");
    const Eigen::Index nt = pilot.rows();
    const Eigen::Index t = pilot.cols();
    CMatrix a = CMatrix::Zero(t * n_rx, nt * n_rx);
    for (Eigen::Index j = 0; j < nt; ++j)
        for (Eigen::Index i = 0; i < t; ++i)
            a.block(i * n_rx, j * n_rx, n_rx, n_rx).diagonal().setConstant(pilot(j, i));
    return a;
}

ChannelMatrix mmse_full(const CVector &y, const CMatrix &pilot, const ChannelCovariance &cov, double noise_var)
{
    const GridShape &shape = cov.shape();
    require(pilot.rows() == shape.n_tx, Errc::shape_mismatch, "pilot rows must equal N_t");
    require(y.size() == pilot.cols() * shape.n_rx, Errc::shape_mismatch, "y must have length T N_r");
    require(noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    const CMatrix a = mixing_matrix(pilot, shape.n_rx);
    const CMatrix ra = cov.matrix() * a.adjoint();
    CMatrix g = a * ra;
    g.diagonal().array() += noise_var;
    const linalg::Cholesky chol = linalg::factor_with_jitter(linalg::hermitian_part(g));
    return ChannelMatrix::from_vec(shape, ra * chol.solve(y));
}

ChannelMatrix mmse_full_despread(const CMatrix &y_tilde, const ChannelCovariance &cov, double noise_var)
{
    const GridShape &shape = cov.shape();
    require(y_tilde.rows() == shape.n_rx && y_tilde.cols() == shape.n_tx, Errc::shape_mismatch,
            "de-spread observations must be N_r x N_t");
    require(noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    CMatrix g = cov.matrix();
    g.diagonal().array() += noise_var;
    const linalg::Cholesky chol = linalg::factor_with_jitter(g);
    const CVector y = Eigen::Map<const CVector>(y_tilde.data(), y_tilde.size());
    return ChannelMatrix::from_vec(shape, cov.matrix() * chol.solve(y));
}

RVector mmse_full_error_variance(const ChannelCovariance &cov, double noise_var)
{
    CMatrix g = cov.matrix();
    g.diagonal().array() += noise_var;
    const linalg::Cholesky chol = linalg::factor_with_jitter(g);
    const CMatrix v = chol.half_solve(cov.matrix());
    return (cov.matrix().diagonal().real() - v.colwise().squaredNorm().transpose()).cwiseMax(0.0);
}

RMatrix ObservationVec::selector() const
{
    RMatrix b = RMatrix::Zero(static_cast<Eigen::Index>(selected.size()), n_entries);
    for (std::size_t i = 0; i < selected.size(); ++i)
        b(static_cast<Eigen::Index>(i), selected[i]) = 1.0;
    return b;
}

ObservationVec ObservationVec::from_training(const TrainingSet &train)
{
    ObservationVec obs;
    obs.y = train.values;
    obs.noise_var = train.noise_var;
    obs.n_entries = train.shape.size();
    obs.selected.reserve(train.inputs.size());
    for (const auto &z : train.inputs)
        obs.selected.push_back(train.shape.vec_index(z.r, z.t));
    return obs;
}

SubsampledMmse mmse_subsampled(const ObservationVec &obs, const ChannelCovariance &cov)
{
    require(obs.n_entries == cov.shape().size(), Errc::shape_mismatch, "observation grid does not match covariance");
    require(obs.y.size() == static_cast<Eigen::Index>(obs.selected.size()), Errc::shape_mismatch,
            "observation vector and selector differ in length");
    require(obs.noise_var >= 0.0, Errc::invalid_argument, "noise variance must be non-negative");
    std::set<int> seen;
    for (int s : obs.selected)
        require(s >= 0 && s < obs.n_entries && seen.insert(s).second, Errc::invalid_argument,
                "selector rows must be distinct canonical basis vectors");

    const CMatrix b = obs.selector().cast<cd>();
    const CMatrix &r = cov.matrix();
    const CMatrix rbh = r * b.adjoint();
    CMatrix g = b * rbh;
    g.diagonal().array() += obs.noise_var;
    const linalg::Cholesky chol = linalg::factor_with_jitter(linalg::hermitian_part(g));

    SubsampledMmse out;
    out.jitter = chol.jitter;
    out.estimate = rbh * chol.solve(obs.y);
    const CMatrix v = chol.half_solve(CMatrix(rbh.adjoint()));
    out.error_covariance = linalg::hermitian_part(r - v.adjoint() * v);
    return out;
}

} // namespace scgpr
