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

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace scgpr::linalg
{

bool is_hermitian(const CMatrix &a, double tol)
{
    if (a.rows() != a.cols())
        return false;
    const double scale = a.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i)
        {
            const double dev = std::abs(a(i, j) - std::conj(a(j, i)));
            if (dev > tol * (std::abs(a(i, j)) + std::abs(a(j, i)) + scale))
                return false;
        }
    return true;
}

double unitarity_error(const CMatrix &u)
{
    if (u.rows() != u.cols())
        return std::numeric_limits<double>::infinity();
    const CMatrix g = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    return g.cwiseAbs().maxCoeff();
}

RVector hermitian_eigenvalues(const CMatrix &a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, Errc::invalid_argument, "eigenvalue decomposition did not converge");
    return es.eigenvalues();
}

bool is_psd(const CMatrix &a, double tol)
{
    if (a.size() == 0)
        return true;
    const RVector ev = hermitian_eigenvalues(a);
    const double top = std::max(std::abs(ev[ev.size() - 1]), std::numeric_limits<double>::min());
    return ev[0] >= -tol * top;
}

CMatrix hermitian_part(const CMatrix &a) { return 0.5 * (a + a.adjoint()); }

double Cholesky::log_det() const
{
    const auto &m = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        s += std::log(m(i, i).real());
    return 2.0 * s;
}

CMatrix Cholesky::half_solve(const CMatrix &b) const { return llt.matrixL().solve(b); }

namespace
{

bool try_factor(Eigen::LLT<CMatrix> &llt, const CMatrix &a)
{
    llt.compute(a);
    if (llt.info() != Eigen::Success)
        return false;
    const auto &m = llt.matrixLLT();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        const double d = m(i, i).real();
        if (!(d > 0.0) || !std::isfinite(d))
            return false;
    }
    return true;
}

} // namespace

Cholesky factor_strict(const CMatrix &a)
{
    require(a.rows() == a.cols(), Errc::shape_mismatch, "Cholesky needs a square matrix");
    Cholesky c;
    if (!try_factor(c.llt, a))
        fail(Errc::not_positive_definite, "matrix is not positive definite");
    return c;
}

Cholesky factor_with_jitter(const CMatrix &a)
{
    require(a.rows() == a.cols(), Errc::shape_mismatch, "Cholesky needs a square matrix");
    Cholesky c;
    if (try_factor(c.llt, a))
        return c;

    const double mean_diag = a.rows() > 0 ? a.diagonal().real().mean() : 0.0;
    require(mean_diag > 0.0 && std::isfinite(mean_diag), Errc::ill_conditioned,
            "cannot jitter a matrix with non-positive mean diagonal");
    CMatrix loaded = a;
    for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-9); rel *= 10.0)
    {
        const double jitter = rel * mean_diag;
        loaded.diagonal() = a.diagonal().array() + cd(jitter, 0.0);
        if (try_factor(c.llt, loaded))
        {
            c.jitter = jitter;
            return c;
        }
    }
    fail(Errc::ill_conditioned, "Cholesky factorization failed after jitter escalation to 1e-6 x mean diagonal");
}

} // namespace scgpr::linalg
