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

#include <Eigen/Cholesky>

#include "types.hpp"

namespace scgpr::linalg
{

// Entrywise |a_ij - conj(a_ji)| <= tol * (|a_ij| + |a_ji| + max|a|).
bool is_hermitian(const CMatrix &a, double tol);

// Max-abs deviation of U^H U from the identity.
double unitarity_error(const CMatrix &u);

// Ascending eigenvalues of a Hermitian matrix (lower triangle is used).
RVector hermitian_eigenvalues(const CMatrix &a);

// min eigenvalue >= -tol * max(|max eigenvalue|, tiny)
bool is_psd(const CMatrix &a, double tol);

CMatrix hermitian_part(const CMatrix &a);

/// Cholesky factor of a Hermitian positive-definite matrix, together with
/// the diagonal jitter that had to be added to obtain it.
///
/// Jitter policy: the matrix is first factored as-is. On failure, a diagonal
/// load of 1e-12 times the mean diagonal is added and escalated by factors of
/// ten up to 1e-6 times the mean diagonal; past that, Errc::ill_conditioned
/// is thrown.
struct Cholesky
{
    Eigen::LLT<CMatrix> llt;
    double jitter = 0.0;

    Eigen::Index size() const { return llt.matrixLLT().rows(); }

    // log det of the factored matrix (including any jitter).
    double log_det() const;

    CVector solve(const CVector &b) const { return llt.solve(b); }
    CMatrix solve(const CMatrix &b) const { return llt.solve(b); }

    // L^{-1} b
    CMatrix half_solve(const CMatrix &b) const;
};

Cholesky factor_with_jitter(const CMatrix &a);

// No jitter: throws Errc::not_positive_definite on failure.
Cholesky factor_strict(const CMatrix &a);

inline constexpr double kJitterStart = 1e-12;
inline constexpr double kJitterMax = 1e-6;

} // namespace scgpr::linalg
