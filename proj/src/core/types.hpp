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

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace scgpr
{

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Antenna grid of N_r receive by N_t transmit elements. Channel entries are
// vectorized column-wise: n = r + t * n_rx (0-based).
struct GridShape
{
    int n_rx = 0;
    int n_tx = 0;

    int size() const { return n_rx * n_tx; }
    int vec_index(int r, int t) const { return r + t * n_rx; }
    void validate() const;

    friend bool operator==(const GridShape &, const GridShape &) = default;
};

// 0-based (r, t) position on the antenna grid.
struct GridIndex
{
    int r = 0;
    int t = 0;

    friend bool operator==(const GridIndex &, const GridIndex &) = default;
};

// N_r x N_t channel realization or estimate.
struct ChannelMatrix
{
    GridShape shape;
    CMatrix entries;

    CVector vec() const;
    static ChannelMatrix from_vec(const GridShape &shape, const CVector &u);
};

} // namespace scgpr
