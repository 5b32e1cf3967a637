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

#include "types.hpp"

#include <string>

#include "error.hpp"

namespace scgpr
{

const char *errc_name(Errc code) noexcept
{
    switch (code)
    {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::shape_mismatch: return "shape mismatch";
    case Errc::not_positive_definite: return "matrix not positive definite";
    case Errc::ill_conditioned: return "ill-conditioned kernel";
    case Errc::init_failure: return "initialization failure";
    case Errc::io: return "I/O failure";
    }
    return "unknown error";
}

void GridShape::validate() const
{
    require(n_rx >= 1 && n_tx >= 1, Errc::invalid_argument,
            "grid shape must be at least 1x1, got " + std::to_string(n_rx) + "x" + std::to_string(n_tx));
}

CVector ChannelMatrix::vec() const
{
    return Eigen::Map<const CVector>(entries.data(), entries.size());
}

ChannelMatrix ChannelMatrix::from_vec(const GridShape &shape, const CVector &u)
{
    require(u.size() == shape.size(), Errc::shape_mismatch, "vector length does not match grid size");
    ChannelMatrix h{shape, CMatrix(shape.n_rx, shape.n_tx)};
    Eigen::Map<CVector>(h.entries.data(), h.entries.size()) = u;
    return h;
}

} // namespace scgpr
