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

#include <functional>
#include <vector>

#include "types.hpp"

namespace scgpr
{

struct NelderMeadOptions
{
    int max_iters = 50;
    double initial_step = 0.5;
    double ftol = 1e-9;
    double xtol = 1e-6;
    // Fresh simplexes built around the incumbent after convergence, drawn
    // from the same iteration budget.
    int restarts = 1;
};

struct NelderMeadResult
{
    RVector x;
    double value = 0.0;
    // trace[0] = f(x0); trace[k] = best value after iteration k.
    std::vector<double> trace;
    int iterations = 0;
    int evaluations = 0;
};

/// Maximizes f inside the box [lower, upper] with the Nelder-Mead simplex
/// method. Trial points are clamped onto the box; non-finite objective
/// values count as -infinity.
NelderMeadResult nelder_mead_maximize(const std::function<double(const RVector &)> &f, const RVector &x0,
                                      const RVector &lower, const RVector &upper, const NelderMeadOptions &opts);

} // namespace scgpr
