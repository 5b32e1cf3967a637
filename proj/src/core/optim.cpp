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

#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace scgpr
{

namespace
{

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Simplex
{
    std::vector<RVector> x;
    std::vector<double> f;

    void sort()
    {
        std::vector<std::size_t> order(x.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
        std::vector<RVector> xs;
        std::vector<double> fs;
        for (auto i : order)
        {
            xs.push_back(x[i]);
            fs.push_back(f[i]);
        }
        x = std::move(xs);
        f = std::move(fs);
    }
};

} // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(const RVector &)> &f, const RVector &x0,
                                      const RVector &lower, const RVector &upper, const NelderMeadOptions &opts)
{
    const Eigen::Index n = x0.size();
    require(n >= 1 && lower.size() == n && upper.size() == n, Errc::invalid_argument, "bad optimizer dimensions");
    require((lower.array() <= upper.array()).all(), Errc::invalid_argument, "empty optimizer box");
    require(opts.max_iters >= 0, Errc::invalid_argument, "iteration budget must be non-negative");

    NelderMeadResult res;
    auto clamp = [&](RVector v) { return RVector(v.cwiseMax(lower).cwiseMin(upper)); };
    auto eval = [&](const RVector &v) {
        ++res.evaluations;
        const double y = f(v);
        return std::isfinite(y) ? y : -std::numeric_limits<double>::infinity();
    };

    res.x = clamp(x0);
    res.value = eval(res.x);
    res.trace.push_back(res.value);
    if (opts.max_iters == 0)
        return res;

    auto build = [&](const RVector &centre, double centre_value) {
        Simplex s;
        s.x.push_back(centre);
        s.f.push_back(centre_value);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            RVector v = centre;
            v[i] += opts.initial_step;
            if (v[i] > upper[i])
                v[i] = centre[i] - opts.initial_step;
            v = clamp(v);
            s.x.push_back(v);
            s.f.push_back(eval(v));
        }
        s.sort();
        return s;
    };

    Simplex s = build(res.x, res.value);
    int restarts_left = opts.restarts;
    while (res.iterations < opts.max_iters)
    {
        ++res.iterations;
        const std::size_t worst = s.x.size() - 1;
        RVector centroid = RVector::Zero(n);
        for (std::size_t i = 0; i < worst; ++i)
            centroid += s.x[i];
        centroid /= static_cast<double>(worst);

        const RVector xr = clamp(centroid + kReflect * (centroid - s.x[worst]));
        const double fr = eval(xr);
        if (fr > s.f[0])
        {
            const RVector xe = clamp(centroid + kExpand * (xr - centroid));
            const double fe = eval(xe);
            if (fe > fr)
                s.x[worst] = xe, s.f[worst] = fe;
            else
                s.x[worst] = xr, s.f[worst] = fr;
        }
        else if (fr > s.f[worst - 1])
        {
            s.x[worst] = xr, s.f[worst] = fr;
        }
        else
        {
            const bool outside = fr > s.f[worst];
            const RVector xc = outside ? clamp(centroid + kContract * (xr - centroid))
                                       : clamp(centroid + kContract * (s.x[worst] - centroid));
            const double fc = eval(xc);
            if (fc > (outside ? fr : s.f[worst]))
            {
                s.x[worst] = xc, s.f[worst] = fc;
            }
            else
            {
                for (std::size_t i = 1; i < s.x.size(); ++i)
                {
                    s.x[i] = clamp(s.x[0] + kShrink * (s.x[i] - s.x[0]));
                    s.f[i] = eval(s.x[i]);
                }
            }
        }
        s.sort();

        if (s.f[0] > res.value)
        {
            res.value = s.f[0];
            res.x = s.x[0];
        }
        res.trace.push_back(res.value);

        double fspread = 0.0, xspread = 0.0;
        for (std::size_t i = 1; i < s.x.size(); ++i)
        {
            fspread = std::max(fspread, std::abs(s.f[i] - s.f[0]));
            xspread = std::max(xspread, (s.x[i] - s.x[0]).cwiseAbs().maxCoeff());
        }
        const bool converged =
            (std::isfinite(fspread) && fspread <= opts.ftol * (std::abs(s.f[0]) + opts.ftol)) || xspread <= opts.xtol;
        if (converged)
        {
            if (restarts_left-- <= 0)
                break;
            s = build(res.x, res.value);
        }
    }
    return res;
}

} // namespace scgpr
