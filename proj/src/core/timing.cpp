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

#include "timing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "error.hpp"
#include "estimators.hpp"
#include "gpr.hpp"
#include "rng.hpp"
#include "sounding.hpp"

namespace scgpr
{

using nlohmann::json;

void TimingRequest::validate() const
{
    require(sizes.size() >= 3, Errc::invalid_argument, "timing_scan needs at least 3 grid sizes");
    for (int n : sizes)
        require(n >= 2, Errc::invalid_argument, "grid sizes must be >= 2");
    require(stride >= 1, Errc::invalid_argument, "stride must be >= 1");
    for (int n : sizes)
        require(stride <= n, Errc::invalid_argument, "stride exceeds a grid size");
    require(!estimators.empty(), Errc::invalid_argument, "no estimators to time");
    require(fit_iters >= 0, Errc::invalid_argument, "fit_iters must be >= 0");
    require(repetitions >= 1, Errc::invalid_argument, "repetitions must be >= 1");
    require(model != CovarianceModel::Custom, Errc::invalid_argument, "timing needs a Kronecker or Weichselberger model");
}

namespace
{

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    return den > 0 ? (n * sxy - sx * sy) / den : std::nan("");
}

} // namespace

TimingReport timing_scan(const TimingRequest &req)
{
    req.validate();
    TimingReport report;
    const double nv = std::pow(10.0, -req.snr_db / 10.0);

    for (int n : req.sizes)
    {
        const GridShape shape{n, n};
        const bool need_cov = std::any_of(req.estimators.begin(), req.estimators.end(), [](EstimatorKind e) {
            return e == EstimatorKind::SC_GPR || e == EstimatorKind::MMSE_FULL;
        });
        std::shared_ptr<const ChannelCovariance> cov;
        if (need_cov)
            cov = std::make_shared<const ChannelCovariance>(model_covariance(req.model, shape, req.geometry, req.seed));

        CounterRng rng(derive_seed(req.seed, static_cast<std::uint64_t>(n)));
        const CVector g = complex_normal_vector(rng, shape.size());
        const ChannelMatrix h = ChannelMatrix::from_vec(shape, g);
        const SoundingPlan plan = make_plan(shape, req.stride);
        const SoundingPlan full = make_plan(shape, 1, n);
        const Observation obs = observe(h, plan, nv, derive_seed(req.seed, 0x100));
        const CMatrix y_full = (h.entries + noise_matrix(shape, nv, derive_seed(req.seed, 0x100))) * full.pilot;

        for (EstimatorKind est : req.estimators)
        {
            std::vector<double> times;
            for (int rep = 0; rep < req.repetitions; ++rep)
            {
                const auto t0 = std::chrono::steady_clock::now();
                switch (est)
                {
                case EstimatorKind::SC_GPR:
                    (void)estimate_channel(KernelSpec::spatial_correlation(cov), obs);
                    break;
                case EstimatorKind::LS:
                    (void)ls_estimate(y_full, full.pilot);
                    break;
                case EstimatorKind::MMSE_FULL:
                    (void)mmse_full_despread(despread(y_full, full), *cov, nv);
                    break;
                default: {
                    const KernelFamily f = *kernel_family(est);
                    const FitReport fit =
                        fit_hyperparameters(f, obs.train, default_init(f), default_bounds(f), req.fit_iters);
                    (void)estimate_channel(fit.fitted, obs);
                    break;
                }
                }
                times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
            }
            const int p = uses_stride(est) ? static_cast<int>(obs.train.inputs.size()) : shape.size();
            report.rows.push_back({est, n, p, median(times)});
        }
    }

    for (EstimatorKind est : req.estimators)
    {
        std::vector<double> x, y;
        for (const TimingRow &r : report.rows)
            if (r.estimator == est)
            {
                x.push_back(r.problem_size);
                y.push_back(std::max(r.median_ms, 1e-6));
            }
        report.slopes[est] = loglog_slope(x, y);
    }
    return report;
}

TimingRequest timing_request_from_json(const json &j)
{
    TimingRequest req;
    require(j.is_object(), Errc::invalid_argument, "timing request must be an object");
    try
    {
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            const std::string &k = it.key();
            const json &v = it.value();
            if (k == "sizes")
                req.sizes = v.get<std::vector<int>>();
            else if (k == "stride")
                req.stride = v.get<int>();
            else if (k == "estimators")
            {
                req.estimators.clear();
                for (const auto &e : v)
                    req.estimators.push_back(parse_estimator(e.get<std::string>()));
            }
            else if (k == "fit_iters")
                req.fit_iters = v.get<int>();
            else if (k == "repetitions")
                req.repetitions = v.get<int>();
            else if (k == "snr_db")
                req.snr_db = v.get<double>();
            else if (k == "model")
                req.model = parse_model(v.get<std::string>());
            else if (k == "seed")
                req.seed = v.get<std::uint64_t>();
            else
                fail(Errc::invalid_argument, "unknown key '" + k + "' in timing request");
        }
    }
    catch (const json::exception &e)
    {
        fail(Errc::invalid_argument, std::string("timing request: ") + e.what());
    }
    req.validate();
    return req;
}

json timing_report_to_json(const TimingReport &report)
{
    json rows = json::array();
    for (const TimingRow &r : report.rows)
        rows.push_back({{"estimator", estimator_name(r.estimator)},
                        {"size", r.size},
                        {"problem_size", r.problem_size},
                        {"median_ms", r.median_ms}});
    json slopes = json::object();
    for (const auto &[e, s] : report.slopes)
        slopes[estimator_name(e)] = std::isfinite(s) ? json(s) : json(nullptr);
    return {{"rows", rows}, {"slopes", slopes}};
}

} // namespace scgpr
