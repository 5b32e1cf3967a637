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

#include "scgpr/scgpr.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/covariance.hpp"
#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/estimators.hpp"
#include "core/experiment.hpp"
#include "core/gpr.hpp"
#include "core/metrics.hpp"
#include "core/sounding.hpp"
#include "core/timing.hpp"

static_assert(sizeof(scgpr_complex) == sizeof(std::complex<double>));

struct scgpr_covariance
{
    std::shared_ptr<const scgpr::ChannelCovariance> cov;
    mutable std::once_flag sampler_once;
    mutable std::unique_ptr<scgpr::ChannelSampler> sampler;
};

struct scgpr_plan
{
    scgpr::SoundingPlan plan;
};

struct scgpr_estimate
{
    scgpr::Reconstruction rec;
};

struct scgpr_experiment
{
    scgpr::ExperimentConfig cfg;
    std::optional<scgpr::ExperimentResult> result;
};

namespace
{

using namespace scgpr;

thread_local std::string g_last_error;

struct NullPointer
{
    const char *what;
};

scgpr_status to_status(Errc c)
{
    switch (c)
    {
    case Errc::invalid_argument: return SCGPR_E_INVALID_ARGUMENT;
    case Errc::shape_mismatch: return SCGPR_E_SHAPE_MISMATCH;
    case Errc::not_positive_definite: return SCGPR_E_NOT_POSITIVE_DEFINITE;
    case Errc::ill_conditioned: return SCGPR_E_ILL_CONDITIONED;
    case Errc::init_failure: return SCGPR_E_INIT_FAILURE;
    case Errc::io: return SCGPR_E_IO;
    }
    return SCGPR_E_INTERNAL;
}

template <class F> scgpr_status guard(F &&body) noexcept
{
    try
    {
        body();
        g_last_error.clear();
        return SCGPR_OK;
    }
    catch (const NullPointer &e)
    {
        g_last_error = std::string(e.what) + " must not be NULL";
        return SCGPR_E_NULL_POINTER;
    }
    catch (const Error &e)
    {
        g_last_error = e.what();
        return to_status(e.code());
    }
    catch (const nlohmann::json::exception &e)
    {
        g_last_error = std::string("json: ") + e.what();
        return SCGPR_E_INVALID_ARGUMENT;
    }
    catch (const std::bad_alloc &)
    {
        g_last_error = "out of memory";
        return SCGPR_E_INTERNAL;
    }
    catch (const std::exception &e)
    {
        g_last_error = e.what();
        return SCGPR_E_INTERNAL;
    }
    catch (...)
    {
        g_last_error = "unknown error";
        return SCGPR_E_INTERNAL;
    }
}

template <class T> T *need(T *p, const char *what)
{
    if (!p)
        throw NullPointer{what};
    return p;
}

const cd *as_cd(const scgpr_complex *p) { return reinterpret_cast<const cd *>(p); }
cd *as_cd(scgpr_complex *p) { return reinterpret_cast<cd *>(p); }

GridShape checked_shape(int n_rx, int n_tx)
{
    GridShape s{n_rx, n_tx};
    s.validate();
    return s;
}

ChannelMatrix channel_from(const GridShape &shape, const scgpr_complex *data, const char *what)
{
    need(data, what);
    return {shape, Eigen::Map<const CMatrix>(as_cd(data), shape.n_rx, shape.n_tx)};
}

void copy_out(const CMatrix &m, scgpr_complex *out)
{
    Eigen::Map<CMatrix>(as_cd(out), m.rows(), m.cols()) = m;
}

char *dup_string(const std::string &s)
{
    char *p = static_cast<char *>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

KernelSpec spec_from(const scgpr_kernel_params &k, const scgpr_covariance *cov)
{
    switch (k.family)
    {
    case SCGPR_KERNEL_SC:
        return KernelSpec::spatial_correlation(need(cov, "cov")->cov);
    case SCGPR_KERNEL_RBF:
    case SCGPR_KERNEL_MATERN15:
    case SCGPR_KERNEL_RQ: {
        KernelSpec s;
        s.family = k.family == SCGPR_KERNEL_RBF        ? KernelFamily::RBF
                   : k.family == SCGPR_KERNEL_MATERN15 ? KernelFamily::Matern15
                                                       : KernelFamily::RQ;
        s.scale = k.scale;
        s.lengthscale = k.lengthscale;
        s.rq_alpha = k.rq_alpha;
        return s;
    }
    }
    fail(Errc::invalid_argument, "unknown kernel family");
}

const ExperimentResult &finished(const scgpr_experiment *exp)
{
    need(exp, "exp");
    require(exp->result.has_value(), Errc::invalid_argument, "experiment has not been run");
    return *exp->result;
}

} // namespace

extern "C" {

const char *scgpr_version(void) { return SCGPR_VERSION; }

const char *scgpr_status_name(scgpr_status status)
{
    switch (status)
    {
    case SCGPR_OK: return "ok";
    case SCGPR_E_INVALID_ARGUMENT: return "invalid_argument";
    case SCGPR_E_SHAPE_MISMATCH: return "shape_mismatch";
    case SCGPR_E_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case SCGPR_E_ILL_CONDITIONED: return "ill_conditioned";
    case SCGPR_E_INIT_FAILURE: return "init_failure";
    case SCGPR_E_IO: return "io";
    case SCGPR_E_NULL_POINTER: return "null_pointer";
    case SCGPR_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char *scgpr_last_error(void) { return g_last_error.c_str(); }

void scgpr_string_free(char *s) { std::free(s); }

scgpr_status scgpr_covariance_model(const char *model, int n_rx, int n_tx, const char *geometry_json,
                                    uint64_t coupling_seed, scgpr_covariance **out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        const CovarianceModel m = parse_model(need(model, "model"));
        ArrayGeometry g;
        if (geometry_json)
        {
            const auto j = nlohmann::json::parse(geometry_json);
            require(j.is_object(), Errc::invalid_argument, "geometry must be a JSON object");
            for (auto it = j.begin(); it != j.end(); ++it)
            {
                const double v = it.value().get<double>();
                if (it.key() == "spacing_wl")
                    g.spacing_wl = v;
                else if (it.key() == "center_tx_rad")
                    g.center_tx_rad = v;
                else if (it.key() == "center_rx_rad")
                    g.center_rx_rad = v;
                else if (it.key() == "spread_rad")
                    g.spread_rad = v;
                else
                    fail(Errc::invalid_argument, "unknown geometry key '" + it.key() + "'");
            }
        }
        auto h = std::make_unique<scgpr_covariance>();
        h->cov = std::make_shared<const ChannelCovariance>(model_covariance(m, checked_shape(n_rx, n_tx), g, coupling_seed));
        *out = h.release();
    });
}

scgpr_status scgpr_covariance_from_matrix(int n_rx, int n_tx, const scgpr_complex *r, scgpr_covariance **out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        const GridShape shape = checked_shape(n_rx, n_tx);
        need(r, "r");
        CMatrix m = Eigen::Map<const CMatrix>(as_cd(r), shape.size(), shape.size());
        auto h = std::make_unique<scgpr_covariance>();
        h->cov = std::make_shared<const ChannelCovariance>(
            ChannelCovariance::create(shape, std::move(m), CovarianceModel::Custom));
        *out = h.release();
    });
}

scgpr_status scgpr_covariance_shape(const scgpr_covariance *cov, int *n_rx, int *n_tx)
{
    return guard([&] {
        need(cov, "cov");
        *need(n_rx, "n_rx") = cov->cov->shape().n_rx;
        *need(n_tx, "n_tx") = cov->cov->shape().n_tx;
    });
}

scgpr_status scgpr_covariance_copy(const scgpr_covariance *cov, scgpr_complex *out, size_t len)
{
    return guard([&] {
        const CMatrix &m = need(cov, "cov")->cov->matrix();
        need(out, "out");
        require(len >= static_cast<size_t>(m.size()), Errc::shape_mismatch, "output buffer too small");
        copy_out(m, out);
    });
}

void scgpr_covariance_free(scgpr_covariance *cov) { delete cov; }

scgpr_status scgpr_sample_channel(const scgpr_covariance *cov, uint64_t seed, scgpr_complex *h_out)
{
    return guard([&] {
        need(cov, "cov");
        need(h_out, "h_out");
        std::call_once(cov->sampler_once, [&] { cov->sampler = std::make_unique<ChannelSampler>(*cov->cov); });
        require(cov->sampler != nullptr, Errc::init_failure, "channel sampler unavailable");
        copy_out(cov->sampler->draw(seed).entries, h_out);
    });
}

scgpr_status scgpr_plan_create(int n_rx, int n_tx, int stride, int pilot_len, scgpr_plan **out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        auto h = std::make_unique<scgpr_plan>();
        h->plan = make_plan(checked_shape(n_rx, n_tx), stride, pilot_len);
        *out = h.release();
    });
}

scgpr_status scgpr_plan_info(const scgpr_plan *plan, int *n_active, int *pilot_len)
{
    return guard([&] {
        need(plan, "plan");
        if (n_active)
            *n_active = plan->plan.n_active();
        if (pilot_len)
            *pilot_len = plan->plan.pilot_len;
    });
}

scgpr_status scgpr_plan_active(const scgpr_plan *plan, int *active_out)
{
    return guard([&] {
        need(plan, "plan");
        need(active_out, "active_out");
        std::copy(plan->plan.active.begin(), plan->plan.active.end(), active_out);
    });
}

void scgpr_plan_free(scgpr_plan *plan) { delete plan; }

scgpr_status scgpr_observe(const scgpr_plan *plan, const scgpr_complex *h, double noise_var, uint64_t seed,
                           scgpr_complex *y_out)
{
    return guard([&] {
        const SoundingPlan &p = need(plan, "plan")->plan;
        need(y_out, "y_out");
        const Observation obs = observe(channel_from(p.shape, h, "h"), p, noise_var, seed);
        // Training values are ordered column-major over (r, active t).
        Eigen::Map<CVector>(as_cd(y_out), obs.train.values.size()) = obs.train.values;
    });
}

scgpr_status scgpr_estimate_gpr(const scgpr_covariance *cov, const scgpr_kernel_params *kernel, const scgpr_plan *plan,
                                const scgpr_complex *y, double noise_var, scgpr_estimate **out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        const SoundingPlan &p = need(plan, "plan")->plan;
        const KernelSpec spec = spec_from(*need(kernel, "kernel"), cov);
        need(y, "y");
        const CMatrix y_tilde = Eigen::Map<const CMatrix>(as_cd(y), p.shape.n_rx, p.n_active());
        const Observation obs = split_observations(y_tilde, p, noise_var);
        auto h = std::make_unique<scgpr_estimate>();
        h->rec = estimate_channel(spec, obs);
        *out = h.release();
    });
}

scgpr_status scgpr_fit_kernel(const scgpr_plan *plan, const scgpr_complex *y, double noise_var, int max_iters,
                              scgpr_kernel_params *kernel)
{
    return guard([&] {
        const SoundingPlan &p = need(plan, "plan")->plan;
        need(kernel, "kernel");
        require(kernel->family != SCGPR_KERNEL_SC, Errc::invalid_argument, "the SC kernel has nothing to fit");
        const KernelSpec init = spec_from(*kernel, nullptr);
        need(y, "y");
        const CMatrix y_tilde = Eigen::Map<const CMatrix>(as_cd(y), p.shape.n_rx, p.n_active());
        const Observation obs = split_observations(y_tilde, p, noise_var);
        const FitReport rep =
            fit_hyperparameters(init.family, obs.train, init, default_bounds(init.family), max_iters);
        kernel->scale = rep.fitted.scale;
        kernel->lengthscale = rep.fitted.lengthscale;
        kernel->rq_alpha = rep.fitted.rq_alpha;
    });
}

scgpr_status scgpr_estimate_copy(const scgpr_estimate *est, scgpr_complex *h_out, double *var_out, double *jitter_out)
{
    return guard([&] {
        need(est, "est");
        if (h_out)
            copy_out(est->rec.estimate.entries, h_out);
        if (var_out)
            Eigen::Map<RMatrix>(var_out, est->rec.variance.rows(), est->rec.variance.cols()) = est->rec.variance;
        if (jitter_out)
            *jitter_out = est->rec.jitter;
    });
}

void scgpr_estimate_free(scgpr_estimate *est) { delete est; }

scgpr_status scgpr_ls_estimate(int n_rx, int n_tx, int pilot_len, const scgpr_complex *y, const scgpr_complex *pilot,
                               scgpr_complex *h_out)
{
    return guard([&] {
        const GridShape shape = checked_shape(n_rx, n_tx);
        require(pilot_len >= 1, Errc::invalid_argument, "pilot_len must be positive");
        need(y, "y");
        need(pilot, "pilot");
        need(h_out, "h_out");
        const CMatrix ym = Eigen::Map<const CMatrix>(as_cd(y), shape.n_rx, pilot_len);
        const CMatrix s = Eigen::Map<const CMatrix>(as_cd(pilot), shape.n_tx, pilot_len);
        copy_out(ls_estimate(ym, s).entries, h_out);
    });
}

scgpr_status scgpr_nmse_db(int n_rx, int n_tx, const scgpr_complex *h_true, const scgpr_complex *h_est, double *out)
{
    return guard([&] {
        const GridShape shape = checked_shape(n_rx, n_tx);
        *need(out, "out") = nmse_db(channel_from(shape, h_true, "h_true"), channel_from(shape, h_est, "h_est"));
    });
}

scgpr_status scgpr_spectral_efficiency(int n_rx, int n_tx, const scgpr_complex *h_true, const scgpr_complex *h_est,
                                       double snr_linear, double *se_true, double *se_est)
{
    return guard([&] {
        const GridShape shape = checked_shape(n_rx, n_tx);
        const LinkReport rep =
            spectral_efficiency(channel_from(shape, h_true, "h_true"), channel_from(shape, h_est, "h_est"), snr_linear);
        if (se_true)
            *se_true = rep.se_true;
        if (se_est)
            *se_est = rep.se_est;
    });
}

scgpr_status scgpr_experiment_create(const char *config_json, scgpr_experiment **out)
{
    return guard([&] {
        need(out, "out");
        *out = nullptr;
        auto h = std::make_unique<scgpr_experiment>();
        h->cfg = config_from_json(nlohmann::json::parse(need(config_json, "config_json")));
        *out = h.release();
    });
}

scgpr_status scgpr_experiment_run(scgpr_experiment *exp, int write_files, scgpr_log_fn log, void *user)
{
    return guard([&] {
        need(exp, "exp");
        RunOptions opts;
        opts.write_files = write_files != 0;
        if (log)
            opts.log = [log, user](const std::string &msg) { log(msg.c_str(), user); };
        exp->result.reset();
        exp->result = run_experiment(exp->cfg, opts);
    });
}

scgpr_status scgpr_experiment_config_json(const scgpr_experiment *exp, char **out)
{
    return guard([&] {
        need(exp, "exp");
        *need(out, "out") = dup_string(config_to_json(exp->cfg).dump(2));
    });
}

scgpr_status scgpr_experiment_summary_json(const scgpr_experiment *exp, char **out)
{
    return guard([&] { *need(out, "out") = dup_string(finished(exp).summary.dump(2)); });
}

scgpr_status scgpr_experiment_meta_json(const scgpr_experiment *exp, char **out)
{
    return guard([&] { *need(out, "out") = dup_string(finished(exp).meta.dump(2)); });
}

scgpr_status scgpr_experiment_results_csv(const scgpr_experiment *exp, char **out)
{
    return guard([&] {
        const ExperimentResult &res = finished(exp);
        need(out, "out");
        std::ostringstream s;
        csv::Writer w(s);
        w.row(csv_header());
        for (const ResultRow &r : res.rows)
            w.row(csv_fields(r));
        *out = dup_string(s.str());
    });
}

void scgpr_experiment_free(scgpr_experiment *exp) { delete exp; }

scgpr_status scgpr_timing_scan(const char *request_json, char **report_json)
{
    return guard([&] {
        need(report_json, "report_json");
        const TimingRequest req = timing_request_from_json(nlohmann::json::parse(need(request_json, "request_json")));
        *report_json = dup_string(timing_report_to_json(timing_scan(req)).dump(2));
    });
}

} // extern "C"
