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

#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <thread>
#include <tuple>

#include "csv.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "rng.hpp"
#include "sounding.hpp"

namespace scgpr
{

using nlohmann::json;

namespace
{

constexpr EstimatorKind kAllEstimators[] = {EstimatorKind::SC_GPR,     EstimatorKind::RBF_GPR,
                                            EstimatorKind::MATERN_GPR, EstimatorKind::RQ_GPR,
                                            EstimatorKind::LS,         EstimatorKind::MMSE_FULL};

constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kNoiseStreamBase = 0x100;

double noise_variance(double snr_db)
{
    return snr_db >= kNoiselessSnrDb ? 0.0 : std::pow(10.0, -snr_db / 10.0);
}

double linear_snr(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

double elapsed_ms(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

const char *estimator_name(EstimatorKind kind) noexcept
{
    switch (kind)
    {
    case EstimatorKind::SC_GPR: return "SC_GPR";
    case EstimatorKind::RBF_GPR: return "RBF_GPR";
    case EstimatorKind::MATERN_GPR: return "MATERN_GPR";
    case EstimatorKind::RQ_GPR: return "RQ_GPR";
    case EstimatorKind::LS: return "LS";
    case EstimatorKind::MMSE_FULL: return "MMSE_FULL";
    }
    return "?";
}

EstimatorKind parse_estimator(const std::string &name)
{
    std::string key;
    for (char c : name)
        key.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (EstimatorKind k : kAllEstimators)
        if (key == estimator_name(k))
            return k;
    // Short forms used on the command line.
    if (key == "SC")
        return EstimatorKind::SC_GPR;
    if (key == "RBF")
        return EstimatorKind::RBF_GPR;
    if (key == "MATERN")
        return EstimatorKind::MATERN_GPR;
    if (key == "RQ")
        return EstimatorKind::RQ_GPR;
    if (key == "MMSE")
        return EstimatorKind::MMSE_FULL;
    fail(Errc::invalid_argument, "unknown estimator '" + name + "'");
}

bool uses_stride(EstimatorKind kind) noexcept { return kernel_family(kind).has_value(); }

std::optional<KernelFamily> kernel_family(EstimatorKind kind) noexcept
{
    switch (kind)
    {
    case EstimatorKind::SC_GPR: return KernelFamily::SC;
    case EstimatorKind::RBF_GPR: return KernelFamily::RBF;
    case EstimatorKind::MATERN_GPR: return KernelFamily::Matern15;
    case EstimatorKind::RQ_GPR: return KernelFamily::RQ;
    default: return std::nullopt;
    }
}

bool is_learned(EstimatorKind kind) noexcept
{
    auto f = kernel_family(kind);
    return f && *f != KernelFamily::SC;
}

KernelSpec GprFitConfig::init_for(KernelFamily family) const
{
    auto it = init.find(family);
    return it != init.end() ? it->second : default_init(family);
}

HyperBounds GprFitConfig::bounds_for(KernelFamily family) const
{
    auto it = bounds.find(family);
    return it != bounds.end() ? it->second : default_bounds(family);
}

void ExperimentConfig::validate() const
{
    shape.validate();
    require(!models.empty(), Errc::invalid_argument, "at least one covariance model is required");
    for (auto m : models)
        require(m != CovarianceModel::Custom, Errc::invalid_argument, "experiments need a Kronecker or Weichselberger model");
    require(trials >= 1, Errc::invalid_argument, "trials must be >= 1");
    require(!estimators.empty(), Errc::invalid_argument, "at least one estimator is required");
    require(!snr_db.empty(), Errc::invalid_argument, "at least one SNR is required");
    for (double s : snr_db)
        require(std::isfinite(s), Errc::invalid_argument, "snr_db entries must be finite (use 200 for noiseless)");
    bool any_stride = std::any_of(estimators.begin(), estimators.end(), uses_stride);
    require(!any_stride || !strides.empty(), Errc::invalid_argument, "GPR estimators need at least one stride");
    for (int d : strides)
        require(d >= 1 && d <= shape.n_tx, Errc::invalid_argument, "strides must lie in 1..N_t");
    require(gpr_fit.max_iters >= 0, Errc::invalid_argument, "gpr_fit.max_iters must be >= 0");
    for (KernelFamily f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        const HyperBounds b = gpr_fit.bounds_for(f);
        for (const Interval &iv : {b.scale, b.lengthscale, b.rq_alpha})
            require(iv.lo > 0.0 && iv.hi >= iv.lo && std::isfinite(iv.hi), Errc::invalid_argument,
                    std::string("bounds for ") + family_name(f) + " must be positive intervals");
        const KernelSpec init = gpr_fit.init_for(f);
        require(b.scale.contains(init.scale) && b.lengthscale.contains(init.lengthscale) &&
                    (f != KernelFamily::RQ || b.rq_alpha.contains(init.rq_alpha)),
                Errc::invalid_argument, std::string("initial hyperparameters for ") + family_name(f) + " are out of bounds");
    }
    require(threads >= 1, Errc::invalid_argument, "threads must be >= 1");
}

// ---------------------------------------------------------------- config json

namespace
{

const char *family_key(KernelFamily f)
{
    switch (f)
    {
    case KernelFamily::RBF: return "RBF_GPR";
    case KernelFamily::Matern15: return "MATERN_GPR";
    case KernelFamily::RQ: return "RQ_GPR";
    default: return "SC_GPR";
    }
}

KernelFamily family_from_key(const std::string &key)
{
    auto f = kernel_family(parse_estimator(key));
    require(f && *f != KernelFamily::SC, Errc::invalid_argument, "'" + key + "' has no learned hyperparameters");
    return *f;
}

std::uint64_t parse_u64(const json &j, const char *what)
{
    if (j.is_number_unsigned())
        return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_string())
    {
        const std::string s = j.get<std::string>();
        std::size_t pos = 0;
        try
        {
            std::uint64_t v = std::stoull(s, &pos, 0);
            if (pos == s.size())
                return v;
        }
        catch (const std::exception &)
        {
        }
    }
    fail(Errc::invalid_argument, std::string(what) + " must be a non-negative 64-bit integer");
}

double parse_snr(const json &j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
    {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "Infinity" || s == "noiseless")
            return kNoiselessSnrDb;
        try
        {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos == s.size())
                return std::isinf(v) && v > 0 ? kNoiselessSnrDb : v;
        }
        catch (const std::exception &)
        {
        }
    }
    fail(Errc::invalid_argument, "snr_db entries must be numbers or \"inf\"");
}

Interval parse_interval(const json &j, const char *what)
{
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), Errc::invalid_argument,
            std::string(what) + " bounds must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T, class F> std::vector<T> scalar_or_list(const json &j, F &&conv)
{
    std::vector<T> out;
    if (j.is_array())
        for (const auto &e : j)
            out.push_back(conv(e));
    else
        out.push_back(conv(j));
    return out;
}

void check_keys(const json &j, std::initializer_list<const char *> allowed, const char *where)
{
    require(j.is_object(), Errc::invalid_argument, std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        bool ok = false;
        for (const char *a : allowed)
            ok = ok || it.key() == a;
        require(ok, Errc::invalid_argument, "unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace

ExperimentConfig config_from_json(const json &j)
{
    ExperimentConfig cfg;
    check_keys(j,
               {"shape", "model", "models", "strides", "snr_db", "trials", "estimators", "seed", "coupling_seed",
                "geometry", "gpr_fit", "observed_entries", "output_dir", "threads"},
               "config");
    try
    {
        if (j.contains("shape"))
        {
            const json &s = j["shape"];
            if (s.is_array())
            {
                require(s.size() == 2, Errc::invalid_argument, "shape must be [n_rx, n_tx]");
                cfg.shape = {s[0].get<int>(), s[1].get<int>()};
            }
            else
            {
                check_keys(s, {"n_rx", "n_tx"}, "shape");
                cfg.shape = {s.at("n_rx").get<int>(), s.at("n_tx").get<int>()};
            }
        }
        for (const char *key : {"model", "models"})
            if (j.contains(key))
                cfg.models = scalar_or_list<CovarianceModel>(j[key], [](const json &e) {
                    return parse_model(e.get<std::string>());
                });
        if (j.contains("strides"))
            cfg.strides = scalar_or_list<int>(j["strides"], [](const json &e) { return e.get<int>(); });
        if (j.contains("snr_db"))
            cfg.snr_db = scalar_or_list<double>(j["snr_db"], parse_snr);
        if (j.contains("trials"))
            cfg.trials = j["trials"].get<int>();
        if (j.contains("estimators"))
            cfg.estimators = scalar_or_list<EstimatorKind>(j["estimators"], [](const json &e) {
                return parse_estimator(e.get<std::string>());
            });
        if (j.contains("seed"))
            cfg.seed = parse_u64(j["seed"], "seed");
        if (j.contains("coupling_seed"))
            cfg.coupling_seed = parse_u64(j["coupling_seed"], "coupling_seed");
        if (j.contains("geometry"))
        {
            const json &g = j["geometry"];
            check_keys(g, {"spacing_wl", "center_tx_rad", "center_rx_rad", "spread_rad"}, "geometry");
            cfg.geometry.spacing_wl = g.value("spacing_wl", cfg.geometry.spacing_wl);
            cfg.geometry.center_tx_rad = g.value("center_tx_rad", cfg.geometry.center_tx_rad);
            cfg.geometry.center_rx_rad = g.value("center_rx_rad", cfg.geometry.center_rx_rad);
            cfg.geometry.spread_rad = g.value("spread_rad", cfg.geometry.spread_rad);
        }
        if (j.contains("gpr_fit"))
        {
            const json &g = j["gpr_fit"];
            check_keys(g, {"max_iters", "init", "bounds"}, "gpr_fit");
            cfg.gpr_fit.max_iters = g.value("max_iters", cfg.gpr_fit.max_iters);
            if (g.contains("init"))
                for (auto it = g["init"].begin(); it != g["init"].end(); ++it)
                {
                    const KernelFamily f = family_from_key(it.key());
                    check_keys(it.value(), {"scale", "lengthscale", "rq_alpha"}, "gpr_fit.init");
                    KernelSpec spec = default_init(f);
                    spec.scale = it.value().value("scale", spec.scale);
                    spec.lengthscale = it.value().value("lengthscale", spec.lengthscale);
                    spec.rq_alpha = it.value().value("rq_alpha", spec.rq_alpha);
                    cfg.gpr_fit.init[f] = spec;
                }
            if (g.contains("bounds"))
                for (auto it = g["bounds"].begin(); it != g["bounds"].end(); ++it)
                {
                    const KernelFamily f = family_from_key(it.key());
                    check_keys(it.value(), {"scale", "lengthscale", "rq_alpha"}, "gpr_fit.bounds");
                    HyperBounds b = default_bounds(f);
                    if (it.value().contains("scale"))
                        b.scale = parse_interval(it.value()["scale"], "scale");
                    if (it.value().contains("lengthscale"))
                        b.lengthscale = parse_interval(it.value()["lengthscale"], "lengthscale");
                    if (it.value().contains("rq_alpha"))
                        b.rq_alpha = parse_interval(it.value()["rq_alpha"], "rq_alpha");
                    cfg.gpr_fit.bounds[f] = b;
                }
        }
        if (j.contains("observed_entries"))
        {
            const std::string m = j["observed_entries"].get<std::string>();
            if (m == "bayesian_update")
                cfg.observed = ObservedEntries::BayesianUpdate;
            else if (m == "pass_through")
                cfg.observed = ObservedEntries::PassThrough;
            else
                fail(Errc::invalid_argument, "observed_entries must be bayesian_update or pass_through");
        }
        if (j.contains("output_dir"))
            cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("threads"))
            cfg.threads = j["threads"].get<int>();
    }
    catch (const json::exception &e)
    {
        fail(Errc::invalid_argument, std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig &cfg)
{
    json j;
    j["shape"] = {cfg.shape.n_rx, cfg.shape.n_tx};
    j["models"] = json::array();
    for (auto m : cfg.models)
        j["models"].push_back(model_name(m));
    j["strides"] = cfg.strides;
    j["snr_db"] = cfg.snr_db;
    j["trials"] = cfg.trials;
    j["estimators"] = json::array();
    for (auto e : cfg.estimators)
        j["estimators"].push_back(estimator_name(e));
    j["seed"] = cfg.seed;
    j["coupling_seed"] = cfg.coupling_seed;
    j["geometry"] = {{"spacing_wl", cfg.geometry.spacing_wl},
                     {"center_tx_rad", cfg.geometry.center_tx_rad},
                     {"center_rx_rad", cfg.geometry.center_rx_rad},
                     {"spread_rad", cfg.geometry.spread_rad}};
    json init = json::object(), bounds = json::object();
    for (KernelFamily f : {KernelFamily::RBF, KernelFamily::Matern15, KernelFamily::RQ})
    {
        const KernelSpec s = cfg.gpr_fit.init_for(f);
        const HyperBounds b = cfg.gpr_fit.bounds_for(f);
        init[family_key(f)] = {{"scale", s.scale}, {"lengthscale", s.lengthscale}};
        bounds[family_key(f)] = {{"scale", {b.scale.lo, b.scale.hi}}, {"lengthscale", {b.lengthscale.lo, b.lengthscale.hi}}};
        if (f == KernelFamily::RQ)
        {
            init[family_key(f)]["rq_alpha"] = s.rq_alpha;
            bounds[family_key(f)]["rq_alpha"] = {b.rq_alpha.lo, b.rq_alpha.hi};
        }
    }
    j["gpr_fit"] = {{"max_iters", cfg.gpr_fit.max_iters}, {"init", init}, {"bounds", bounds}};
    j["observed_entries"] = cfg.observed == ObservedEntries::BayesianUpdate ? "bayesian_update" : "pass_through";
    j["output_dir"] = cfg.output_dir;
    j["threads"] = cfg.threads;
    return j;
}

// ---------------------------------------------------------------- rows

std::vector<std::string> csv_header()
{
    return {"schema_version", "model",    "estimator",  "delta",     "pilot_len", "snr_db",
            "trial",          "nmse_db",  "se_true",    "se_est",    "relative_se", "coverage",
            "area95",         "axis_ratio", "wall_time_ms", "jitter_used", "error"};
}

std::vector<std::string> csv_fields(const ResultRow &r)
{
    using csv::format_number;
    return {std::to_string(kSchemaVersion),
            model_name(r.model),
            estimator_name(r.estimator),
            std::to_string(r.delta),
            std::to_string(r.pilot_len),
            format_number(r.snr_db),
            std::to_string(r.trial),
            format_number(r.nmse_db),
            format_number(r.se_true),
            format_number(r.se_est),
            format_number(r.relative_se),
            format_number(r.coverage),
            format_number(r.area95),
            format_number(r.axis_ratio),
            format_number(r.wall_time_ms),
            format_number(r.jitter_used),
            r.error};
}

std::string cell_key(CovarianceModel model, EstimatorKind estimator, int delta, double snr_db)
{
    return std::string(model_name(model)) + "/" + estimator_name(estimator) + "/" + std::to_string(delta) + "/" +
           csv::format_number(snr_db);
}

// ---------------------------------------------------------------- runner

namespace
{

struct ModelContext
{
    CovarianceModel model;
    std::shared_ptr<const ChannelCovariance> cov;
    std::unique_ptr<ChannelSampler> sampler;
    std::map<int, SoundingPlan> plans;
    SoundingPlan full_plan;
    std::vector<RVector> mmse_variance; // per SNR index
    // (estimator, delta, snr index) -> fitted spec or failure message
    std::map<std::tuple<EstimatorKind, int, int>, KernelSpec> fitted;
    std::map<std::tuple<EstimatorKind, int, int>, std::string> fit_error;
};

struct TrialOutput
{
    std::vector<ResultRow> rows;
    std::vector<EllipseAccumulator> ellipses;
};

void score(ResultRow &row, EllipseAccumulator &acc, const ChannelMatrix &h, const ChannelMatrix &est,
           const RVector &variance, double snr)
{
    row.nmse_db = nmse_db(h, est);
    const LinkReport link = spectral_efficiency(h, est, snr);
    row.se_true = link.se_true;
    row.se_est = link.se_est;
    row.relative_se = link.relative_se;
    const CVector err = est.vec() - h.vec();
    acc.add(std::span<const cd>(err.data(), static_cast<std::size_t>(err.size())),
            std::span<const double>(variance.data(), static_cast<std::size_t>(variance.size())));
    const EllipseStats st = acc.stats();
    row.coverage = st.coverage;
    row.area95 = st.area95;
    row.axis_ratio = st.axis_ratio;
}

void mark_failed(ResultRow &row, const std::string &msg)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.nmse_db = row.se_true = row.se_est = row.relative_se = nan;
    row.coverage = row.area95 = row.axis_ratio = nan;
    row.error = msg.empty() ? "error" : msg;
}

std::string describe(const std::exception &e)
{
    if (auto *se = dynamic_cast<const Error *>(&e))
        return std::string(errc_name(se->code())) + ": " + se->what();
    return e.what();
}

TrialOutput run_trial(const ExperimentConfig &cfg, const ModelContext &ctx, int trial)
{
    TrialOutput out;
    const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    const ChannelMatrix h = ctx.sampler->draw(derive_seed(trial_seed, kChannelStream));
    const GridShape &shape = cfg.shape;
    const bool need_full = std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                                       [](EstimatorKind e) { return !uses_stride(e); });

    for (std::size_t k = 0; k < cfg.snr_db.size(); ++k)
    {
        const double snr_db = cfg.snr_db[k];
        const double nv = noise_variance(snr_db);
        const double rho = linear_snr(snr_db);
        const std::uint64_t noise_seed = derive_seed(trial_seed, kNoiseStreamBase + k);

        std::map<int, Observation> observations;
        CMatrix y_full;
        if (need_full)
        {
            // N = W S keeps the de-spread noise equal to the shared grid noise.
            const CMatrix w = noise_matrix(shape, nv, noise_seed);
            y_full = (h.entries + w) * ctx.full_plan.pilot;
        }

        for (EstimatorKind est : cfg.estimators)
        {
            const std::vector<int> deltas = uses_stride(est) ? cfg.strides : std::vector<int>{1};
            for (int delta : deltas)
            {
                ResultRow row;
                row.model = ctx.model;
                row.estimator = est;
                row.delta = delta;
                row.snr_db = snr_db;
                row.trial = trial;
                EllipseAccumulator acc;
                try
                {
                    if (uses_stride(est))
                    {
                        const SoundingPlan &plan = ctx.plans.at(delta);
                        row.pilot_len = plan.pilot_len;
                        auto obs_it = observations.find(delta);
                        if (obs_it == observations.end())
                            obs_it = observations.emplace(delta, observe(h, plan, nv, noise_seed)).first;
                        KernelSpec spec;
                        if (est == EstimatorKind::SC_GPR)
                            spec = KernelSpec::spatial_correlation(ctx.cov);
                        else
                        {
                            const auto key = std::make_tuple(est, delta, static_cast<int>(k));
                            if (auto e = ctx.fit_error.find(key); e != ctx.fit_error.end())
                                fail(Errc::init_failure, "hyperparameter fit failed: " + e->second);
                            spec = ctx.fitted.at(key);
                        }
                        const auto t0 = std::chrono::steady_clock::now();
                        const Reconstruction rec = estimate_channel(spec, obs_it->second, cfg.observed);
                        row.wall_time_ms = elapsed_ms(t0);
                        row.jitter_used = rec.jitter;
                        const RVector var = Eigen::Map<const RVector>(rec.variance.data(), rec.variance.size());
                        score(row, acc, h, rec.estimate, var, rho);
                    }
                    else if (est == EstimatorKind::LS)
                    {
                        row.pilot_len = ctx.full_plan.pilot_len;
                        const auto t0 = std::chrono::steady_clock::now();
                        const ChannelMatrix est_h = ls_estimate(y_full, ctx.full_plan.pilot);
                        row.wall_time_ms = elapsed_ms(t0);
                        score(row, acc, h, est_h, RVector::Constant(shape.size(), nv), rho);
                    }
                    else
                    {
                        row.pilot_len = ctx.full_plan.pilot_len;
                        const auto t0 = std::chrono::steady_clock::now();
                        const ChannelMatrix est_h =
                            mmse_full_despread(despread(y_full, ctx.full_plan), *ctx.cov, nv);
                        row.wall_time_ms = elapsed_ms(t0);
                        score(row, acc, h, est_h, ctx.mmse_variance.at(k), rho);
                    }
                }
                catch (const std::exception &e)
                {
                    mark_failed(row, describe(e));
                    acc = EllipseAccumulator{};
                }
                out.rows.push_back(std::move(row));
                out.ellipses.push_back(acc);
            }
        }
    }
    return out;
}

void prepare_fits(const ExperimentConfig &cfg, ModelContext &ctx, std::vector<FitRecord> &fits, const RunOptions &opts)
{
    const std::uint64_t trial_seed = derive_seed(cfg.seed, 0);
    std::optional<ChannelMatrix> h;
    for (EstimatorKind est : cfg.estimators)
    {
        if (!is_learned(est))
            continue;
        if (!h)
            h = ctx.sampler->draw(derive_seed(trial_seed, kChannelStream));
        const KernelFamily family = *kernel_family(est);
        for (int delta : cfg.strides)
            for (std::size_t k = 0; k < cfg.snr_db.size(); ++k)
            {
                const double nv = noise_variance(cfg.snr_db[k]);
                const Observation obs =
                    observe(*h, ctx.plans.at(delta), nv, derive_seed(trial_seed, kNoiseStreamBase + k));
                FitRecord rec{ctx.model, est, delta, cfg.snr_db[k], cfg.gpr_fit.init_for(family), 0.0, 0.0, 0, 0.0, {}};
                const auto key = std::make_tuple(est, delta, static_cast<int>(k));
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    const FitReport rep = fit_hyperparameters(family, obs.train, cfg.gpr_fit.init_for(family),
                                                              cfg.gpr_fit.bounds_for(family), cfg.gpr_fit.max_iters);
                    rec.fitted = rep.fitted;
                    rec.lml_initial = rep.lml_trace.empty() ? std::nan("") : rep.lml_trace.front();
                    rec.lml_final = rep.lml_trace.empty() ? std::nan("") : rep.lml_trace.back();
                    rec.iterations = rep.iterations;
                    ctx.fitted[key] = rep.fitted;
                }
                catch (const std::exception &e)
                {
                    rec.error = describe(e);
                    ctx.fit_error[key] = rec.error;
                }
                rec.wall_time_ms = elapsed_ms(t0);
                if (opts.log)
                {
                    std::ostringstream msg;
                    msg << "fit " << model_name(ctx.model) << ' ' << estimator_name(est) << " delta=" << delta
                        << " snr=" << cfg.snr_db[k] << " scale=" << rec.fitted.scale
                        << " lengthscale=" << rec.fitted.lengthscale;
                    if (family == KernelFamily::RQ)
                        msg << " alpha=" << rec.fitted.rq_alpha;
                    if (!rec.error.empty())
                        msg << " error=" << rec.error;
                    opts.log(msg.str());
                }
                fits.push_back(rec);
            }
    }
}

// Runs trials 0..n-1, handing each result to sink in trial order.
template <class Sink> void run_trials(const ExperimentConfig &cfg, const ModelContext &ctx, Sink &&sink)
{
    const int n = cfg.trials;
    const int workers = std::min(cfg.threads, n);
    if (workers <= 1)
    {
        for (int i = 0; i < n; ++i)
            sink(run_trial(cfg, ctx, i));
        return;
    }

    std::vector<std::optional<TrialOutput>> slots(n);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<int> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr failure;

    auto work = [&] {
        for (;;)
        {
            const int i = next.fetch_add(1);
            if (i >= n || abort.load())
                return;
            try
            {
                TrialOutput out = run_trial(cfg, ctx, i);
                std::lock_guard lk(mu);
                slots[i] = std::move(out);
            }
            catch (...)
            {
                std::lock_guard lk(mu);
                if (!failure)
                    failure = std::current_exception();
                abort = true;
            }
            cv.notify_all();
        }
    };

    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(work);

    for (int i = 0; i < n; ++i)
    {
        std::unique_lock lk(mu);
        cv.wait(lk, [&] { return slots[i].has_value() || failure; });
        if (failure && !slots[i])
            break;
        TrialOutput out = std::move(*slots[i]);
        slots[i].reset();
        lk.unlock();
        sink(std::move(out));
    }
    abort = true;
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

json number_or_string(double v)
{
    if (std::isfinite(v))
        return v;
    return csv::format_number(v);
}

json mean_ci(const std::vector<double> &xs)
{
    if (xs.empty())
        return nullptr;
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    const double mean = sum / n;
    double half = 0.0;
    if (xs.size() > 1 && std::isfinite(mean))
    {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - mean) * (x - mean);
        half = kZ95 * std::sqrt(ss / (n - 1.0) / n);
    }
    return {{"mean", number_or_string(mean)},
            {"ci95", {number_or_string(mean - half), number_or_string(mean + half)}},
            {"n", xs.size()}};
}

void write_json(const std::filesystem::path &path, const json &j)
{
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), Errc::io, "cannot open " + path.string());
    f << j.dump(2) << '\n';
    require(static_cast<bool>(f), Errc::io, "write failed for " + path.string());
}

} // namespace

json summarize(const ExperimentConfig &cfg, const std::vector<ResultRow> &rows,
               const std::map<std::string, EllipseAccumulator> &pooled, const std::vector<FitRecord> &fits)
{
    struct Cell
    {
        std::vector<const ResultRow *> rows;
    };
    std::map<std::string, Cell> by_key;
    for (const ResultRow &r : rows)
        by_key[cell_key(r.model, r.estimator, r.delta, r.snr_db)].rows.push_back(&r);

    json cells = json::array();
    for (CovarianceModel m : cfg.models)
        for (EstimatorKind est : cfg.estimators)
        {
            const std::vector<int> deltas = uses_stride(est) ? cfg.strides : std::vector<int>{1};
            for (int delta : deltas)
                for (double snr : cfg.snr_db)
                {
                    const std::string key = cell_key(m, est, delta, snr);
                    auto it = by_key.find(key);
                    if (it == by_key.end())
                        continue;
                    std::vector<double> nmse, se_true, se_est, rel, cov, area, ratio, wall, nmse_lin;
                    int failed = 0, pilot_len = 0;
                    double jitter_max = 0.0;
                    for (const ResultRow *r : it->second.rows)
                    {
                        pilot_len = r->pilot_len;
                        if (!r->error.empty())
                        {
                            ++failed;
                            continue;
                        }
                        nmse.push_back(r->nmse_db);
                        nmse_lin.push_back(std::pow(10.0, r->nmse_db / 10.0));
                        se_true.push_back(r->se_true);
                        se_est.push_back(r->se_est);
                        rel.push_back(r->relative_se);
                        cov.push_back(r->coverage);
                        area.push_back(r->area95);
                        ratio.push_back(r->axis_ratio);
                        wall.push_back(r->wall_time_ms);
                        jitter_max = std::max(jitter_max, r->jitter_used);
                    }
                    json c = {{"key", key},
                              {"model", model_name(m)},
                              {"estimator", estimator_name(est)},
                              {"delta", delta},
                              {"pilot_len", pilot_len},
                              {"snr_db", snr},
                              {"trials", nmse.size()},
                              {"failed", failed},
                              {"nmse_db", mean_ci(nmse)},
                              {"se_true", mean_ci(se_true)},
                              {"se_est", mean_ci(se_est)},
                              {"relative_se", mean_ci(rel)},
                              {"coverage", mean_ci(cov)},
                              {"area95", mean_ci(area)},
                              {"axis_ratio", mean_ci(ratio)},
                              {"wall_time_ms", mean_ci(wall)},
                              {"jitter_max", jitter_max}};
                    if (!nmse_lin.empty())
                    {
                        double s = 0.0;
                        for (double x : nmse_lin)
                            s += x;
                        c["nmse_db_of_mean"] = number_or_string(10.0 * std::log10(s / nmse_lin.size()));
                    }
                    if (auto p = pooled.find(key); p != pooled.end() && p->second.count() > 0)
                    {
                        const EllipseStats st = p->second.stats();
                        c["pooled"] = {{"area95", number_or_string(st.area95)},
                                       {"axis_ratio", number_or_string(st.axis_ratio)},
                                       {"coverage", number_or_string(st.coverage)},
                                       {"n_errors", p->second.count()}};
                    }
                    for (const FitRecord &f : fits)
                        if (f.model == m && f.estimator == est && f.delta == delta && f.snr_db == snr)
                        {
                            json fj = {{"scale", f.fitted.scale}, {"lengthscale", f.fitted.lengthscale}};
                            if (est == EstimatorKind::RQ_GPR)
                                fj["rq_alpha"] = f.fitted.rq_alpha;
                            c["fitted"] = fj;
                        }
                    cells.push_back(std::move(c));
                }
        }
    return {{"schema_version", kSchemaVersion}, {"cells", cells}};
}

ExperimentResult run_experiment(const ExperimentConfig &cfg, const RunOptions &opts)
{
    cfg.validate();
    ExperimentResult result;

    std::ofstream csv_out;
    std::filesystem::path dir(cfg.output_dir);
    if (opts.write_files)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        require(!ec, Errc::io, "cannot create output directory " + dir.string() + ": " + ec.message());
        csv_out.open(dir / "results.csv", std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(csv_out), Errc::io, "cannot open " + (dir / "results.csv").string());
        csv::Writer(csv_out).row(csv_header());
    }

    std::map<std::string, EllipseAccumulator> pooled;
    json models_meta = json::array();

    for (CovarianceModel model : cfg.models)
    {
        ModelContext ctx;
        ctx.model = model;
        auto t0 = std::chrono::steady_clock::now();
        ctx.cov = std::make_shared<const ChannelCovariance>(
            model_covariance(model, cfg.shape, cfg.geometry, cfg.coupling_seed));
        ctx.sampler = std::make_unique<ChannelSampler>(*ctx.cov);
        for (EstimatorKind est : cfg.estimators)
            if (uses_stride(est))
                for (int d : cfg.strides)
                    if (!ctx.plans.count(d))
                        ctx.plans.emplace(d, make_plan(cfg.shape, d));
        ctx.full_plan = make_plan(cfg.shape, 1, cfg.shape.n_tx);
        if (std::find(cfg.estimators.begin(), cfg.estimators.end(), EstimatorKind::MMSE_FULL) != cfg.estimators.end())
            for (double snr : cfg.snr_db)
                ctx.mmse_variance.push_back(mmse_full_error_variance(*ctx.cov, noise_variance(snr)));
        if (opts.log)
        {
            std::ostringstream msg;
            msg << "model " << model_name(model) << " ready in " << elapsed_ms(t0) << " ms";
            opts.log(msg.str());
        }

        prepare_fits(cfg, ctx, result.fits, opts);

        json plans = json::object();
        for (const auto &[d, plan] : ctx.plans)
            plans[std::to_string(d)] = {{"n_active", plan.n_active()}, {"pilot_len", plan.pilot_len}};
        models_meta.push_back({{"model", model_name(model)}, {"plans", plans}});

        int done = 0;
        run_trials(cfg, ctx, [&](TrialOutput out) {
            if (opts.write_files)
            {
                csv::Writer w(csv_out);
                for (const ResultRow &r : out.rows)
                    w.row(csv_fields(r));
                csv_out.flush();
                require(static_cast<bool>(csv_out), Errc::io, "write failed for results.csv");
            }
            for (std::size_t j = 0; j < out.rows.size(); ++j)
            {
                const ResultRow &r = out.rows[j];
                if (r.error.empty())
                    pooled[cell_key(r.model, r.estimator, r.delta, r.snr_db)].merge(out.ellipses[j]);
                result.rows.push_back(r);
            }
            ++done;
            if (opts.log && (done % 10 == 0 || done == cfg.trials))
                opts.log(std::string(model_name(model)) + ": " + std::to_string(done) + "/" +
                         std::to_string(cfg.trials) + " trials");
        });
    }

    result.summary = summarize(cfg, result.rows, pooled, result.fits);

    json fits = json::array();
    for (const FitRecord &f : result.fits)
    {
        json fj = {{"model", model_name(f.model)},
                   {"estimator", estimator_name(f.estimator)},
                   {"delta", f.delta},
                   {"snr_db", f.snr_db},
                   {"scale", f.fitted.scale},
                   {"lengthscale", f.fitted.lengthscale},
                   {"lml_initial", number_or_string(f.lml_initial)},
                   {"lml_final", number_or_string(f.lml_final)},
                   {"iterations", f.iterations},
                   {"error", f.error}};
        if (f.estimator == EstimatorKind::RQ_GPR)
            fj["rq_alpha"] = f.fitted.rq_alpha;
        fits.push_back(fj);
    }
    result.meta = {{"schema_version", kSchemaVersion},
                   {"code_version", SCGPR_VERSION},
                   {"config", config_to_json(cfg)},
                   {"rng",
                    {{"generator", "splitmix64-counter"},
                     {"trial_seed", "seed ^ mix64(trial + 0x9E3779B97F4A7C15)"},
                     {"channel_stream", kChannelStream},
                     {"noise_stream_base", kNoiseStreamBase}}},
                   {"models", models_meta},
                   {"fits", fits}};

    if (opts.write_files)
    {
        csv_out.close();
        write_json(dir / "summary.json", result.summary);
        write_json(dir / "meta.json", result.meta);
    }
    return result;
}

} // namespace scgpr
