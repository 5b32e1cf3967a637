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

// scgpr command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scgpr/scgpr.h"

using nlohmann::json;

namespace
{

int report(scgpr_status st, const char *what)
{
    std::cerr << "scgpr: " << what << " failed (" << scgpr_status_name(st) << "): " << scgpr_last_error() << '\n';
    return 1;
}

void log_line(const char *msg, void *) { std::cerr << msg << '\n'; }

std::string take(char *s)
{
    std::string out(s ? s : "");
    scgpr_string_free(s);
    return out;
}

json number_list(const std::vector<std::string> &items, bool snr)
{
    json arr = json::array();
    for (const std::string &s : items)
    {
        if (snr && (s == "inf" || s == "+inf"))
        {
            arr.push_back("inf");
            continue;
        }
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw CLI::ValidationError("not a number: " + s);
        if (snr)
            arr.push_back(v);
        else
            arr.push_back(static_cast<int>(v));
    }
    return arr;
}

std::string fmt(const json &cell, const char *key, int prec = 2)
{
    if (!cell.contains(key) || cell[key].is_null())
        return "-";
    const json &v = cell[key].is_object() ? cell[key]["mean"] : cell[key];
    if (v.is_string())
        return v.get<std::string>();
    if (!v.is_number())
        return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v.get<double>());
    return buf;
}

void print_summary(const json &summary)
{
    std::printf("%-15s %-11s %5s %5s %7s %10s %8s %8s %10s\n", "model", "estimator", "delta", "T", "snr_db", "nmse_db",
                "rel_se", "cover", "area95");
    for (const json &c : summary["cells"])
    {
        const std::string area = c.contains("pooled") ? fmt(c["pooled"], "area95", 6) : "-";
        std::printf("%-15s %-11s %5d %5d %7.1f %10s %8s %8s %10s\n", c["model"].get<std::string>().c_str(),
                    c["estimator"].get<std::string>().c_str(), c["delta"].get<int>(), c["pilot_len"].get<int>(),
                    c["snr_db"].get<double>(), fmt(c, "nmse_db").c_str(), fmt(c, "relative_se", 3).c_str(),
                    c.contains("pooled") ? fmt(c["pooled"], "coverage", 3).c_str() : "-", area.c_str());
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Correlated-MIMO channel estimation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(scgpr_version()));

    auto *run = app.add_subcommand("run", "Monte Carlo experiment; writes results.csv, summary.json, meta.json");
    std::string config_path, out_dir, model;
    std::string seed;
    int trials = 0, threads = 0;
    std::vector<std::string> estimators, snr_db, strides;
    bool quiet = false;
    run->add_option("--config", config_path, "JSON config file (comments allowed)")->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "master seed (64-bit)");
    run->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--estimators", estimators, "comma list, e.g. SC_GPR,RBF_GPR,LS")->delimiter(',');
    run->add_option("--model", model, "Kronecker | Weichselberger (comma list allowed)");
    run->add_option("--snr-db", snr_db, "comma list of SNRs in dB; inf = noiseless")->delimiter(',');
    run->add_option("--strides", strides, "comma list of pilot strides")->delimiter(',');
    run->add_option("--threads", threads, "worker threads for trials")->check(CLI::PositiveNumber);
    run->add_flag("--quiet,-q", quiet, "no progress output");

    auto *timing = app.add_subcommand("timing", "wall-time scan over square grid sizes");
    std::vector<int> sizes;
    int stride = 2, fit_iters = 20, reps = 3;
    std::vector<std::string> timing_estimators;
    std::string timing_model = "Kronecker", timing_out;
    timing->add_option("--sizes", sizes, "comma list of N for N x N grids (at least 3)")->delimiter(',')->required();
    timing->add_option("--stride", stride, "pilot stride for GPR estimators");
    timing->add_option("--estimators", timing_estimators, "comma list")->delimiter(',');
    timing->add_option("--fit-iters", fit_iters, "Q for learned kernels");
    timing->add_option("--repetitions", reps, "runs per point (median reported)");
    timing->add_option("--model", timing_model, "covariance model");
    timing->add_option("--out", timing_out, "write the JSON report here");

    CLI11_PARSE(app, argc, argv);

    if (*run)
    {
        json cfg = json::object();
        if (!config_path.empty())
        {
            std::ifstream f(config_path);
            try
            {
                cfg = json::parse(f, nullptr, true, true);
            }
            catch (const json::exception &e)
            {
                std::cerr << "scgpr: cannot parse " << config_path << ": " << e.what() << '\n';
                return 2;
            }
        }
        try
        {
            if (!seed.empty())
                cfg["seed"] = seed;
            if (trials > 0)
                cfg["trials"] = trials;
            if (!out_dir.empty())
                cfg["output_dir"] = out_dir;
            if (!estimators.empty())
                cfg["estimators"] = estimators;
            if (!model.empty())
            {
                cfg.erase("models");
                std::vector<std::string> ms;
                std::stringstream ss(model);
                for (std::string m; std::getline(ss, m, ',');)
                    ms.push_back(m);
                cfg["model"] = ms;
            }
            if (!snr_db.empty())
                cfg["snr_db"] = number_list(snr_db, true);
            if (!strides.empty())
                cfg["strides"] = number_list(strides, false);
            if (threads > 0)
                cfg["threads"] = threads;
        }
        catch (const std::exception &e)
        {
            std::cerr << "scgpr: bad option: " << e.what() << '\n';
            return 2;
        }

        scgpr_experiment *exp = nullptr;
        if (scgpr_status st = scgpr_experiment_create(cfg.dump().c_str(), &exp); st != SCGPR_OK)
            return report(st, "config");
        scgpr_status st = scgpr_experiment_run(exp, 1, quiet ? nullptr : log_line, nullptr);
        if (st != SCGPR_OK)
        {
            scgpr_experiment_free(exp);
            return report(st, "run");
        }
        char *summary = nullptr, *config = nullptr;
        st = scgpr_experiment_summary_json(exp, &summary);
        if (st == SCGPR_OK)
            st = scgpr_experiment_config_json(exp, &config);
        scgpr_experiment_free(exp);
        if (st != SCGPR_OK)
            return report(st, "summary");
        const json used = json::parse(take(config));
        print_summary(json::parse(take(summary)));
        std::cout << "wrote " << used["output_dir"].get<std::string>() << "/{results.csv,summary.json,meta.json}\n";
        return 0;
    }

    if (*timing)
    {
        json req = {{"sizes", sizes}, {"stride", stride}, {"fit_iters", fit_iters}, {"repetitions", reps},
                    {"model", timing_model}};
        if (!timing_estimators.empty())
            req["estimators"] = timing_estimators;
        char *out = nullptr;
        if (scgpr_status st = scgpr_timing_scan(req.dump().c_str(), &out); st != SCGPR_OK)
            return report(st, "timing");
        const json rep = json::parse(take(out));
        std::printf("%-11s %5s %8s %12s\n", "estimator", "N", "size", "median_ms");
        for (const json &r : rep["rows"])
            std::printf("%-11s %5d %8d %12.3f\n", r["estimator"].get<std::string>().c_str(), r["size"].get<int>(),
                        r["problem_size"].get<int>(), r["median_ms"].get<double>());
        for (auto it = rep["slopes"].begin(); it != rep["slopes"].end(); ++it)
            std::printf("slope %-11s %s\n", it.key().c_str(),
                        it.value().is_number() ? std::to_string(it.value().get<double>()).c_str() : "n/a");
        if (!timing_out.empty())
        {
            std::ofstream f(timing_out);
            f << rep.dump(2) << '\n';
            if (!f)
            {
                std::cerr << "scgpr: cannot write " << timing_out << '\n';
                return 1;
            }
        }
        return 0;
    }
    return 0;
}
