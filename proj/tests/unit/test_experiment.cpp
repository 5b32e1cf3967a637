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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "core/csv.hpp"
#include "core/experiment.hpp"
#include "test_util.hpp"

using namespace scgpr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
    const char *env = std::getenv("SCGPR_TEST_TMP");
    fs::path p = fs::path(env ? env : fs::temp_directory_path().string()) / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

// Drops the wall_time_ms column.
std::string without_timing(const std::string &csv)
{
    std::istringstream in(csv);
    std::string line, out;
    int col = -1;
    while (std::getline(in, line))
    {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');)
            f.push_back(x);
        if (col < 0)
            for (std::size_t i = 0; i < f.size(); ++i)
                if (f[i] == "wall_time_ms")
                    col = static_cast<int>(i);
        f.erase(f.begin() + col);
        for (auto &x : f)
            out += x + ",";
        out += "\n";
    }
    return out;
}

ExperimentConfig small_config(const std::string &dir)
{
    ExperimentConfig c = config_from_json(json::parse(R"({
        "shape": [6, 6], "model": ["Kronecker", "Weichselberger"], "strides": [2, 3],
        "snr_db": [0, 10], "trials": 3, "seed": 5, "gpr_fit": {"max_iters": 8}})"));
    c.output_dir = dir;
    return c;
}

} // namespace

TEST(Config, DefaultsFollowTheSimulationSetup)
{
    const ExperimentConfig c = config_from_json(json::object());
    EXPECT_EQ(c.shape, (GridShape{36, 36}));
    EXPECT_EQ(c.strides, (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(c.snr_db, (std::vector<double>{-10, -5, 0, 5, 10, 15, 20}));
    EXPECT_EQ(c.trials, 200);
    EXPECT_EQ(c.estimators.size(), 6u);
    EXPECT_EQ(c.gpr_fit.max_iters, 50);
}

TEST(Config, JsonRoundTrip)
{
    const json j = json::parse(R"({
        "shape": {"n_rx": 4, "n_tx": 8}, "models": "Weichselberger", "strides": [1, 4],
        "snr_db": [-3.5, "inf"], "trials": 7, "estimators": ["SC", "rq_gpr", "LS"],
        "seed": "0xFFFFFFFFFFFFFFFF", "coupling_seed": 3,
        "geometry": {"spread_rad": 0.4},
        "gpr_fit": {"max_iters": 12, "init": {"RQ_GPR": {"lengthscale": 1.5, "rq_alpha": 2}},
                    "bounds": {"RBF_GPR": {"lengthscale": [0.1, 3]}}},
        "observed_entries": "pass_through", "output_dir": "x", "threads": 2})");
    const ExperimentConfig c = config_from_json(j);
    EXPECT_EQ(c.shape, (GridShape{4, 8}));
    EXPECT_EQ(c.snr_db[1], kNoiselessSnrDb);
    EXPECT_EQ(c.seed, 0xFFFFFFFFFFFFFFFFULL);
    EXPECT_EQ(c.estimators, (std::vector<EstimatorKind>{EstimatorKind::SC_GPR, EstimatorKind::RQ_GPR, EstimatorKind::LS}));
    EXPECT_EQ(c.gpr_fit.init_for(KernelFamily::RQ).rq_alpha, 2.0);
    EXPECT_EQ(c.gpr_fit.bounds_for(KernelFamily::RBF).lengthscale.hi, 3.0);
    EXPECT_EQ(c.geometry.spread_rad, 0.4);
    EXPECT_EQ(c.observed, ObservedEntries::PassThrough);

    const ExperimentConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, RejectsInvalidInput)
{
    EXPECT_ERRC(config_from_json(json::parse(R"({"trials": 0})")), Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"shape": [4, 4], "strides": [5]})")), Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"bogus": 1})")), Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"estimators": ["KALMAN"]})")), Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"model": "Rayleigh"})")), Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"gpr_fit": {"bounds": {"RBF_GPR": {"scale": [-1, 2]}}}})")),
                Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"gpr_fit": {"init": {"SC_GPR": {"scale": 1}}}})")),
                Errc::invalid_argument);
    EXPECT_ERRC(config_from_json(json::parse(R"({"trials": "many"})")), Errc::invalid_argument);
}

TEST(Experiment, EveryCellAppearsOnceAndFilesAreWritten)
{
    const fs::path dir = scratch("cells");
    const ExperimentConfig cfg = small_config(dir.string());
    const ExperimentResult res = run_experiment(cfg);

    // 2 models x 3 trials x 2 snr x (4 GPR x 2 strides + LS + MMSE_FULL)
    EXPECT_EQ(res.rows.size(), 2u * 3 * 2 * 10);
    std::set<std::string> keys;
    for (const ResultRow &r : res.rows)
    {
        EXPECT_TRUE(keys.insert(cell_key(r.model, r.estimator, r.delta, r.snr_db) + "#" + std::to_string(r.trial))
                        .second);
        EXPECT_TRUE(r.error.empty()) << r.error;
        EXPECT_GT(r.wall_time_ms, 0.0);
        EXPECT_EQ(r.pilot_len, uses_stride(r.estimator) ? (r.delta == 2 ? 3 : 2) : 6);
    }
    ASSERT_TRUE(fs::exists(dir / "results.csv"));
    ASSERT_TRUE(fs::exists(dir / "summary.json"));
    ASSERT_TRUE(fs::exists(dir / "meta.json"));

    const std::string csv = slurp(dir / "results.csv");
    EXPECT_EQ(csv.substr(0, csv.find("\r\n")),
              "schema_version,model,estimator,delta,pilot_len,snr_db,trial,nmse_db,se_true,se_est,relative_se,"
              "coverage,area95,axis_ratio,wall_time_ms,jitter_used,error");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(res.rows.size()) + 1);

    const json summary = json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["cells"].size(), 2u * 2 * 10);
    for (const json &c : summary["cells"])
    {
        EXPECT_EQ(c["trials"].get<int>(), 3);
        EXPECT_TRUE(c.contains("pooled"));
        const double m = c["nmse_db"]["mean"].get<double>();
        EXPECT_LE(c["nmse_db"]["ci95"][0].get<double>(), m);
        EXPECT_GE(c["nmse_db"]["ci95"][1].get<double>(), m);
    }
    const json meta = json::parse(slurp(dir / "meta.json"));
    EXPECT_EQ(meta["code_version"], SCGPR_VERSION);
    EXPECT_EQ(meta["config"], config_to_json(cfg));
    EXPECT_EQ(meta["fits"].size(), 2u * 3 * 2 * 2);
}

TEST(Experiment, SummaryMeansMatchRows)
{
    ExperimentConfig cfg = small_config("");
    cfg.models = {CovarianceModel::Kronecker};
    cfg.estimators = {EstimatorKind::SC_GPR};
    cfg.strides = {2};
    cfg.snr_db = {5};
    const ExperimentResult res = run_experiment(cfg, {false, {}});
    double s = 0;
    for (const auto &r : res.rows)
        s += r.nmse_db;
    EXPECT_NEAR(res.summary["cells"][0]["nmse_db"]["mean"].get<double>(), s / 3, 1e-12);
}

TEST(Experiment, DeterministicAcrossRunsAndThreadCounts)
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ExperimentConfig ca = small_config(a.string()), cb = small_config(b.string());
    cb.threads = 3;
    run_experiment(ca);
    run_experiment(cb);
    const std::string sa = slurp(a / "results.csv"), sb = slurp(b / "results.csv");
    EXPECT_NE(sa, "");
    EXPECT_EQ(without_timing(sa), without_timing(sb));

    ExperimentConfig cc = small_config(scratch("det_c").string());
    cc.seed = 6;
    run_experiment(cc);
    EXPECT_NE(without_timing(sa), without_timing(slurp(fs::path(cc.output_dir) / "results.csv")));
}

TEST(Experiment, NoiselessLeastSquaresIsExact)
{
    ExperimentConfig cfg = config_from_json(json::parse(
        R"({"shape": [8, 8], "estimators": ["LS"], "snr_db": ["inf"], "trials": 1, "model": "Kronecker"})"));
    const ExperimentResult res = run_experiment(cfg, {false, {}});
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_EQ(res.rows[0].delta, 1);
    EXPECT_LT(res.rows[0].nmse_db, -60.0);
}

TEST(Experiment, FullSizePilotLengthsInMetadata)
{
    ExperimentConfig cfg = config_from_json(json::parse(
        R"({"estimators": ["SC_GPR"], "snr_db": [0], "trials": 1, "model": "Kronecker"})"));
    const ExperimentResult res = run_experiment(cfg, {false, {}});
    const json plans = res.meta["models"][0]["plans"];
    EXPECT_EQ(plans["2"]["pilot_len"], 18);
    EXPECT_EQ(plans["3"]["pilot_len"], 12);
    EXPECT_EQ(plans["4"]["pilot_len"], 9);
    for (const auto &r : res.rows)
        EXPECT_EQ(r.pilot_len, r.delta == 2 ? 18 : r.delta == 3 ? 12 : 9);
}

TEST(Experiment, ErrorRowsKeepTheirPlace)
{
    ResultRow r;
    r.model = CovarianceModel::Kronecker;
    r.estimator = EstimatorKind::RBF_GPR;
    r.delta = 2;
    r.nmse_db = std::nan("");
    r.error = "init_failure: log marginal likelihood, not finite";
    const auto f = csv_fields(r);
    ASSERT_EQ(f.size(), csv_header().size());
    EXPECT_EQ(f[7], "nan");
    EXPECT_EQ(csv::join_row(f).substr(csv::join_row(f).rfind(",\"")), ",\"init_failure: log marginal likelihood, not finite\"");
}

TEST(Experiment, UnwritableOutputIsAnIoError)
{
    ExperimentConfig cfg = small_config("/proc/scgpr-cannot-create");
    EXPECT_ERRC(run_experiment(cfg), Errc::io);
}

TEST(Estimators, NamesRoundTrip)
{
    for (auto k : {EstimatorKind::SC_GPR, EstimatorKind::RBF_GPR, EstimatorKind::MATERN_GPR, EstimatorKind::RQ_GPR,
                   EstimatorKind::LS, EstimatorKind::MMSE_FULL})
        EXPECT_EQ(parse_estimator(estimator_name(k)), k);
    EXPECT_EQ(parse_estimator("mmse"), EstimatorKind::MMSE_FULL);
    EXPECT_TRUE(is_learned(EstimatorKind::RQ_GPR));
    EXPECT_FALSE(is_learned(EstimatorKind::SC_GPR));
    EXPECT_FALSE(uses_stride(EstimatorKind::LS));
}
