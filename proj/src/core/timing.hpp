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

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "covariance.hpp"
#include "experiment.hpp"

namespace scgpr
{

struct TimingRequest
{
    std::vector<int> sizes{12, 18, 24}; // square N x N grids
    int stride = 2;
    std::vector<EstimatorKind> estimators{EstimatorKind::SC_GPR, EstimatorKind::RBF_GPR, EstimatorKind::LS};
    int fit_iters = 20; // Q for learned kernels
    int repetitions = 3;
    double snr_db = 0.0;
    CovarianceModel model = CovarianceModel::Kronecker;
    ArrayGeometry geometry;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TimingRow
{
    EstimatorKind estimator;
    int size;         // N of the N x N grid
    int problem_size; // P for GPR estimators, N_r N_t otherwise
    double median_ms;
};

struct TimingReport
{
    std::vector<TimingRow> rows;
    // least-squares slope of log(median time) against log(problem size)
    std::map<EstimatorKind, double> slopes;
};

/// Median wall time per (estimator, size). Learned GPR includes the
/// Q-iteration fit; SC-GPR and MMSE_FULL exclude building R_H. The channel
/// is drawn i.i.d. since run time does not depend on its values.
TimingReport timing_scan(const TimingRequest &req);

TimingRequest timing_request_from_json(const nlohmann::json &j);
nlohmann::json timing_report_to_json(const TimingReport &report);

} // namespace scgpr
