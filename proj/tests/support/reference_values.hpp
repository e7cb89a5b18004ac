// Copyright 2026 The memguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference per-agent KPI means and the tables derived from them, rounded as
// reported (4 decimals for THS, 1 for percentages, 3 for KPI deltas).

#pragma once

#include <array>
#include <string>
#include <vector>

#include "memguard/kpi.hpp"
#include "memguard/pipeline.hpp"

namespace memguard::testing {

// frontend, second_reviewer, third_reviewer
inline const std::array<KpiVector, 3> kReferenceKpiMeans = {{
    {0.477, 0.303, 0.135, 0.348, 0.146},
    {0.436, 0.310, 0.208, 0.510, 0.395},
    {0.488, 0.273, 0.184, 0.551, 0.086},
}};

struct StageThsRow {
    std::string config;
    std::array<double, 3> ths;
    double delta_percent;
};

// Config order matches default_weight_configs().
inline const std::vector<StageThsRow> kReferenceStageThs = {
    {"Baseline", {-0.0303, -0.0658, -0.0404}, -33.4},
    {"ObservabilityAware", {-0.0451, -0.0875, -0.0594}, -31.9},
    {"SecurityFirst", {-0.0204, -0.0513, -0.0277}, -35.9},
    {"ResearchMode", {-0.0500, -0.0947, -0.0658}, -31.6},
    {"ExtremeObservability", {-0.0540, -0.1005, -0.0709}, -31.3},
};

// Final-stage ranking, most negative first.
inline const std::vector<std::pair<std::string, double>> kReferenceFinalStage = {
    {"ExtremeObservability", -0.0709}, {"ResearchMode", -0.0658}, {"ObservabilityAware", -0.0594},
    {"Baseline", -0.0404},             {"SecurityFirst", -0.0277},
};

// FCD, FGR, FDF, ECS
inline const std::array<double, 4> kReferenceTrend12 = {-0.041, +0.007, +0.073, +0.162};
inline const std::array<double, 4> kReferenceTrend23 = {+0.052, -0.037, -0.024, +0.041};

/// n synthetic results whose every stage carries the reference KPI means, so
/// summarize() sees exactly those means.
inline std::vector<RunResult> synthetic_results(std::size_t n, const std::vector<WeightConfig>& weights) {
    std::vector<RunResult> out;
    for (std::size_t i = 0; i < n; ++i) {
        RunResult r;
        r.prompt_id = static_cast<int>(i + 1);
        r.prompt_text = "synthetic prompt " + std::to_string(i + 1);
        for (std::size_t s = 0; s < 3; ++s) {
            auto& st = r.stages[s];
            st.output.agent_name = kPipelineRoles[s];
            st.output.raw_text = "x";
            st.output.utterance = "x";
            st.output.cache_event = (i + s) % 3 == 0 ? CacheEvent::mtm_hit : CacheEvent::miss_generated;
            st.kpi = kReferenceKpiMeans[s];
            st.osr.final = st.kpi.osr;
            st.osr.disclaimer_score = static_cast<double>(i % 4) / 4.0;
            for (const auto& w : weights) st.ths.push_back(ths(st.kpi, w));
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace memguard::testing
