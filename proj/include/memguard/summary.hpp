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

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memguard/pipeline.hpp"
#include "memguard/stats.hpp"

namespace memguard {

struct AgentCacheRow {
    AgentRole agent = AgentRole::frontend;
    std::int64_t hits = 0;
    std::int64_t misses = 0;
    std::int64_t mtm_hits = 0;
    std::int64_t ltm_migrations = 0;

    double hit_rate() const {
        const auto n = hits + misses;
        return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
    }
};

// Table-4 style row: ideal direction and the two stage-to-stage deltas.
struct KpiTrend {
    std::string kpi;
    bool lower_is_better = false;
    double first_to_second = 0.0;
    double second_to_third = 0.0;

    bool improved(double delta) const { return lower_is_better ? delta < 0.0 : delta > 0.0; }
};

struct CacheGroupComparison {
    std::size_t n_hit = 0;
    std::size_t n_no_hit = 0;
    std::optional<double> hit_mean;
    std::optional<double> no_hit_mean;
    std::optional<double> impact_percent;  // delta_percent(no_hit_mean, hit_mean)
};

struct Correlation {
    AgentRole agent = AgentRole::frontend;
    std::optional<double> pearson;
    std::optional<double> spearman;
    std::string error;
};

struct RunSummary {
    std::size_t prompts_total = 0;
    std::size_t prompts_evaluated = 0;
    std::size_t prompts_skipped = 0;
    std::size_t degraded_extractions = 0;

    std::array<KpiVector, 3> kpi_means{};
    std::array<AgentCacheRow, 3> cache{};
    std::int64_t total_hits = 0;
    std::int64_t total_misses = 0;
    double aggregate_hit_rate = 0.0;
    double call_volume_reduction = 0.0;  // total hits / (3 x evaluated prompts)

    std::vector<std::string> config_names;
    std::vector<std::array<double, 3>> ths_means;          // [config][stage]
    std::vector<std::optional<double>> delta_percent_1_3;  // [config]
    std::array<KpiTrend, 4> trends{};

    std::vector<int> prompt_ids;                                     // evaluated prompts in run order
    std::vector<int> hits_per_prompt;                                // 0..3
    std::vector<std::int64_t> cumulative_hits;
    std::vector<double> rolling_hit_rate;                            // trailing window over any-stage-hit
    std::vector<std::vector<std::array<double, 3>>> per_prompt_ths;  // [config][prompt][stage]
    std::vector<CacheGroupComparison> cache_groups;                  // [config], third stage
    std::vector<std::array<std::vector<double>, 3>> ths_cdf;         // [config][stage] sorted

    std::array<Correlation, 3> correlations{};
};

struct CorrelationInput {
    std::vector<double> fdf;
    std::vector<double> disclaimer_score;
};

/// Pearson and Spearman correlation between per-prompt FDF and the OSR
/// disclaimer sub-score of one stage. Throws when undefined.
inline std::pair<double, double> correlations(std::span<const RunResult> results, AgentRole agent) {
    const auto s = stage_index(agent);
    std::vector<double> fdf;
    std::vector<double> disc;
    for (const auto& r : results) {
        if (r.skipped) continue;
        fdf.push_back(r.stages[s].kpi.fdf);
        disc.push_back(r.stages[s].osr.disclaimer_score);
    }
    if (fdf.size() < 3) throw Error("correlations: need at least 3 evaluated prompts");
    return {stats::pearson(fdf, disc), stats::spearman(fdf, disc)};
}

inline RunSummary summarize(std::span<const RunResult> results, std::span<const WeightConfig> weights,
                            std::size_t rolling_window = 10) {
    RunSummary sum;
    sum.prompts_total = results.size();
    std::vector<const RunResult*> kept;
    for (const auto& r : results) {
        if (r.skipped) {
            ++sum.prompts_skipped;
        } else {
            kept.push_back(&r);
        }
        if (r.stages[1].output.degraded) ++sum.degraded_extractions;
    }
    if (kept.empty()) throw Error("summarize: every prompt was skipped");
    sum.prompts_evaluated = kept.size();
    const auto n = static_cast<double>(kept.size());
    const auto nc = weights.size();
    for (const auto* r : kept) {
        if (r->stages[0].ths.size() != nc) throw Error("summarize: result THS count does not match weight configs");
    }

    for (std::size_t s = 0; s < 3; ++s) {
        KpiVector m;
        auto& row = sum.cache[s];
        row.agent = kPipelineRoles[s];
        for (const auto* r : kept) {
            const auto& k = r->stages[s].kpi;
            m.fcd += k.fcd;
            m.fgr += k.fgr;
            m.fdf += k.fdf;
            m.ecs += k.ecs;
            m.osr += k.osr;
            switch (r->stages[s].output.cache_event) {
                case CacheEvent::mtm_hit: ++row.mtm_hits; ++row.hits; break;
                case CacheEvent::ltm_migration: ++row.ltm_migrations; ++row.hits; break;
                case CacheEvent::miss_generated: ++row.misses; break;
            }
        }
        sum.kpi_means[s] = {m.fcd / n, m.fgr / n, m.fdf / n, m.ecs / n, m.osr / n};
        sum.total_hits += row.hits;
        sum.total_misses += row.misses;
    }
    sum.aggregate_hit_rate = static_cast<double>(sum.total_hits) / static_cast<double>(sum.total_hits + sum.total_misses);
    sum.call_volume_reduction = static_cast<double>(sum.total_hits) / (3.0 * n);

    const auto& k = sum.kpi_means;
    sum.trends = {KpiTrend{"FCD", true, k[1].fcd - k[0].fcd, k[2].fcd - k[1].fcd},
                  KpiTrend{"FGR", false, k[1].fgr - k[0].fgr, k[2].fgr - k[1].fgr},
                  KpiTrend{"FDF", false, k[1].fdf - k[0].fdf, k[2].fdf - k[1].fdf},
                  KpiTrend{"ECS", false, k[1].ecs - k[0].ecs, k[2].ecs - k[1].ecs}};

    sum.per_prompt_ths.assign(nc, {});
    sum.ths_cdf.assign(nc, {});
    for (const auto& w : weights) sum.config_names.push_back(w.name);
    for (std::size_t c = 0; c < nc; ++c) {
        std::array<double, 3> acc{};
        CacheGroupComparison g;
        double hit_acc = 0.0;
        double no_hit_acc = 0.0;
        for (const auto* r : kept) {
            std::array<double, 3> row{};
            for (std::size_t s = 0; s < 3; ++s) {
                row[s] = r->stages[s].ths[c];
                acc[s] += row[s];
                sum.ths_cdf[c][s].push_back(row[s]);
            }
            sum.per_prompt_ths[c].push_back(row);
            if (r->any_cache_hit()) {
                ++g.n_hit;
                hit_acc += row[2];
            } else {
                ++g.n_no_hit;
                no_hit_acc += row[2];
            }
        }
        sum.ths_means.push_back({acc[0] / n, acc[1] / n, acc[2] / n});
        if (sum.ths_means.back()[0] != 0.0) {
            sum.delta_percent_1_3.push_back(delta_percent(sum.ths_means.back()[0], sum.ths_means.back()[2]));
        } else {
            sum.delta_percent_1_3.push_back(std::nullopt);
        }
        if (g.n_hit > 0) g.hit_mean = hit_acc / static_cast<double>(g.n_hit);
        if (g.n_no_hit > 0) g.no_hit_mean = no_hit_acc / static_cast<double>(g.n_no_hit);
        if (g.hit_mean && g.no_hit_mean && *g.no_hit_mean != 0.0) {
            g.impact_percent = delta_percent(*g.no_hit_mean, *g.hit_mean);
        }
        sum.cache_groups.push_back(g);
        for (auto& v : sum.ths_cdf[c]) std::sort(v.begin(), v.end());
    }

    std::int64_t cumulative = 0;
    std::vector<int> any_hit;
    for (const auto* r : kept) {
        int h = 0;
        for (const auto& s : r->stages) h += is_hit(s.output.cache_event) ? 1 : 0;
        cumulative += h;
        sum.prompt_ids.push_back(r->prompt_id);
        sum.hits_per_prompt.push_back(h);
        sum.cumulative_hits.push_back(cumulative);
        any_hit.push_back(h > 0 ? 1 : 0);
    }
    const std::size_t window = std::max<std::size_t>(rolling_window, 1);
    for (std::size_t i = 0; i < any_hit.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        int hits = 0;
        for (std::size_t j = lo; j <= i; ++j) hits += any_hit[j];
        sum.rolling_hit_rate.push_back(static_cast<double>(hits) / static_cast<double>(i - lo + 1));
    }

    for (std::size_t s = 0; s < 3; ++s) {
        auto& c = sum.correlations[s];
        c.agent = kPipelineRoles[s];
        try {
            auto [p, sp] = correlations(results, kPipelineRoles[s]);
            c.pearson = p;
            c.spearman = sp;
        } catch (const Error& e) {
            c.error = e.what();
        }
    }
    return sum;
}

}  // namespace memguard
