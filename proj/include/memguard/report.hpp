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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "memguard/summary.hpp"

namespace memguard {

namespace report_detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string num(double v) { return format_double(v); }
inline std::string num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }

    void row(std::initializer_list<std::string> fields) {
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            out_ << csv_field(f);
            first = false;
        }
        out_ << '\n';
    }

    ~CsvWriter() = default;

    void close() {
        out_.flush();
        if (!out_) throw Error("failed writing " + path_.string());
        out_.close();
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace report_detail

inline nlohmann::json to_json(const KpiVector& k) {
    return {{"fcd", k.fcd}, {"fgr", k.fgr}, {"fdf", k.fdf}, {"ecs", k.ecs}, {"osr", k.osr}};
}

inline KpiVector kpi_from_json(const nlohmann::json& j) {
    return {j.at("fcd").get<double>(), j.at("fgr").get<double>(), j.at("fdf").get<double>(), j.at("ecs").get<double>(),
            j.at("osr").get<double>()};
}

inline nlohmann::json to_json(const OsrBreakdown& b) {
    return {{"reasoning_raw", b.reasoning_raw},     {"metadata_raw", b.metadata_raw},
            {"disclaimer_raw", b.disclaimer_raw},   {"reasoning_score", b.reasoning_score},
            {"metadata_score", b.metadata_score},   {"disclaimer_score", b.disclaimer_score},
            {"final", b.final}};
}

inline OsrBreakdown osr_breakdown_from_json(const nlohmann::json& j) {
    OsrBreakdown b;
    b.reasoning_raw = j.at("reasoning_raw").get<std::int64_t>();
    b.metadata_raw = j.at("metadata_raw").get<std::int64_t>();
    b.disclaimer_raw = j.at("disclaimer_raw").get<std::int64_t>();
    b.reasoning_score = j.at("reasoning_score").get<double>();
    b.metadata_score = j.at("metadata_score").get<double>();
    b.disclaimer_score = j.at("disclaimer_score").get<double>();
    b.final = j.at("final").get<double>();
    return b;
}

inline nlohmann::json to_json(const RunResult& r, std::span<const WeightConfig> weights) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : r.stages) {
        const auto& o = s.output;
        nlohmann::json js = {{"agent", to_string(o.agent_name)},
                             {"cache_event", to_string(o.cache_event)},
                             {"similarity", o.similarity},
                             {"latency_ms", o.latency_ms},
                             {"input", o.input_text},
                             {"utterance", o.utterance},
                             {"raw_text", o.raw_text},
                             {"degraded", o.degraded}};
        js["whisper_context"] = o.whisper_context ? nlohmann::json(*o.whisper_context) : nlohmann::json(nullptr);
        js["whisper_value"] = o.whisper_value ? nlohmann::json(*o.whisper_value) : nlohmann::json(nullptr);
        if (!r.skipped) {
            js["kpi"] = to_json(s.kpi);
            js["osr_breakdown"] = to_json(s.osr);
            nlohmann::json t = nlohmann::json::object();
            for (std::size_t c = 0; c < weights.size() && c < s.ths.size(); ++c) t[weights[c].name] = s.ths[c];
            js["ths"] = t;
        }
        stages.push_back(std::move(js));
    }
    return {{"prompt_id", r.prompt_id}, {"subset", to_string(r.subset)}, {"prompt", r.prompt_text},
            {"skipped", r.skipped},     {"skip_reason", r.skip_reason},  {"stages", stages}};
}

inline RunResult result_from_json(const nlohmann::json& j, std::span<const WeightConfig> weights) {
    RunResult r;
    r.prompt_id = j.at("prompt_id").get<int>();
    r.subset = j.at("subset").get<std::string>() == "realistic" ? Subset::realistic : Subset::stress_test;
    r.prompt_text = j.at("prompt").get<std::string>();
    r.skipped = j.at("skipped").get<bool>();
    r.skip_reason = j.at("skip_reason").get<std::string>();
    const auto& stages = j.at("stages");
    if (stages.size() != 3) throw Error("result line must have three stages");
    for (std::size_t s = 0; s < 3; ++s) {
        const auto& js = stages[s];
        auto& o = r.stages[s].output;
        o.agent_name = agent_role_from_string(js.at("agent").get<std::string>());
        o.cache_event = cache_event_from_string(js.at("cache_event").get<std::string>());
        o.similarity = js.at("similarity").get<double>();
        o.latency_ms = js.at("latency_ms").get<double>();
        o.input_text = js.at("input").get<std::string>();
        o.utterance = js.at("utterance").get<std::string>();
        o.raw_text = js.at("raw_text").get<std::string>();
        o.degraded = js.at("degraded").get<bool>();
        if (!js.at("whisper_context").is_null()) o.whisper_context = js.at("whisper_context").get<std::string>();
        if (!js.at("whisper_value").is_null()) o.whisper_value = js.at("whisper_value").get<std::string>();
        if (!r.skipped) {
            r.stages[s].kpi = kpi_from_json(js.at("kpi"));
            r.stages[s].osr = osr_breakdown_from_json(js.at("osr_breakdown"));
            for (const auto& w : weights) r.stages[s].ths.push_back(js.at("ths").at(w.name).get<double>());
        }
    }
    return r;
}

inline std::vector<RunResult> read_results(const std::filesystem::path& path, std::span<const WeightConfig> weights) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<RunResult> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(result_from_json(nlohmann::json::parse(line), weights));
    }
    return out;
}

inline nlohmann::json to_json(const RunSummary& s) {
    nlohmann::json j;
    j["prompts_total"] = s.prompts_total;
    j["prompts_evaluated"] = s.prompts_evaluated;
    j["prompts_skipped"] = s.prompts_skipped;
    j["degraded_extractions"] = s.degraded_extractions;
    nlohmann::json agents = nlohmann::json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& c = s.cache[i];
        nlohmann::json corr = {{"pearson", nullptr}, {"spearman", nullptr}};
        if (s.correlations[i].pearson) corr["pearson"] = *s.correlations[i].pearson;
        if (s.correlations[i].spearman) corr["spearman"] = *s.correlations[i].spearman;
        if (!s.correlations[i].error.empty()) corr["error"] = s.correlations[i].error;
        agents.push_back({{"agent", to_string(c.agent)},
                          {"kpi_means", to_json(s.kpi_means[i])},
                          {"cache_hits", c.hits},
                          {"mtm_hits", c.mtm_hits},
                          {"ltm_migrations", c.ltm_migrations},
                          {"cache_misses", c.misses},
                          {"hit_rate", c.hit_rate()},
                          {"fdf_vs_osr_disclaimer", corr}});
    }
    j["agents"] = agents;
    j["total_hits"] = s.total_hits;
    j["total_misses"] = s.total_misses;
    j["aggregate_hit_rate"] = s.aggregate_hit_rate;
    j["call_volume_reduction"] = s.call_volume_reduction;
    nlohmann::json configs = nlohmann::json::array();
    for (std::size_t c = 0; c < s.config_names.size(); ++c) {
        nlohmann::json cj = {{"name", s.config_names[c]}, {"mean_ths", s.ths_means[c]}};
        cj["delta_percent_1_to_3"] = s.delta_percent_1_3[c] ? nlohmann::json(*s.delta_percent_1_3[c]) : nlohmann::json(nullptr);
        const auto& g = s.cache_groups[c];
        cj["third_stage_cache_groups"] = {
            {"n_hit", g.n_hit},
            {"n_no_hit", g.n_no_hit},
            {"hit_mean", g.hit_mean ? nlohmann::json(*g.hit_mean) : nlohmann::json(nullptr)},
            {"no_hit_mean", g.no_hit_mean ? nlohmann::json(*g.no_hit_mean) : nlohmann::json(nullptr)},
            {"impact_percent", g.impact_percent ? nlohmann::json(*g.impact_percent) : nlohmann::json(nullptr)}};
        configs.push_back(std::move(cj));
    }
    j["configs"] = configs;
    nlohmann::json trends = nlohmann::json::array();
    for (const auto& t : s.trends) {
        trends.push_back({{"kpi", t.kpi},
                          {"ideal", t.lower_is_better ? "down" : "up"},
                          {"first_to_second", t.first_to_second},
                          {"first_to_second_ideal", t.improved(t.first_to_second)},
                          {"second_to_third", t.second_to_third},
                          {"second_to_third_ideal", t.improved(t.second_to_third)}});
    }
    j["kpi_trends"] = trends;
    return j;
}

/// Writes results.jsonl, summary.json, the tables/ CSVs and the plots/ CSVs
/// under out_dir. Output depends only on the inputs.
inline void export_reports(const RunSummary& summary, std::span<const RunResult> results,
                           std::span<const WeightConfig> weights, const std::filesystem::path& out_dir) {
    using report_detail::CsvWriter;
    using report_detail::num;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "tables", ec);
    fs::create_directories(out_dir / "plots", ec);
    if (ec) throw Error("cannot create report directories under " + out_dir.string() + ": " + ec.message());

    {
        std::string text;
        for (const auto& r : results) text += to_json(r, weights).dump() + "\n";
        report_detail::write_text(out_dir / "results.jsonl", text);
    }
    report_detail::write_text(out_dir / "summary.json", to_json(summary).dump(2) + "\n");

    const std::array<std::string, 3> stage_names = {"frontend", "second_reviewer", "third_reviewer"};

    {
        CsvWriter w(out_dir / "tables" / "weights.csv");
        w.row({"configuration", "w1_fcd", "w2_fgr", "w3_fdf", "w4_ecs", "w5_osr"});
        for (const auto& c : weights) w.row({c.name, num(c.w1), num(c.w2), num(c.w3), num(c.w4), num(c.w5)});
        w.close();
    }
    {
        CsvWriter w(out_dir / "tables" / "kpi_profile.csv");
        w.row({"agent", "fcd", "fgr", "fdf", "ecs", "osr"});
        for (std::size_t s = 0; s < 3; ++s) {
            const auto& k = summary.kpi_means[s];
            w.row({stage_names[s], num(k.fcd), num(k.fgr), num(k.fdf), num(k.ecs), num(k.osr)});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "tables" / "kpi_trends.csv");
        w.row({"kpi", "ideal", "first_to_second", "first_to_second_ideal", "second_to_third", "second_to_third_ideal"});
        for (const auto& t : summary.trends) {
            w.row({t.kpi, t.lower_is_better ? "down" : "up", num(t.first_to_second),
                   t.improved(t.first_to_second) ? "yes" : "no", num(t.second_to_third),
                   t.improved(t.second_to_third) ? "yes" : "no"});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "tables" / "cache_performance.csv");
        w.row({"agent", "cache_hits", "cache_misses", "hit_rate", "mtm_hits", "ltm_migrations"});
        for (const auto& c : summary.cache) {
            w.row({to_string(c.agent), std::to_string(c.hits), std::to_string(c.misses), num(c.hit_rate()),
                   std::to_string(c.mtm_hits), std::to_string(c.ltm_migrations)});
        }
        w.row({"total", std::to_string(summary.total_hits), std::to_string(summary.total_misses),
               num(summary.aggregate_hit_rate), "", ""});
        w.close();
    }
    {
        // Final-stage ranking, most negative first.
        std::vector<std::size_t> order(summary.config_names.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return summary.ths_means[a][2] < summary.ths_means[b][2]; });
        CsvWriter w(out_dir / "tables" / "ths_final_stage.csv");
        w.row({"configuration", "mean_ths", "w3_w4_w5", "w1", "w2"});
        for (auto c : order) {
            const auto& wc = weights[c];
            w.row({wc.name, num(summary.ths_means[c][2]), num(wc.w3 + wc.w4 + wc.w5), num(wc.w1), num(wc.w2)});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "tables" / "ths_per_stage.csv");
        w.row({"configuration", "frontend", "second_reviewer", "third_reviewer", "delta_percent_1_to_3"});
        for (std::size_t c = 0; c < summary.config_names.size(); ++c) {
            const auto& m = summary.ths_means[c];
            w.row({summary.config_names[c], num(m[0]), num(m[1]), num(m[2]), num(summary.delta_percent_1_3[c])});
        }
        w.close();
    }

    {
        CsvWriter w(out_dir / "plots" / "ths_per_prompt.csv");
        w.row({"configuration", "sequence", "prompt_id", "frontend", "second_reviewer", "third_reviewer",
               "delta_first_to_second"});
        for (std::size_t c = 0; c < summary.config_names.size(); ++c) {
            for (std::size_t i = 0; i < summary.prompt_ids.size(); ++i) {
                const auto& t = summary.per_prompt_ths[c][i];
                w.row({summary.config_names[c], std::to_string(i + 1), std::to_string(summary.prompt_ids[i]),
                       num(t[0]), num(t[1]), num(t[2]), num(t[1] - t[0])});
            }
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "plots" / "cumulative_hits.csv");
        w.row({"sequence", "prompt_id", "hits", "cumulative_hits"});
        for (std::size_t i = 0; i < summary.prompt_ids.size(); ++i) {
            w.row({std::to_string(i + 1), std::to_string(summary.prompt_ids[i]),
                   std::to_string(summary.hits_per_prompt[i]), std::to_string(summary.cumulative_hits[i])});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "plots" / "rolling_hit_rate.csv");
        w.row({"sequence", "prompt_id", "any_stage_hit", "rolling_hit_rate"});
        for (std::size_t i = 0; i < summary.prompt_ids.size(); ++i) {
            w.row({std::to_string(i + 1), std::to_string(summary.prompt_ids[i]),
                   summary.hits_per_prompt[i] > 0 ? "1" : "0", num(summary.rolling_hit_rate[i])});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "plots" / "ths_by_config.csv");
        w.row({"configuration", "stage", "mean_ths"});
        for (std::size_t c = 0; c < summary.config_names.size(); ++c) {
            for (std::size_t s = 0; s < 3; ++s) {
                w.row({summary.config_names[c], stage_names[s], num(summary.ths_means[c][s])});
            }
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "plots" / "cache_hit_groups.csv");
        w.row({"configuration", "n_hit", "hit_mean_ths", "n_no_hit", "no_hit_mean_ths", "impact_percent"});
        for (std::size_t c = 0; c < summary.config_names.size(); ++c) {
            const auto& g = summary.cache_groups[c];
            w.row({summary.config_names[c], std::to_string(g.n_hit), num(g.hit_mean), std::to_string(g.n_no_hit),
                   num(g.no_hit_mean), num(g.impact_percent)});
        }
        w.close();
    }
    {
        CsvWriter w(out_dir / "plots" / "ths_cdf.csv");
        w.row({"configuration", "stage", "rank", "ths", "cumulative_fraction"});
        for (std::size_t c = 0; c < summary.config_names.size(); ++c) {
            for (std::size_t s = 0; s < 3; ++s) {
                const auto& v = summary.ths_cdf[c][s];
                for (std::size_t i = 0; i < v.size(); ++i) {
                    w.row({summary.config_names[c], stage_names[s], std::to_string(i + 1), num(v[i]),
                           num(static_cast<double>(i + 1) / static_cast<double>(v.size()))});
                }
            }
        }
        w.close();
    }
}

}  // namespace memguard
