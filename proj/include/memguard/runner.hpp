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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "memguard/http.hpp"
#include "memguard/http_backend.hpp"
#include "memguard/remote_embedder.hpp"
#include "memguard/report.hpp"
#include "memguard/summary.hpp"

namespace memguard {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::size_t kBenchmarkSize = 310;

enum class BackendKind { mock, http };

inline std::string to_string(BackendKind k) { return k == BackendKind::mock ? "mock" : "http"; }

inline BackendKind backend_kind_from_string(std::string_view s) {
    if (s == "mock") return BackendKind::mock;
    if (s == "http") return BackendKind::http;
    throw Error("unknown backend '" + std::string(s) + "' (expected mock or http)");
}

// ---- JSON forms of the configuration types --------------------------------

inline nlohmann::json to_json(const CmsConfig& c) {
    return {{"mtm_capacity", c.mtm_capacity},
            {"ltm_capacity", c.ltm_capacity},
            {"tau", c.tau},
            {"write_cadence", c.write_cadence},
            {"consolidation_cadence", c.consolidation_cadence},
            {"promote_top_k", c.promote_top_k},
            {"ltm_probe_on_miss", c.ltm_probe_on_miss}};
}

// Fields absent from `j` keep the values in `base`.
inline CmsConfig cms_config_from_json(const nlohmann::json& j, CmsConfig base) {
    if (j.contains("mtm_capacity")) base.mtm_capacity = j.at("mtm_capacity").get<std::size_t>();
    if (j.contains("ltm_capacity")) base.ltm_capacity = j.at("ltm_capacity").get<std::size_t>();
    if (j.contains("tau")) base.tau = j.at("tau").get<double>();
    if (j.contains("write_cadence")) base.write_cadence = j.at("write_cadence").get<std::int64_t>();
    if (j.contains("consolidation_cadence")) {
        base.consolidation_cadence = j.at("consolidation_cadence").get<std::int64_t>();
    }
    if (j.contains("promote_top_k")) base.promote_top_k = j.at("promote_top_k").get<std::size_t>();
    if (j.contains("ltm_probe_on_miss")) base.ltm_probe_on_miss = j.at("ltm_probe_on_miss").get<bool>();
    base.validate();
    return base;
}

inline InferenceParams inference_params_from_json(const nlohmann::json& j, InferenceParams base) {
    if (j.contains("model_name")) base.model_name = j.at("model_name").get<std::string>();
    if (j.contains("temperature")) base.temperature = j.at("temperature").get<double>();
    if (j.contains("top_p")) base.top_p = j.at("top_p").get<double>();
    if (j.contains("context_window")) base.context_window = j.at("context_window").get<std::int64_t>();
    if (j.contains("seed")) {
        if (j.at("seed").is_null()) {
            base.seed.reset();
        } else {
            base.seed = j.at("seed").get<std::int64_t>();
        }
    }
    base.validate();
    return base;
}

inline nlohmann::json to_json(const AgentConfig& a) {
    nlohmann::json j = {{"name", to_string(a.name)},
                        {"system_prompt", a.system_prompt},
                        {"params", to_json(a.params)}};
    j["cms"] = a.cms ? to_json(*a.cms) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const EmbedderConfig& c) {
    return {{"provider_kind", to_string(c.provider_kind)},
            {"dimension", c.dimension},
            {"seed", c.seed},
            {"endpoint_url", c.endpoint_url},
            {"model_name", c.model_name},
            {"response_path", c.response_path},
            {"timeout_seconds", c.timeout_seconds}};
}

inline nlohmann::json to_json(const HttpBackendConfig& c) {
    return {{"endpoint_url", c.endpoint_url},
            {"timeout_seconds", c.timeout_seconds},
            {"retries", c.retries},
            {"fields",
             {{"model", c.fields.model},
              {"system", c.fields.system},
              {"prompt", c.fields.prompt},
              {"options", c.fields.options},
              {"response", c.fields.response}}}};
}

// ---- file loaders ---------------------------------------------------------

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline std::string load_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Agents file: an object keyed by role name. Each value may carry
/// "system_prompt" or "system_prompt_path" (relative to the file), "params"
/// and "cms". Roles and fields that are left out keep their defaults.
inline PipelineAgents load_agents_file(const std::filesystem::path& path) {
    const auto doc = load_json_file(path);
    if (!doc.is_object()) throw Error(path.string() + ": agents file must be a JSON object");
    PipelineAgents agents;
    for (const auto& [key, value] : doc.items()) {
        const auto role = agent_role_from_string(key);
        AgentConfig& cfg = role == AgentRole::kpi_evaluator ? agents.evaluator : agents.stages[stage_index(role)];
        try {
            if (value.contains("system_prompt") && value.contains("system_prompt_path")) {
                throw Error("give system_prompt or system_prompt_path, not both");
            }
            if (value.contains("system_prompt")) cfg.system_prompt = value.at("system_prompt").get<std::string>();
            if (value.contains("system_prompt_path")) {
                cfg.system_prompt =
                    load_text_file(path.parent_path() / value.at("system_prompt_path").get<std::string>());
            }
            if (value.contains("params")) cfg.params = inference_params_from_json(value.at("params"), cfg.params);
            if (value.contains("cms")) {
                if (role == AgentRole::kpi_evaluator) throw Error("kpi_evaluator must not have a CMS");
                cfg.cms = cms_config_from_json(value.at("cms"), *cfg.cms);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ": agent '" + key + "': " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + ": agent '" + key + "': " + e.what());
        }
    }
    agents.validate();
    return agents;
}

inline std::vector<WeightConfig> load_weights_file(const std::filesystem::path& path) {
    try {
        return weight_configs_from_json(load_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline OsrLexicon load_osr_lexicon_file(const std::filesystem::path& path) {
    try {
        return osr_lexicon_from_json(load_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

inline BenchmarkLexicon load_benchmark_lexicon_file(const std::filesystem::path& path) {
    try {
        return benchmark_lexicon_from_json(load_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

// ---- run configuration ----------------------------------------------------

struct RunConfig {
    BackendKind backend = BackendKind::mock;
    HttpBackendConfig http;
    std::optional<std::filesystem::path> fixtures_path;  // mock only
    EmbedderConfig embedder;
    PipelineAgents agents;
    std::vector<WeightConfig> weights = default_weight_configs();
    OsrLexicon osr_lexicon = default_osr_lexicon();
    BenchmarkLexicon benchmark_lexicon = default_benchmark_lexicon();
    std::optional<double> tau;        // replaces every stage's CMS threshold
    std::optional<std::uint64_t> seed;  // embedder seed, and inference seed where unset
    std::filesystem::path out_dir = "out";
    std::size_t limit = kBenchmarkSize;
    std::optional<std::filesystem::path> trace_out;       // default out_dir/trace.jsonl
    std::optional<std::filesystem::path> emit_benchmark;  // full 310-prompt JSON-lines
    bool fixed_clock = false;
    bool dump_embeddings = false;
    std::vector<std::pair<std::string, std::string>> sources;  // (what, file) for the manifest

    void validate() const {
        if (limit > kBenchmarkSize) throw Error("limit must be <= " + std::to_string(kBenchmarkSize));
        if (limit == 0) throw Error("limit must be positive");
        if (tau && !(*tau > 0.0 && *tau <= 1.0)) throw Error("tau must lie in (0, 1]");
        if (weights.empty()) throw Error("at least one weight config is required");
        for (const auto& w : weights) w.validate();
        osr_lexicon.validate();
        validate_benchmark(benchmark_lexicon);
        embedder.validate();
        agents.validate();
        if (backend == BackendKind::http) {
            http::split_url(http.endpoint_url);
            if (fixtures_path) throw Error("--fixtures only applies to the mock backend");
        }
        if (out_dir.empty()) throw Error("output directory is empty");
    }

    /// Agents after the tau and seed overrides are applied.
    PipelineAgents effective_agents() const {
        PipelineAgents a = agents;
        for (auto& s : a.stages) {
            if (tau) s.cms->tau = *tau;
            if (seed && !s.params.seed) s.params.seed = static_cast<std::int64_t>(*seed);
        }
        if (seed && !a.evaluator.params.seed) a.evaluator.params.seed = static_cast<std::int64_t>(*seed);
        return a;
    }

    EmbedderConfig effective_embedder() const {
        EmbedderConfig e = embedder;
        if (seed) e.seed = *seed;
        return e;
    }

    std::filesystem::path effective_trace_path() const { return trace_out ? *trace_out : out_dir / "trace.jsonl"; }

private:
    static void validate_benchmark(const BenchmarkLexicon& lex) { memguard::validate(lex); }
};

/// MEMGUARD_GENERATE_URL replaces the generation endpoint; MEMGUARD_EMBED_URL
/// replaces the endpoint of a remote embedder (ignored for the fake one).
inline void apply_env_overrides(RunConfig& config) {
    if (const char* v = std::getenv("MEMGUARD_GENERATE_URL"); v != nullptr && *v != '\0') {
        config.http.endpoint_url = v;
    }
    if (const char* v = std::getenv("MEMGUARD_EMBED_URL"); v != nullptr && *v != '\0') {
        if (config.embedder.provider_kind == ProviderKind::remote_http) config.embedder.endpoint_url = v;
    }
}

inline nlohmann::json build_manifest(const RunConfig& config, const std::string& started_at) {
    nlohmann::json agents = nlohmann::json::array();
    const auto eff = config.effective_agents();
    for (const auto& s : eff.stages) agents.push_back(to_json(s));
    agents.push_back(to_json(eff.evaluator));
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& w : config.weights) weights.push_back(to_json(w));
    nlohmann::json sources = nlohmann::json::object();
    for (const auto& [what, file] : config.sources) sources[what] = file;

    nlohmann::json j;
    j["tool"] = "memguard";
    j["version"] = kVersion;
    j["versions"] = {{"memguard", kVersion},
                     {"compiler", __VERSION__},
                     {"cplusplus", __cplusplus},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"cpp_httplib", CPPHTTPLIB_VERSION}};
    j["started_at"] = started_at;
    j["clock"] = config.fixed_clock ? "fixed" : "system";
    j["backend"] = to_string(config.backend);
    if (config.backend == BackendKind::http) {
        j["http"] = to_json(config.http);
    } else {
        j["fixtures"] = config.fixtures_path ? nlohmann::json(config.fixtures_path->string()) : nlohmann::json(nullptr);
    }
    j["embedder"] = to_json(config.effective_embedder());
    j["agents"] = agents;
    j["weights"] = weights;
    j["osr_lexicon"] = to_json(config.osr_lexicon);
    j["benchmark_lexicon"] = to_json(config.benchmark_lexicon);
    j["tau_override"] = config.tau ? nlohmann::json(*config.tau) : nlohmann::json(nullptr);
    j["seed"] = config.seed ? nlohmann::json(*config.seed) : nlohmann::json(nullptr);
    j["limit"] = config.limit;
    j["out_dir"] = config.out_dir.string();
    j["trace_out"] = config.effective_trace_path().string();
    j["emit_benchmark"] =
        config.emit_benchmark ? nlohmann::json(config.emit_benchmark->string()) : nlohmann::json(nullptr);
    j["sources"] = sources;
    return j;
}

inline void write_benchmark_jsonl(std::span<const BenchmarkPrompt> prompts, const std::filesystem::path& path) {
    std::string text;
    for (const auto& p : prompts) text += to_json(p).dump() + "\n";
    report_detail::write_text(path, text);
}

struct RunOutput {
    std::vector<RunResult> results;
    RunSummary summary;
    std::size_t trace_envelopes = 0;
    std::int64_t backend_calls = 0;  // mock only; 0 for http
    std::filesystem::path manifest_path;
    std::filesystem::path trace_path;
};

/// Runs the first `limit` benchmark prompts through the pipeline and writes
/// manifest.json, results, reports, cache dumps and the trace under out_dir.
/// Configuration and connectivity problems throw before any prompt runs.
inline RunOutput run_benchmark(const RunConfig& config, std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    config.validate();

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    {
        const auto probe = config.out_dir / ".write_probe";
        std::ofstream p(probe);
        if (!p) throw Error("output directory " + config.out_dir.string() + " is not writable");
        p.close();
        fs::remove(probe, ec);
    }

    const auto embedder_cfg = config.effective_embedder();
    const auto embedder = make_embedder(embedder_cfg);
    if (embedder_cfg.provider_kind == ProviderKind::remote_http) {
        http::probe(embedder_cfg.endpoint_url, embedder_cfg.timeout_seconds);
    }

    std::unique_ptr<Backend> backend;
    MockBackend* mock = nullptr;
    if (config.backend == BackendKind::mock) {
        auto m = std::make_unique<MockBackend>();
        if (config.fixtures_path) m->load_fixtures(load_json_file(*config.fixtures_path));
        mock = m.get();
        backend = std::move(m);
    } else {
        http::probe(config.http.endpoint_url, config.http.timeout_seconds);
        backend = std::make_unique<HttpBackend>(config.http);
    }

    const auto all_prompts = generate_benchmark(config.benchmark_lexicon);
    if (config.emit_benchmark) write_benchmark_jsonl(all_prompts, *config.emit_benchmark);
    const std::span<const BenchmarkPrompt> prompts(all_prompts.data(), config.limit);

    std::unique_ptr<Clock> clock;
    if (config.fixed_clock) {
        clock = std::make_unique<FixedClock>();
    } else {
        clock = std::make_unique<SystemClock>();
    }

    RunOutput out;
    out.manifest_path = config.out_dir / "manifest.json";
    report_detail::write_text(out.manifest_path, build_manifest(config, clock->utc_now()).dump(2) + "\n");

    ofp::Bus bus;
    Pipeline pipeline(config.effective_agents(), config.weights, config.osr_lexicon, *embedder, *backend, *clock, bus);
    pipeline.set_log(log);
    out.results.reserve(prompts.size());
    for (const auto& p : prompts) {
        out.results.push_back(pipeline.run_prompt(p));
        if (log != nullptr && p.id % 50 == 0) *log << "processed " << p.id << "/" << prompts.size() << " prompts\n";
    }

    out.trace_path = config.effective_trace_path();
    if (out.trace_path.has_parent_path()) fs::create_directories(out.trace_path.parent_path(), ec);
    bus.export_trace(out.trace_path);
    out.trace_envelopes = bus.trace().size();

    for (const auto role : kPipelineRoles) {
        const auto name = to_string(role);
        report_detail::write_text(config.out_dir / ("cache_" + name + ".json"),
                                  dump_memory(name, pipeline.memory(role), config.dump_embeddings).dump(2) + "\n");
    }

    out.summary = summarize(out.results, config.weights);
    export_reports(out.summary, out.results, config.weights, config.out_dir);
    if (mock != nullptr) out.backend_calls = mock->calls();
    return out;
}

}  // namespace memguard
