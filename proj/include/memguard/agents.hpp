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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memguard/cms.hpp"
#include "memguard/embedding.hpp"
#include "memguard/llm_backend.hpp"

namespace memguard {

enum class AgentRole { frontend, second_reviewer, third_reviewer, kpi_evaluator };

inline constexpr std::array<AgentRole, 3> kPipelineRoles = {AgentRole::frontend, AgentRole::second_reviewer,
                                                            AgentRole::third_reviewer};

inline std::string to_string(AgentRole r) {
    switch (r) {
        case AgentRole::frontend: return "frontend";
        case AgentRole::second_reviewer: return "second_reviewer";
        case AgentRole::third_reviewer: return "third_reviewer";
        case AgentRole::kpi_evaluator: return "kpi_evaluator";
    }
    return "unknown";
}

inline AgentRole agent_role_from_string(std::string_view s) {
    if (s == "frontend") return AgentRole::frontend;
    if (s == "second_reviewer") return AgentRole::second_reviewer;
    if (s == "third_reviewer") return AgentRole::third_reviewer;
    if (s == "kpi_evaluator") return AgentRole::kpi_evaluator;
    throw Error("unknown agent name: " + std::string(s));
}

inline std::size_t stage_index(AgentRole r) {
    if (r == AgentRole::kpi_evaluator) throw Error("kpi_evaluator is not a pipeline stage");
    return static_cast<std::size_t>(r);
}

struct AgentConfig {
    AgentRole name = AgentRole::frontend;
    std::string system_prompt;
    InferenceParams params;
    std::optional<CmsConfig> cms;  // absent for the evaluator

    void validate() const {
        params.validate();
        if (name == AgentRole::kpi_evaluator && cms) throw Error("kpi_evaluator must not have a CMS");
        if (name != AgentRole::kpi_evaluator && !cms) throw Error("agent " + to_string(name) + " requires a CMS");
        if (cms) cms->validate();
    }
};

inline std::string default_system_prompt(AgentRole role) {
    switch (role) {
        case AgentRole::frontend:
            return "[role:frontend]\n"
                   "You are the FrontEndAgent, the first stage of a three-stage answer pipeline.\n"
                   "Answer the user's request with full confidence. Supply specific details, dates,\n"
                   "names and figures even when you have to extrapolate. Avoid all disclaimers,\n"
                   "hedges and caveats.\n";
        case AgentRole::second_reviewer:
            return "[role:second_reviewer]\n"
                   "You are the SecondLevelReviewer. You receive the user's original prompt and the\n"
                   "FrontEndAgent's answer. Detect unsupported or fabricated claims and replace them\n"
                   "with cautious wording; label speculation explicitly.\n"
                   "Reply with a single JSON object with exactly three string fields:\n"
                   "  \"utterance\": the corrected answer for the user,\n"
                   "  \"whisper_context\": internal notes on the problems you detected,\n"
                   "  \"whisper_value\": your confidence (0 to 1) that the corrected answer is factual.\n";
        case AgentRole::third_reviewer:
            return "[role:third_reviewer]\n"
                   "You are the ThirdLevelReviewer, the final factuality enforcer. Rewrite the reviewed\n"
                   "answer into clean, user-facing text. Keep only supported claims and state\n"
                   "uncertainty plainly where it remains. Do not include metadata, JSON, field names\n"
                   "or internal reasoning.\n";
        case AgentRole::kpi_evaluator:
            return "[role:kpi_evaluator]\n"
                   "You are the KPI Evaluator. You observe a prompt and the outputs of three agents\n"
                   "(frontend, second_reviewer, third_reviewer) and score each output:\n"
                   "  FCD (Factual Claim Density, lower is better): density of unverified statements\n"
                   "      presented as established fact.\n"
                   "  FGR (Factual Grounding References, higher is better): how often claims are\n"
                   "      grounded in real-world evidence phrasing.\n"
                   "  FDF (Fictional Disclaimer Frequency, higher is better): explicit cues that\n"
                   "      content is fictional, hypothetical or speculative.\n"
                   "  ECS (Explicit Contextualization Score, higher is better): degree of epistemic\n"
                   "      framing and hedging.\n"
                   "Return strict JSON only, of the form\n"
                   "{\"frontend\": {\"FCD\": x, \"FGR\": x, \"FDF\": x, \"ECS\": x},\n"
                   " \"second_reviewer\": {...}, \"third_reviewer\": {...}}\n"
                   "with every value a number in [0, 1].\n";
    }
    return {};
}

/// Default per-agent inference parameters (temperature gradient 1.0 / 0.1 / 0.05 / 0.0).
inline AgentConfig default_agent_config(AgentRole role) {
    AgentConfig c;
    c.name = role;
    c.system_prompt = default_system_prompt(role);
    c.params.context_window = 8192;
    switch (role) {
        case AgentRole::frontend:
            c.params.temperature = 1.0;
            c.params.top_p = 0.99;
            c.cms = CmsConfig::frontend();
            break;
        case AgentRole::second_reviewer:
            c.params.temperature = 0.1;
            c.params.top_p = 0.9;
            c.cms = CmsConfig::reviewer();
            break;
        case AgentRole::third_reviewer:
            c.params.temperature = 0.05;
            c.params.top_p = 0.85;
            c.cms = CmsConfig::reviewer();
            break;
        case AgentRole::kpi_evaluator:
            c.params.temperature = 0.0;
            c.params.top_p = 0.8;
            break;
    }
    return c;
}

enum class CacheEvent { mtm_hit, ltm_migration, miss_generated };

inline std::string to_string(CacheEvent e) {
    switch (e) {
        case CacheEvent::mtm_hit: return "mtm_hit";
        case CacheEvent::ltm_migration: return "ltm_migration";
        case CacheEvent::miss_generated: return "miss_generated";
    }
    return "unknown";
}

inline CacheEvent cache_event_from_string(std::string_view s) {
    if (s == "mtm_hit") return CacheEvent::mtm_hit;
    if (s == "ltm_migration") return CacheEvent::ltm_migration;
    if (s == "miss_generated") return CacheEvent::miss_generated;
    throw Error("unknown cache event: " + std::string(s));
}

inline bool is_hit(CacheEvent e) { return e != CacheEvent::miss_generated; }

struct AgentOutput {
    AgentRole agent_name = AgentRole::frontend;
    std::string input_text;
    std::string utterance;
    std::optional<std::string> whisper_context;  // second_reviewer only
    std::optional<std::string> whisper_value;    // second_reviewer only
    CacheEvent cache_event = CacheEvent::miss_generated;
    double similarity = 0.0;  // best cache similarity on a hit
    double latency_ms = 0.0;
    std::string raw_text;
    bool degraded = false;  // structured extraction fell back to raw text
};

struct ReviewerFields {
    std::string utterance;
    std::string whisper_context;
    std::string whisper_value;
    bool degraded = false;
};

namespace detail {

inline std::string json_field_as_string(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    return v.dump();
}

// Removes a surrounding ``` / ```json fence, if any.
inline std::string_view strip_code_fence(std::string_view s) {
    s = trim(s);
    if (s.substr(0, 3) != "```") return s;
    const auto first_newline = s.find('\n');
    if (first_newline == std::string_view::npos) return s;
    auto body = s.substr(first_newline + 1);
    const auto close = body.rfind("```");
    if (close != std::string_view::npos) body = body.substr(0, close);
    return trim(body);
}

inline std::optional<ReviewerFields> parse_reviewer_json(std::string_view raw) {
    const auto open = raw.find('{');
    const auto close = raw.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    const auto doc = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    auto it = doc.find("utterance");
    if (it == doc.end()) return std::nullopt;
    ReviewerFields f;
    f.utterance = json_field_as_string(*it);
    if (trim(f.utterance).empty()) return std::nullopt;
    if (auto c = doc.find("whisper_context"); c != doc.end()) f.whisper_context = json_field_as_string(*c);
    if (auto v = doc.find("whisper_value"); v != doc.end()) f.whisper_value = json_field_as_string(*v);
    return f;
}

inline std::optional<ReviewerFields> parse_reviewer_labels(std::string_view raw) {
    static constexpr std::array<std::string_view, 3> labels = {"utterance:", "whisper_context:", "whisper_value:"};
    std::array<std::string, 3> values;
    std::array<bool, 3> seen{};
    int current = -1;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto end = raw.find('\n', pos);
        if (end == std::string_view::npos) end = raw.size();
        const auto line = raw.substr(pos, end - pos);
        auto stripped = trim(line);
        // tolerate markdown bullets / bold around labels
        while (!stripped.empty() && (stripped.front() == '-' || stripped.front() == '*')) {
            stripped.remove_prefix(1);
            stripped = trim(stripped);
        }
        const auto lowered = to_lower_ascii(stripped);
        int matched = -1;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (lowered.rfind(labels[i], 0) == 0) {
                matched = static_cast<int>(i);
                break;
            }
        }
        if (matched >= 0) {
            current = matched;
            seen[static_cast<std::size_t>(matched)] = true;
            values[static_cast<std::size_t>(matched)] = std::string(trim(stripped.substr(labels[static_cast<std::size_t>(matched)].size())));
        } else if (current >= 0 && !stripped.empty()) {
            auto& v = values[static_cast<std::size_t>(current)];
            if (!v.empty()) v += '\n';
            v += std::string(stripped);
        }
        if (end == raw.size()) break;
        pos = end + 1;
    }
    if (!seen[0] || trim(values[0]).empty()) return std::nullopt;
    return ReviewerFields{values[0], values[1], values[2], false};
}

}  // namespace detail

/// Strict JSON first, then labeled lines ("utterance:", "whisper_context:",
/// "whisper_value:", case-insensitive). Falls back to the raw text as the
/// utterance with the degraded flag set.
inline ReviewerFields parse_reviewer_fields(std::string_view raw_text) {
    if (auto f = detail::parse_reviewer_json(raw_text)) return *f;
    if (auto f = detail::parse_reviewer_labels(raw_text)) return *f;
    return ReviewerFields{std::string(raw_text), {}, {}, true};
}

/// Input for the corrector: the original prompt and the frontend answer as labeled sections.
inline std::string compose_second_stage_input(std::string_view prompt, std::string_view frontend_utterance) {
    return "Original prompt:\n" + std::string(prompt) + "\n\nFrontend answer:\n" + std::string(frontend_utterance);
}

/// One generation-controller turn: embed, query the agent's memory, reuse on
/// hit or generate and record on miss, then run the consolidation cadence.
inline AgentOutput run_stage(const AgentConfig& agent, std::string_view input_text, std::int64_t prompt_index,
                             ContinuumMemory& memory, const Embedder& embedder, Backend& backend, Clock& clock) {
    if (agent.name == AgentRole::kpi_evaluator) throw Error("run_stage: kpi_evaluator is not a pipeline agent");
    if (trim(input_text).empty()) throw Error("agent " + to_string(agent.name) + ": empty input");

    const double started = clock.elapsed_ms();
    AgentOutput out;
    out.agent_name = agent.name;
    out.input_text = std::string(input_text);

    const auto query = embedder.embed(input_text);
    if (auto hit = memory.lookup(query, prompt_index)) {
        out.raw_text = hit->entry.response_payload;
        out.similarity = hit->similarity;
        out.cache_event = hit->source == CacheLayer::mtm ? CacheEvent::mtm_hit : CacheEvent::ltm_migration;
        memory.flush_if_due(prompt_index);
    } else {
        try {
            out.raw_text = backend.generate({agent.system_prompt, std::string(input_text), agent.params});
        } catch (const std::exception& e) {
            throw Error("agent " + to_string(agent.name) + ": " + e.what());
        }
        if (trim(out.raw_text).empty()) throw Error("agent " + to_string(agent.name) + ": backend returned empty text");
        out.cache_event = CacheEvent::miss_generated;
        CacheEntry entry;
        entry.prompt_text = std::string(input_text);
        entry.prompt_embedding = query;
        entry.response_payload = out.raw_text;
        entry.agent_name = to_string(agent.name);
        entry.created_at_index = prompt_index;
        entry.last_access_index = prompt_index;
        entry.access_count = 1;
        memory.record(std::move(entry), prompt_index);
    }
    memory.consolidate(prompt_index);

    if (agent.name == AgentRole::second_reviewer) {
        auto fields = parse_reviewer_fields(out.raw_text);
        out.utterance = std::move(fields.utterance);
        out.whisper_context = std::move(fields.whisper_context);
        out.whisper_value = std::move(fields.whisper_value);
        out.degraded = fields.degraded;
    } else {
        out.utterance = std::string(trim(out.raw_text));
    }
    out.latency_ms = clock.elapsed_ms() - started;
    return out;
}

struct KpiQuadruple {
    double fcd = 0.0;
    double fgr = 0.0;
    double fdf = 0.0;
    double ecs = 0.0;
    bool operator==(const KpiQuadruple&) const = default;
};

struct EvaluationResult {
    std::optional<std::array<KpiQuadruple, 3>> scores;  // empty => prompt skipped
    int attempts = 0;
    std::string error;  // last parse failure, if any
};

inline std::string compose_evaluator_input(std::string_view prompt, const std::array<AgentOutput, 3>& outputs) {
    std::string s = "Original prompt:\n" + std::string(prompt) + "\n";
    for (const auto& o : outputs) {
        s += "\n[" + to_string(o.agent_name) + " output]\n" + o.raw_text + "\n";
    }
    return s;
}

/// Parses the evaluator's strict-JSON reply. Throws Error describing the
/// first problem found (malformed JSON, missing key, value outside [0, 1]).
inline std::array<KpiQuadruple, 3> parse_evaluator_reply(std::string_view reply) {
    const auto doc = nlohmann::json::parse(detail::strip_code_fence(reply), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("evaluator reply is not a JSON object");

    const auto find_ci = [](const nlohmann::json& obj, std::string_view key) -> const nlohmann::json* {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (to_lower_ascii(it.key()) == key) return &it.value();
        }
        return nullptr;
    };
    std::array<KpiQuadruple, 3> out{};
    for (std::size_t i = 0; i < kPipelineRoles.size(); ++i) {
        const auto agent = to_string(kPipelineRoles[i]);
        const auto* scores = find_ci(doc, agent);
        if (scores == nullptr || !scores->is_object()) throw Error("evaluator reply lacks scores for " + agent);
        std::array<double, 4> v{};
        static constexpr std::array<std::string_view, 4> keys = {"fcd", "fgr", "fdf", "ecs"};
        for (std::size_t k = 0; k < keys.size(); ++k) {
            const auto* x = find_ci(*scores, keys[k]);
            if (x == nullptr || !x->is_number()) {
                throw Error("evaluator reply: " + agent + "." + std::string(keys[k]) + " missing or not a number");
            }
            v[k] = x->get<double>();
            if (!(v[k] >= 0.0 && v[k] <= 1.0)) {
                throw Error("evaluator reply: " + agent + "." + std::string(keys[k]) + " = " + format_double(v[k]) +
                            " outside [0, 1]");
            }
        }
        out[i] = {v[0], v[1], v[2], v[3]};
    }
    return out;
}

/// One evaluator request over the three raw outputs; a malformed or
/// out-of-range reply gets exactly one re-request. Never touches any cache.
inline EvaluationResult run_kpi_evaluator(const AgentConfig& evaluator, std::string_view prompt,
                                          const std::array<AgentOutput, 3>& outputs, Backend& backend) {
    if (evaluator.name != AgentRole::kpi_evaluator) throw Error("run_kpi_evaluator: wrong agent config");
    const auto base = compose_evaluator_input(prompt, outputs);
    EvaluationResult result;
    std::string content = base;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ++result.attempts;
        std::string reply;
        try {
            reply = backend.generate({evaluator.system_prompt, content, evaluator.params});
        } catch (const std::exception& e) {
            throw Error("agent kpi_evaluator: " + std::string(e.what()));
        }
        try {
            result.scores = parse_evaluator_reply(reply);
            result.error.clear();
            return result;
        } catch (const Error& e) {
            result.error = e.what();
            content = base + "\nYour previous reply was rejected (" + result.error +
                      "). Reply again with strict JSON only.\n";
        }
    }
    return result;
}

}  // namespace memguard
