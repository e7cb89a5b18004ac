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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memguard/common.hpp"

namespace memguard {

struct InferenceParams {
    std::string model_name = "llama3.1:latest";
    double temperature = 0.0;
    double top_p = 1.0;
    std::int64_t context_window = 8192;
    std::optional<std::int64_t> seed;

    void validate() const {
        if (!(temperature >= 0.0 && temperature <= 2.0)) throw Error("inference params: temperature must lie in [0, 2]");
        if (!(top_p > 0.0 && top_p <= 1.0)) throw Error("inference params: top_p must lie in (0, 1]");
        if (context_window < 1) throw Error("inference params: context_window must be positive");
        if (model_name.empty()) throw Error("inference params: model_name is empty");
    }
};

inline nlohmann::json to_json(const InferenceParams& p) {
    nlohmann::json j = {{"model_name", p.model_name},
                        {"temperature", p.temperature},
                        {"top_p", p.top_p},
                        {"context_window", p.context_window}};
    j["seed"] = p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr);
    return j;
}

struct GenerationRequest {
    std::string system_prompt;
    std::string user_content;
    InferenceParams params;

    void validate() const {
        if (trim(user_content).empty()) throw Error("generation request: user_content is empty");
        params.validate();
    }
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string generate(const GenerationRequest& request) = 0;
    virtual std::string name() const = 0;
};

/// Extracts the `[role:<name>]` tag that shipped system prompts carry.
inline std::string role_tag(std::string_view system_prompt) {
    constexpr std::string_view open = "[role:";
    const auto start = system_prompt.find(open);
    if (start == std::string_view::npos) return {};
    const auto end = system_prompt.find(']', start);
    if (end == std::string_view::npos) return {};
    return std::string(trim(system_prompt.substr(start + open.size(), end - start - open.size())));
}

inline std::string content_hash(std::string_view user_content) { return hex64(fnv1a64(user_content)); }

/// Deterministic scripted backend. Fixtures are keyed by (role tag, hash of
/// user content); anything else gets a role-specific templated response.
///
/// The templates are written so reviewer responses carry progressively more
/// hedging and annotation vocabulary than frontend responses.
class MockBackend final : public Backend {
public:
    MockBackend() = default;

    void add_fixture(std::string role, std::string_view user_content, std::string response) {
        fixtures_[{std::move(role), content_hash(user_content)}] = std::move(response);
    }

    void add_fixture_by_hash(std::string role, std::string hash, std::string response) {
        fixtures_[{std::move(role), std::move(hash)}] = std::move(response);
    }

    /// [{"role": ..., "user_content"|"hash": ..., "response": ...}, ...]
    void load_fixtures(const nlohmann::json& j) {
        if (!j.is_array()) throw Error("mock fixtures must be a JSON array");
        for (const auto& f : j) {
            auto role = f.at("role").get<std::string>();
            auto response = f.at("response").get<std::string>();
            if (f.contains("user_content")) {
                add_fixture(std::move(role), f.at("user_content").get<std::string>(), std::move(response));
            } else {
                add_fixture_by_hash(std::move(role), f.at("hash").get<std::string>(), std::move(response));
            }
        }
    }

    std::string generate(const GenerationRequest& request) override {
        ++calls_;
        const auto role = role_tag(request.system_prompt);
        if (auto it = fixtures_.find({role, content_hash(request.user_content)}); it != fixtures_.end()) {
            return it->second;
        }
        return fallback(role, request.user_content);
    }

    std::string name() const override { return "mock"; }
    std::int64_t calls() const { return calls_.load(); }

    static std::string fallback(const std::string& role, std::string_view user_content) {
        const std::uint64_t h = fnv1a64(user_content);
        std::string_view topic = user_content;
        if (constexpr std::string_view label = "Original prompt:"; topic.starts_with(label)) {
            topic.remove_prefix(label.size());
        }
        const std::string subject = headline(topic, 14);
        if (role == "frontend") {
            static constexpr std::array<std::string_view, 3> openers = {
                "Here is the definitive answer.", "The facts here are settled.", "This is well established."};
            return "[frontend] " + std::string(openers[h % openers.size()]) + " Regarding \"" + subject +
                   "\": the key dates, institutions and figures are fully documented, the outcome is "
                   "widely accepted, and every detail below can be relied upon without qualification.";
        }
        if (role == "second_reviewer") {
            const nlohmann::json out = {
                {"utterance", "Note that several claims about \"" + subject +
                                  "\" cannot be confirmed from the available record. Considering the "
                                  "evidence, some details are reportedly supported, while others are "
                                  "speculative and should be read with caution."},
                {"whisper_context", "confidence: low; risk level: elevated; classification: unverified "
                                    "claim; assessment: possible hallucination in the original answer"},
                {"whisper_value", format_fixed(0.2 + static_cast<double>(h % 50) / 100.0, 2)}};
            return out.dump();
        }
        if (role == "third_reviewer") {
            return "[third_reviewer] It is important to note that the evidence on \"" + subject +
                   "\" is limited. Established points are stated plainly here, and the remaining "
                   "details cannot be confirmed.";
        }
        if (role == "kpi_evaluator") return evaluator_fallback(h);
        return "[" + (role.empty() ? std::string("unknown") : role) + "] " + subject;
    }

private:
    // First `words` whitespace-separated words, with internal quotes dropped.
    static std::string headline(std::string_view text, std::size_t words) {
        std::istringstream in{std::string(text)};
        std::string w;
        std::string out;
        for (std::size_t i = 0; i < words && in >> w; ++i) {
            std::erase(w, '"');
            if (!out.empty()) out += ' ';
            out += w;
        }
        return out;
    }

    // Scores jittered deterministically around a per-stage profile.
    static std::string evaluator_fallback(std::uint64_t h) {
        static constexpr std::array<std::array<double, 4>, 3> profile = {{
            {0.48, 0.30, 0.14, 0.35},
            {0.44, 0.31, 0.21, 0.51},
            {0.49, 0.27, 0.18, 0.55},
        }};
        static constexpr std::array<std::string_view, 3> agents = {"frontend", "second_reviewer", "third_reviewer"};
        static constexpr std::array<std::string_view, 4> keys = {"FCD", "FGR", "FDF", "ECS"};
        std::uint64_t state = h;
        nlohmann::json out = nlohmann::json::object();
        for (std::size_t a = 0; a < agents.size(); ++a) {
            nlohmann::json scores = nlohmann::json::object();
            for (std::size_t k = 0; k < keys.size(); ++k) {
                const double jitter = static_cast<double>(splitmix64(state) % 301) / 1000.0 - 0.15;
                const double v = std::clamp(profile[a][k] + jitter, 0.0, 1.0);
                scores[std::string(keys[k])] = std::round(v * 1000.0) / 1000.0;
            }
            out[std::string(agents[a])] = std::move(scores);
        }
        return out.dump();
    }

    std::map<std::pair<std::string, std::string>, std::string> fixtures_;
    std::atomic<std::int64_t> calls_{0};
};

}  // namespace memguard
