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
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "memguard/common.hpp"

namespace memguard {

/// Keyword lexicons and scoring constants for the observability score.
struct OsrLexicon {
    std::vector<std::string> reasoning_phrases;
    std::vector<std::string> metadata_phrases;
    std::vector<std::string> disclaimer_phrases;
    std::array<double, 3> weights{0.4, 0.3, 0.3};
    std::array<double, 3> divisors{5.0, 3.0, 5.0};
    std::array<double, 2> clamp{0.05, 0.95};

    void validate() const {
        const double wsum = weights[0] + weights[1] + weights[2];
        if (std::abs(wsum - 1.0) > 1e-9) throw Error("osr lexicon: weights must sum to 1");
        for (double d : divisors) {
            if (!(d > 0.0)) throw Error("osr lexicon: divisors must be positive");
        }
        if (!(clamp[0] <= clamp[1])) throw Error("osr lexicon: clamp lower bound exceeds upper bound");
        for (const auto* list : {&reasoning_phrases, &metadata_phrases, &disclaimer_phrases}) {
            for (const auto& p : *list) {
                if (p.empty()) throw Error("osr lexicon: empty phrase");
                if (p != to_lower_ascii(p)) throw Error("osr lexicon: phrase not lowercase: " + p);
            }
        }
    }
};

inline OsrLexicon default_osr_lexicon() {
    OsrLexicon lex;
    lex.reasoning_phrases = {"because",       "the reason",     "this is due to", "therefore",
                             "consequently",  "this suggests",  "analysis shows", "upon review",
                             "examining",     "considering",    "to clarify",     "in other words",
                             "let me explain", "it follows that"};
    lex.metadata_phrases = {"confidence", "risk level", "category",  "classification", "verified",
                            "unverified", "source",     "evidence level", "certainty", "whisper",
                            "context:",   "assessment", "hallucination",  "rating"};
    lex.disclaimer_phrases = {"disclaimer",        "note that",          "it is important to note",
                              "fiction",           "fictional",          "myth",
                              "legend",            "speculative",        "hypothetical",
                              "imaginary",         "no real-world basis", "not factual",
                              "not verified",      "purely theoretical", "no evidence exists",
                              "cannot be confirmed", "should not be taken as fact",
                              "for illustration only", "reportedly", "allegedly", "purportedly"};
    return lex;
}

inline nlohmann::json to_json(const OsrLexicon& lex) {
    return {{"reasoning", lex.reasoning_phrases}, {"metadata", lex.metadata_phrases},
            {"disclaimer", lex.disclaimer_phrases}, {"weights", lex.weights},
            {"divisors", lex.divisors},             {"clamp", lex.clamp}};
}

inline OsrLexicon osr_lexicon_from_json(const nlohmann::json& j) {
    OsrLexicon lex = default_osr_lexicon();
    lex.reasoning_phrases = j.at("reasoning").get<std::vector<std::string>>();
    lex.metadata_phrases = j.at("metadata").get<std::vector<std::string>>();
    lex.disclaimer_phrases = j.at("disclaimer").get<std::vector<std::string>>();
    if (j.contains("weights")) lex.weights = j.at("weights").get<std::array<double, 3>>();
    if (j.contains("divisors")) lex.divisors = j.at("divisors").get<std::array<double, 3>>();
    if (j.contains("clamp")) lex.clamp = j.at("clamp").get<std::array<double, 2>>();
    lex.validate();
    return lex;
}

struct OsrBreakdown {
    std::int64_t reasoning_raw = 0;
    std::int64_t metadata_raw = 0;
    std::int64_t disclaimer_raw = 0;
    double reasoning_score = 0.0;
    double metadata_score = 0.0;
    double disclaimer_score = 0.0;
    double final = 0.0;
};

/// Non-overlapping, left-to-right occurrences of `needle` in `haystack`.
/// Both arguments must already be lowercase.
inline std::int64_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    std::int64_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

/// Each phrase is counted independently, so "unverified" scores for both
/// "verified" and "unverified".
inline std::int64_t count_phrases(std::string_view lowered_text, const std::vector<std::string>& phrases) {
    std::int64_t total = 0;
    for (const auto& p : phrases) total += count_occurrences(lowered_text, p);
    return total;
}

inline OsrBreakdown osr_score(std::string_view response_text, const OsrLexicon& lexicon) {
    const std::string text = to_lower_ascii(response_text);
    OsrBreakdown b;
    b.reasoning_raw = count_phrases(text, lexicon.reasoning_phrases);
    b.metadata_raw = count_phrases(text, lexicon.metadata_phrases);
    b.disclaimer_raw = count_phrases(text, lexicon.disclaimer_phrases);
    b.reasoning_score = std::min(static_cast<double>(b.reasoning_raw) / lexicon.divisors[0], 1.0);
    b.metadata_score = std::min(static_cast<double>(b.metadata_raw) / lexicon.divisors[1], 1.0);
    b.disclaimer_score = std::min(static_cast<double>(b.disclaimer_raw) / lexicon.divisors[2], 1.0);
    const double raw = lexicon.weights[0] * b.reasoning_score + lexicon.weights[1] * b.metadata_score +
                       lexicon.weights[2] * b.disclaimer_score;
    b.final = std::clamp(raw, lexicon.clamp[0], lexicon.clamp[1]);
    return b;
}

struct KpiVector {
    double fcd = 0.0;
    double fgr = 0.0;
    double fdf = 0.0;
    double ecs = 0.0;
    double osr = 0.0;

    bool in_unit_range() const {
        for (double v : {fcd, fgr, fdf, ecs, osr}) {
            if (!(v >= 0.0 && v <= 1.0)) return false;
        }
        return true;
    }
    bool operator==(const KpiVector&) const = default;
};

struct WeightConfig {
    std::string name;
    double w1 = 0.0;  // FCD
    double w2 = 0.0;  // FGR
    double w3 = 0.0;  // FDF
    double w4 = 0.0;  // ECS
    double w5 = 0.0;  // OSR

    double sum() const { return w1 + w2 + w3 + w4 + w5; }

    void validate() const {
        for (double w : {w1, w2, w3, w4, w5}) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw Error("weight config '" + name + "': weights must be nonnegative");
        }
        if (!(sum() > 0.0)) throw Error("weight config '" + name + "': all weights are zero");
    }
};

/// The five shipped weighting presets.
inline std::vector<WeightConfig> default_weight_configs() {
    return {
        {"Baseline", 0.200, 0.200, 0.200, 0.200, 0.200},
        {"ObservabilityAware", 0.125, 0.125, 0.250, 0.250, 0.250},
        {"SecurityFirst", 0.250, 0.250, 0.167, 0.167, 0.166},
        {"ResearchMode", 0.100, 0.100, 0.267, 0.267, 0.266},
        {"ExtremeObservability", 0.080, 0.080, 0.280, 0.280, 0.280},
    };
}

inline nlohmann::json to_json(const WeightConfig& w) {
    return {{"name", w.name}, {"w1", w.w1}, {"w2", w.w2}, {"w3", w.w3}, {"w4", w.w4}, {"w5", w.w5}};
}

inline std::vector<WeightConfig> weight_configs_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw Error("weight config file must be a nonempty JSON array");
    std::vector<WeightConfig> out;
    for (const auto& item : j) {
        WeightConfig w{item.at("name").get<std::string>(), item.at("w1").get<double>(), item.at("w2").get<double>(),
                       item.at("w3").get<double>(), item.at("w4").get<double>(), item.at("w5").get<double>()};
        w.validate();
        out.push_back(std::move(w));
    }
    return out;
}

struct ThsContext {
    int n_agents = 3;
};

/// Total hallucination score: FCD is added, the four mitigation signals are
/// subtracted, and the sum is normalized by N_A times the weight total.
inline double ths(const KpiVector& k, const WeightConfig& w, ThsContext ctx = {}) {
    if (!(w.sum() > 0.0)) throw Error("ths: all weights are zero");
    if (ctx.n_agents < 1) throw Error("ths: n_agents must be >= 1");
    const double num = w.w1 * k.fcd - w.w2 * k.fgr - w.w3 * k.fdf - w.w4 * k.ecs - w.w5 * k.osr;
    return num / (static_cast<double>(ctx.n_agents) * w.sum());
}

/// Relative change in percent; negative means the final stage is more negative.
inline double delta_percent(double first_stage_ths, double final_stage_ths) {
    if (first_stage_ths == 0.0) throw Error("delta_percent: first-stage THS is zero");
    return 100.0 * (final_stage_ths - first_stage_ths) / std::abs(first_stage_ths);
}

}  // namespace memguard
