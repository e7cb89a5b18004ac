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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "memguard/agents.hpp"
#include "memguard/benchmark.hpp"
#include "memguard/kpi.hpp"
#include "memguard/ofp.hpp"

namespace memguard {

struct StageRecord {
    AgentOutput output;
    KpiVector kpi;             // evaluator scores + analytic OSR
    OsrBreakdown osr;
    std::vector<double> ths;   // one per weight config, in config order
};

struct RunResult {
    int prompt_id = 0;
    Subset subset = Subset::realistic;
    std::string prompt_text;
    std::array<StageRecord, 3> stages;
    bool skipped = false;
    std::string skip_reason;

    bool any_cache_hit() const {
        for (const auto& s : stages) {
            if (is_hit(s.output.cache_event)) return true;
        }
        return false;
    }
};

struct PipelineAgents {
    std::array<AgentConfig, 3> stages{default_agent_config(AgentRole::frontend),
                                      default_agent_config(AgentRole::second_reviewer),
                                      default_agent_config(AgentRole::third_reviewer)};
    AgentConfig evaluator = default_agent_config(AgentRole::kpi_evaluator);

    void validate() const {
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (stages[i].name != kPipelineRoles[i]) {
                throw Error("pipeline stage " + std::to_string(i + 1) + " must be " + to_string(kPipelineRoles[i]));
            }
            stages[i].validate();
        }
        if (evaluator.name != AgentRole::kpi_evaluator) throw Error("evaluator slot must hold kpi_evaluator");
        evaluator.validate();
    }
};

inline std::string conversation_id(int prompt_id) {
    std::string digits = std::to_string(prompt_id);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return "prompt-" + digits;
}

/// Drives the three agents and the evaluator for one prompt at a time.
/// Each stage owns its ContinuumMemory; the evaluator only reads outputs.
class Pipeline {
public:
    Pipeline(PipelineAgents agents, std::vector<WeightConfig> weights, OsrLexicon lexicon, const Embedder& embedder,
             Backend& backend, Clock& clock, ofp::Bus& bus)
        : agents_(std::move(agents)),
          weights_(std::move(weights)),
          lexicon_(std::move(lexicon)),
          embedder_(embedder),
          backend_(backend),
          clock_(clock),
          bus_(bus),
          memories_{ContinuumMemory(*agents_.stages[0].cms), ContinuumMemory(*agents_.stages[1].cms),
                    ContinuumMemory(*agents_.stages[2].cms)} {
        agents_.validate();
        lexicon_.validate();
        if (weights_.empty()) throw Error("pipeline: no weight configs");
        for (const auto& w : weights_) w.validate();
    }

    RunResult run_prompt(const BenchmarkPrompt& prompt) {
        const std::int64_t index = ++prompt_index_;
        const auto conv = conversation_id(prompt.id);
        RunResult result;
        result.prompt_id = prompt.id;
        result.subset = prompt.subset;
        result.prompt_text = prompt.text;

        publish(conv, ofp::Event::request, "user", to_string(AgentRole::frontend), prompt.text);

        auto& fe = result.stages[0].output;
        fe = run_stage(agents_.stages[0], prompt.text, index, memories_[0], embedder_, backend_, clock_);
        publish(conv, ofp::Event::response, to_string(AgentRole::frontend), to_string(AgentRole::second_reviewer),
                fe.raw_text);

        auto& second = result.stages[1].output;
        second = run_stage(agents_.stages[1], compose_second_stage_input(prompt.text, fe.utterance), index,
                           memories_[1], embedder_, backend_, clock_);
        publish(conv, ofp::Event::review, to_string(AgentRole::second_reviewer), to_string(AgentRole::third_reviewer),
                second.raw_text);

        auto& third = result.stages[2].output;
        third = run_stage(agents_.stages[2], second.utterance, index, memories_[2], embedder_, backend_, clock_);
        publish(conv, ofp::Event::final, to_string(AgentRole::third_reviewer), "user", third.raw_text);

        if (log_ != nullptr && second.degraded) {
            *log_ << "warning: " << conv << ": second_reviewer output had no structured fields; using raw text\n";
        }

        const auto eval = run_kpi_evaluator(agents_.evaluator, prompt.text, {fe, second, third}, backend_);
        if (!eval.scores) {
            result.skipped = true;
            result.skip_reason = eval.error;
            if (log_ != nullptr) *log_ << "warning: " << conv << ": evaluation skipped: " << eval.error << '\n';
            return result;
        }
        for (std::size_t s = 0; s < 3; ++s) {
            auto& rec = result.stages[s];
            const auto& q = (*eval.scores)[s];
            rec.osr = osr_score(rec.output.raw_text, lexicon_);
            rec.kpi = {q.fcd, q.fgr, q.fdf, q.ecs, rec.osr.final};
            rec.ths.reserve(weights_.size());
            for (const auto& w : weights_) rec.ths.push_back(ths(rec.kpi, w));
        }
        return result;
    }

    std::vector<RunResult> run_all(std::span<const BenchmarkPrompt> prompts) {
        std::vector<RunResult> out;
        out.reserve(prompts.size());
        for (const auto& p : prompts) out.push_back(run_prompt(p));
        return out;
    }

    void set_log(std::ostream* log) { log_ = log; }

    const ContinuumMemory& memory(AgentRole role) const { return memories_[stage_index(role)]; }
    const PipelineAgents& agents() const { return agents_; }
    const std::vector<WeightConfig>& weights() const { return weights_; }

private:
    void publish(const std::string& conv, ofp::Event event, std::string sender, std::string recipient,
                 std::string payload) {
        bus_.publish({conv, bus_.next_sequence(conv), event, std::move(sender), std::move(recipient),
                      std::move(payload), clock_.utc_now()});
    }

    PipelineAgents agents_;
    std::vector<WeightConfig> weights_;
    OsrLexicon lexicon_;
    const Embedder& embedder_;
    Backend& backend_;
    Clock& clock_;
    ofp::Bus& bus_;
    std::array<ContinuumMemory, 3> memories_;
    std::int64_t prompt_index_ = 0;
    std::ostream* log_ = nullptr;
};

struct StageIo {
    std::string input;
    std::string raw_text;
    std::string utterance;
};

/// Rebuilds every stage input and output of one conversation from its four
/// trace envelopes.
inline std::array<StageIo, 3> replay_conversation(std::span<const ofp::Envelope> envelopes) {
    if (envelopes.size() != 4) throw Error("replay: a conversation has exactly four envelopes");
    const std::array<ofp::Event, 4> order = {ofp::Event::request, ofp::Event::response, ofp::Event::review,
                                             ofp::Event::final};
    for (std::size_t i = 0; i < 4; ++i) {
        if (envelopes[i].event != order[i]) throw Error("replay: envelopes out of order");
    }
    std::array<StageIo, 3> io;
    const auto& prompt = envelopes[0].payload;
    io[0] = {prompt, envelopes[1].payload, std::string(trim(envelopes[1].payload))};
    io[1].input = compose_second_stage_input(prompt, io[0].utterance);
    io[1].raw_text = envelopes[2].payload;
    io[1].utterance = parse_reviewer_fields(io[1].raw_text).utterance;
    io[2] = {io[1].utterance, envelopes[3].payload, std::string(trim(envelopes[3].payload))};
    return io;
}

}  // namespace memguard
