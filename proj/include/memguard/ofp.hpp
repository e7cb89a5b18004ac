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
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "memguard/common.hpp"

namespace memguard::ofp {

enum class Event { request, response, review, final };

inline std::string to_string(Event e) {
    switch (e) {
        case Event::request: return "OFP_REQUEST";
        case Event::response: return "OFP_RESPONSE";
        case Event::review: return "OFP_REVIEW";
        case Event::final: return "OFP_FINAL";
    }
    return "OFP_UNKNOWN";
}

inline Event event_from_string(const std::string& s) {
    if (s == "OFP_REQUEST") return Event::request;
    if (s == "OFP_RESPONSE") return Event::response;
    if (s == "OFP_REVIEW") return Event::review;
    if (s == "OFP_FINAL") return Event::final;
    throw Error("unknown OFP event: " + s);
}

struct Envelope {
    std::string conversation_id;
    std::int64_t sequence = 0;
    Event event = Event::request;
    std::string sender;
    std::string recipient;
    std::string payload;
    std::string timestamp;  // ISO-8601 UTC

    bool operator==(const Envelope&) const = default;
};

// Keys are emitted in declaration order so exported traces are stable.
inline std::string to_json_line(const Envelope& e) {
    nlohmann::ordered_json j;
    j["conversation_id"] = e.conversation_id;
    j["sequence"] = e.sequence;
    j["event"] = to_string(e.event);
    j["sender"] = e.sender;
    j["recipient"] = e.recipient;
    j["payload"] = e.payload;
    j["timestamp"] = e.timestamp;
    return j.dump();
}

inline Envelope envelope_from_json(const nlohmann::json& j) {
    return {j.at("conversation_id").get<std::string>(), j.at("sequence").get<std::int64_t>(),
            event_from_string(j.at("event").get<std::string>()), j.at("sender").get<std::string>(),
            j.at("recipient").get<std::string>(), j.at("payload").get<std::string>(),
            j.at("timestamp").get<std::string>()};
}

/// In-process single-writer bus. Each conversation must publish exactly
/// REQUEST, RESPONSE, REVIEW, FINAL with sequence numbers 1..4.
class Bus {
public:
    using Observer = std::function<void(const Envelope&)>;

    void subscribe(Observer observer) { observers_.push_back(std::move(observer)); }

    void publish(Envelope envelope) {
        auto& state = conversations_[envelope.conversation_id];
        if (state > static_cast<int>(Event::final)) {
            throw Error("ofp: conversation '" + envelope.conversation_id + "' already finished");
        }
        const auto expected_event = static_cast<Event>(state);
        if (envelope.event != expected_event) {
            throw Error("ofp: conversation '" + envelope.conversation_id + "' expected " +
                        to_string(expected_event) + ", got " + to_string(envelope.event));
        }
        if (envelope.sequence != state + 1) {
            throw Error("ofp: conversation '" + envelope.conversation_id + "' expected sequence " +
                        std::to_string(state + 1) + ", got " + std::to_string(envelope.sequence));
        }
        ++state;
        trace_.push_back(std::move(envelope));
        for (const auto& obs : observers_) obs(trace_.back());
    }

    /// Next sequence number for a conversation.
    std::int64_t next_sequence(const std::string& conversation_id) const {
        auto it = conversations_.find(conversation_id);
        return it == conversations_.end() ? 1 : it->second + 1;
    }

    std::span<const Envelope> trace() const { return trace_; }

    void export_trace(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("ofp: cannot open trace file " + path.string());
        for (const auto& e : trace_) out << to_json_line(e) << '\n';
        out.flush();
        if (!out) throw Error("ofp: failed writing trace file " + path.string());
    }

private:
    std::vector<Envelope> trace_;
    std::unordered_map<std::string, int> conversations_;  // events published so far
    std::vector<Observer> observers_;
};

inline std::vector<Envelope> read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("ofp: cannot open trace file " + path.string());
    std::vector<Envelope> out;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(envelope_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

}  // namespace memguard::ofp
