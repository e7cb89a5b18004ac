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
#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "memguard/embedding.hpp"

namespace memguard {

struct CacheEntry {
    std::string prompt_text;
    EmbeddingVector prompt_embedding;
    std::string response_payload;
    std::string agent_name;
    std::int64_t created_at_index = 0;
    std::int64_t last_access_index = 0;
    std::int64_t access_count = 1;  // storing counts as the first access
};

struct CmsConfig {
    std::size_t mtm_capacity = 10;
    std::size_t ltm_capacity = 100;
    double tau = 0.87;
    std::int64_t write_cadence = 2;
    std::int64_t consolidation_cadence = 100;
    std::size_t promote_top_k = 1;
    bool ltm_probe_on_miss = true;

    static CmsConfig frontend() { return {}; }
    static CmsConfig reviewer() {
        CmsConfig c;
        c.mtm_capacity = 5;
        c.ltm_capacity = 50;
        c.consolidation_cadence = 50;
        return c;
    }

    void validate() const {
        if (mtm_capacity == 0 || ltm_capacity == 0) throw Error("cms: capacities must be positive");
        if (mtm_capacity > ltm_capacity) throw Error("cms: mtm_capacity must not exceed ltm_capacity");
        if (!(tau > 0.0 && tau <= 1.0)) throw Error("cms: tau must lie in (0, 1]");
        if (write_cadence < 1 || consolidation_cadence < 1) throw Error("cms: cadences must be positive");
        if (promote_top_k < 1) throw Error("cms: promote_top_k must be positive");
    }
};

struct CacheStats {
    std::int64_t mtm_hits = 0;
    std::int64_t ltm_migrations = 0;
    std::int64_t misses = 0;
    std::int64_t lookups = 0;
    std::int64_t flushes = 0;
    std::int64_t consolidations = 0;
    std::int64_t evictions_lru = 0;
    std::int64_t evictions_lfu = 0;

    std::int64_t hits() const { return mtm_hits + ltm_migrations; }
    std::optional<double> hit_rate() const {
        if (lookups == 0) return std::nullopt;
        return static_cast<double>(hits()) / static_cast<double>(lookups);
    }
    bool operator==(const CacheStats&) const = default;
};

enum class CacheLayer { mtm, ltm };

inline std::string to_string(CacheLayer l) { return l == CacheLayer::mtm ? "mtm" : "ltm"; }

struct CacheHit {
    CacheEntry entry;  // snapshot after the access was recorded
    double similarity = 0.0;
    CacheLayer source = CacheLayer::mtm;
};

struct EvictionRecord {
    CacheLayer layer;
    std::string prompt_text;
    std::int64_t prompt_index;
};

/// Per-agent two-layer semantic cache. MTM is LRU-ordered and consulted for
/// reuse; LTM is LFU-evicted and fed by periodic consolidation. Writes are
/// buffered and land in MTM on cadence boundaries.
///
/// Owned by one agent; not safe for concurrent mutation.
class ContinuumMemory {
public:
    explicit ContinuumMemory(CmsConfig config) : config_(config) { config_.validate(); }

    const CmsConfig& config() const { return config_; }

    /// Semantic lookup at threshold tau. MTM first; on an MTM miss LTM is
    /// probed (if enabled) and a match is copied back into MTM.
    std::optional<CacheHit> lookup(const EmbeddingVector& query, std::int64_t prompt_index) {
        advance(prompt_index);
        ++stats_.lookups;

        if (auto it = best_match(mtm_.begin(), mtm_.end(), query); it.has_value()) {
            auto [pos, sim] = *it;
            touch(pos->entry, prompt_index);
            mtm_.splice(mtm_.begin(), mtm_, pos);
            ++stats_.mtm_hits;
            return CacheHit{mtm_.front().entry, sim, CacheLayer::mtm};
        }

        if (config_.ltm_probe_on_miss) {
            if (auto it = best_match(ltm_.begin(), ltm_.end(), query); it.has_value()) {
                auto [pos, sim] = *it;
                touch(pos->entry, prompt_index);
                insert_mtm(pos->entry, prompt_index);
                ++stats_.ltm_migrations;
                return CacheHit{pos->entry, sim, CacheLayer::ltm};
            }
        }

        ++stats_.misses;
        return std::nullopt;
    }

    /// Buffers a new entry; pending entries are flushed into MTM whenever
    /// prompt_index is a multiple of write_cadence.
    void record(CacheEntry entry, std::int64_t prompt_index) {
        advance(prompt_index);
        entry.access_count = std::max<std::int64_t>(entry.access_count, 1);
        entry.last_access_index = std::max(entry.last_access_index, entry.created_at_index);
        pending_.push_back(std::move(entry));
        flush_if_due(prompt_index);
    }

    /// Flushes the write buffer if prompt_index falls on the write cadence.
    /// Returns true when entries were moved into MTM.
    bool flush_if_due(std::int64_t prompt_index) {
        advance(prompt_index);
        if (prompt_index % config_.write_cadence != 0 || pending_.empty()) return false;
        for (auto& e : pending_) insert_mtm(std::move(e), prompt_index);
        pending_.clear();
        ++stats_.flushes;
        return true;
    }

    /// Promotes the promote_top_k most-accessed MTM entries into LTM on the
    /// consolidation cadence. An LTM entry for the same prompt is refreshed
    /// instead of duplicated.
    void consolidate(std::int64_t prompt_index) {
        advance(prompt_index);
        if (prompt_index % config_.consolidation_cadence != 0) return;
        ++stats_.consolidations;

        // MTM order is most-recent first, so a stable sort keeps recency as the tie rule.
        std::vector<const Slot*> ranked;
        ranked.reserve(mtm_.size());
        for (const auto& s : mtm_) ranked.push_back(&s);
        std::stable_sort(ranked.begin(), ranked.end(), [](const Slot* a, const Slot* b) {
            return a->entry.access_count > b->entry.access_count;
        });
        if (ranked.size() > config_.promote_top_k) ranked.resize(config_.promote_top_k);

        for (const Slot* s : ranked) {
            auto existing = std::find_if(ltm_.begin(), ltm_.end(), [&](const Slot& l) {
                return l.entry.prompt_text == s->entry.prompt_text;
            });
            if (existing != ltm_.end()) {
                existing->entry.access_count = std::max(existing->entry.access_count, s->entry.access_count);
                existing->entry.last_access_index =
                    std::max(existing->entry.last_access_index, s->entry.last_access_index);
                continue;
            }
            if (ltm_.size() >= config_.ltm_capacity) evict_lfu(prompt_index);
            ltm_.push_back(Slot{s->entry, next_seq_++});
        }
    }

    CacheStats snapshot_stats() const { return stats_; }

    /// MTM contents, most recently used first.
    std::vector<CacheEntry> mtm_entries() const {
        std::vector<CacheEntry> out;
        for (const auto& s : mtm_) out.push_back(s.entry);
        return out;
    }

    /// LTM contents in insertion order.
    std::vector<CacheEntry> ltm_entries() const {
        std::vector<CacheEntry> out;
        for (const auto& s : ltm_) out.push_back(s.entry);
        return out;
    }

    std::size_t mtm_size() const { return mtm_.size(); }
    std::size_t ltm_size() const { return ltm_.size(); }
    std::size_t pending_size() const { return pending_.size(); }
    const std::vector<EvictionRecord>& evictions() const { return evictions_; }

private:
    struct Slot {
        CacheEntry entry;
        std::uint64_t stored_seq;
    };

    void advance(std::int64_t prompt_index) {
        if (prompt_index < last_index_) {
            throw Error("cms: prompt_index went backwards (" + std::to_string(prompt_index) +
                        " after " + std::to_string(last_index_) + ")");
        }
        last_index_ = prompt_index;
    }

    static void touch(CacheEntry& e, std::int64_t prompt_index) {
        ++e.access_count;
        e.last_access_index = prompt_index;
    }

    // Highest similarity >= tau; exact ties go to the most recently stored slot.
    template <typename It>
    std::optional<std::pair<It, double>> best_match(It first, It last, const EmbeddingVector& query) const {
        std::optional<std::pair<It, double>> best;
        for (auto it = first; it != last; ++it) {
            const double sim = cosine_similarity(query, it->entry.prompt_embedding);
            if (sim < config_.tau) continue;
            if (!best || sim > best->second ||
                (sim == best->second && it->stored_seq > best->first->stored_seq)) {
                best = std::make_pair(it, sim);
            }
        }
        return best;
    }

    void insert_mtm(CacheEntry entry, std::int64_t prompt_index) {
        if (mtm_.size() >= config_.mtm_capacity) {
            evictions_.push_back({CacheLayer::mtm, mtm_.back().entry.prompt_text, prompt_index});
            mtm_.pop_back();
            ++stats_.evictions_lru;
        }
        mtm_.push_front(Slot{std::move(entry), next_seq_++});
    }

    void evict_lfu(std::int64_t prompt_index) {
        auto victim = std::min_element(ltm_.begin(), ltm_.end(), [](const Slot& a, const Slot& b) {
            if (a.entry.access_count != b.entry.access_count) return a.entry.access_count < b.entry.access_count;
            if (a.entry.created_at_index != b.entry.created_at_index) {
                return a.entry.created_at_index < b.entry.created_at_index;
            }
            return a.stored_seq < b.stored_seq;
        });
        evictions_.push_back({CacheLayer::ltm, victim->entry.prompt_text, prompt_index});
        ltm_.erase(victim);
        ++stats_.evictions_lfu;
    }

    CmsConfig config_;
    std::list<Slot> mtm_;
    std::vector<Slot> ltm_;
    std::vector<CacheEntry> pending_;
    CacheStats stats_;
    std::vector<EvictionRecord> evictions_;
    std::uint64_t next_seq_ = 0;
    std::int64_t last_index_ = 0;
};

inline nlohmann::json to_json(const CacheStats& s) {
    nlohmann::json j = {{"mtm_hits", s.mtm_hits},       {"ltm_migrations", s.ltm_migrations},
                        {"misses", s.misses},           {"lookups", s.lookups},
                        {"flushes", s.flushes},         {"consolidations", s.consolidations},
                        {"evictions_lru", s.evictions_lru}, {"evictions_lfu", s.evictions_lfu}};
    if (auto r = s.hit_rate()) {
        j["hit_rate"] = *r;
    } else {
        j["hit_rate"] = nullptr;
    }
    return j;
}

inline nlohmann::json to_json(const CacheEntry& e, bool include_embedding = false) {
    nlohmann::json j = {{"prompt_text", e.prompt_text},
                        {"response_payload", e.response_payload},
                        {"agent_name", e.agent_name},
                        {"created_at_index", e.created_at_index},
                        {"last_access_index", e.last_access_index},
                        {"access_count", e.access_count},
                        {"embedding_dimension", e.prompt_embedding.dimension()}};
    if (include_embedding) {
        auto v = e.prompt_embedding.values();
        j["prompt_embedding"] = std::vector<double>(v.begin(), v.end());
    }
    return j;
}

/// Post-run dump: {agent, mtm: [...], ltm: [...], stats}.
inline nlohmann::json dump_memory(const std::string& agent, const ContinuumMemory& memory,
                                  bool include_embeddings = false) {
    nlohmann::json mtm = nlohmann::json::array();
    for (const auto& e : memory.mtm_entries()) mtm.push_back(to_json(e, include_embeddings));
    nlohmann::json ltm = nlohmann::json::array();
    for (const auto& e : memory.ltm_entries()) ltm.push_back(to_json(e, include_embeddings));
    return {{"agent", agent}, {"mtm", mtm}, {"ltm", ltm}, {"stats", to_json(memory.snapshot_stats())}};
}

}  // namespace memguard
