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
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memguard/common.hpp"

namespace memguard {

/// Fixed-dimension real vector keying the semantic caches. Components are
/// always finite.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
        for (double v : values_) {
            if (!std::isfinite(v)) throw Error("embedding contains a non-finite component");
        }
    }

    std::size_t dimension() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double norm() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return std::sqrt(s);
    }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

inline double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) s += a[i] * b[i];
    return s;
}

/// dot(a,b) / (|a| |b|). Dimension mismatch and zero-norm inputs are errors:
/// a zero embedding always means a broken provider.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw Error("cosine_similarity: dimension mismatch (" + std::to_string(a.dimension()) +
                    " vs " + std::to_string(b.dimension()) + ")");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw Error("cosine_similarity: zero-norm embedding");
    // Multiplication is commutative in IEEE arithmetic, so the result is
    // exactly symmetric in its arguments.
    const double c = dot(a, b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

inline EmbeddingVector normalized(std::vector<double> values) {
    double s = 0.0;
    for (double v : values) s += v * v;
    const double n = std::sqrt(s);
    if (n == 0.0 || !std::isfinite(n)) throw Error("cannot normalize a zero-norm embedding");
    for (auto& v : values) v /= n;
    return EmbeddingVector(std::move(values));
}

enum class ProviderKind { deterministic_fake, remote_http };

inline std::string to_string(ProviderKind k) {
    return k == ProviderKind::deterministic_fake ? "deterministic_fake" : "remote_http";
}

struct EmbedderConfig {
    ProviderKind provider_kind = ProviderKind::deterministic_fake;
    std::size_t dimension = 384;
    std::uint64_t seed = 0;
    std::string endpoint_url;   // remote only
    std::string model_name;     // remote only
    std::string response_path = "embedding";
    double timeout_seconds = 30.0;

    void validate() const {
        if (dimension < 1) throw Error("embedder dimension must be >= 1");
        const bool remote = provider_kind == ProviderKind::remote_http;
        if (remote && endpoint_url.empty()) throw Error("remote embedder requires endpoint_url");
        if (!remote && !endpoint_url.empty()) {
            throw Error("endpoint_url is only valid for the remote embedder");
        }
    }
};

/// Text embedding provider. Implementations return unit-norm vectors and are
/// stateless after construction.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
};

/// Lowercased alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(ascii_lower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

/// Bag-of-tokens embedder: every token maps to a seeded pseudo-random unit
/// vector; the text embedding is the renormalized mean. Texts sharing most
/// tokens therefore score a high cosine similarity.
class FakeEmbedder final : public Embedder {
public:
    FakeEmbedder(std::size_t dimension, std::uint64_t seed) : dimension_(dimension), seed_(seed) {
        if (dimension_ < 1) throw Error("embedder dimension must be >= 1");
    }

    std::vector<double> token_vector(std::string_view token) const {
        std::uint64_t state = fnv1a64(token) ^ (seed_ * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        std::vector<double> v(dimension_);
        double s = 0.0;
        for (auto& x : v) {
            // 53 random bits mapped to [-1, 1)
            x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
            s += x * x;
        }
        const double n = std::sqrt(s);
        for (auto& x : v) x /= n;
        return v;
    }

    EmbeddingVector embed(std::string_view text) const override {
        const auto trimmed = trim(text);
        if (trimmed.empty()) throw Error("embed: empty text");
        auto tokens = tokenize(trimmed);
        if (tokens.empty()) tokens.emplace_back(to_lower_ascii(trimmed));
        std::vector<double> acc(dimension_, 0.0);
        for (const auto& t : tokens) {
            const auto tv = token_vector(t);
            for (std::size_t i = 0; i < dimension_; ++i) acc[i] += tv[i];
        }
        for (auto& x : acc) x /= static_cast<double>(tokens.size());
        return normalized(std::move(acc));
    }

    std::size_t dimension() const override { return dimension_; }

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

}  // namespace memguard
