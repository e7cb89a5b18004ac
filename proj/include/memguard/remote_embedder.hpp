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

#include <memory>
#include <string>
#include <vector>

#include "memguard/embedding.hpp"
#include "memguard/http.hpp"

namespace memguard {

/// Client for a remote embedding endpoint. Request body is
/// {"model": ..., "input": ...}; the vector is read from `response_path`.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
        config_.validate();
        if (config_.provider_kind != ProviderKind::remote_http) {
            throw Error("RemoteEmbedder requires provider_kind remote_http");
        }
    }

    EmbeddingVector embed(std::string_view text) const override {
        if (trim(text).empty()) throw Error("embed: empty text");
        const nlohmann::json body = {{"model", config_.model_name}, {"input", std::string(text)}};
        const auto doc = http::post_json(config_.endpoint_url, body, config_.timeout_seconds);
        const auto* arr = http::find_path(doc, config_.response_path);
        if (arr == nullptr || !arr->is_array()) {
            throw Error("embedder " + config_.endpoint_url + ": response has no array at '" +
                        config_.response_path + "'");
        }
        if (arr->size() != config_.dimension) {
            throw Error("embedder " + config_.endpoint_url + ": expected dimension " +
                        std::to_string(config_.dimension) + ", got " + std::to_string(arr->size()));
        }
        std::vector<double> values;
        values.reserve(arr->size());
        for (const auto& v : *arr) {
            if (!v.is_number()) throw Error("embedder " + config_.endpoint_url + ": non-numeric component");
            values.push_back(v.get<double>());
        }
        return normalized(std::move(values));
    }

    std::size_t dimension() const override { return config_.dimension; }

private:
    EmbedderConfig config_;
};

inline std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
    config.validate();
    if (config.provider_kind == ProviderKind::remote_http) {
        return std::make_unique<RemoteEmbedder>(config);
    }
    return std::make_unique<FakeEmbedder>(config.dimension, config.seed);
}

inline EmbeddingVector embed(std::string_view text, const EmbedderConfig& config) {
    return make_embedder(config)->embed(text);
}

}  // namespace memguard
