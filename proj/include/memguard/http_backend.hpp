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

#include <string>

#include "memguard/http.hpp"
#include "memguard/llm_backend.hpp"

namespace memguard {

/// Wire field names; the defaults follow the common local-inference shape.
struct GenerateFieldNames {
    std::string model = "model";
    std::string system = "system";
    std::string prompt = "prompt";
    std::string options = "options";
    std::string response = "response";
};

struct HttpBackendConfig {
    std::string endpoint_url = "http://localhost:11434/api/generate";
    double timeout_seconds = 120.0;
    int retries = 1;  // re-attempts after a failed call; at most one
    GenerateFieldNames fields;
};

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (config_.retries < 0 || config_.retries > 1) throw Error("http backend: retries must be 0 or 1");
        http::split_url(config_.endpoint_url);
    }

    nlohmann::json build_body(const GenerationRequest& r) const {
        nlohmann::json options = {{"temperature", r.params.temperature},
                                  {"top_p", r.params.top_p},
                                  {"num_ctx", r.params.context_window}};
        if (r.params.seed) options["seed"] = *r.params.seed;
        const auto& f = config_.fields;
        return {{f.model, r.params.model_name},
                {f.system, r.system_prompt},
                {f.prompt, r.user_content},
                {f.options, options},
                {"stream", false}};
    }

    std::string generate(const GenerationRequest& request) override {
        request.validate();
        const auto body = build_body(request);
        for (int attempt = 0;; ++attempt) {
            try {
                const auto doc = http::post_json(config_.endpoint_url, body, config_.timeout_seconds);
                const auto* field = http::find_path(doc, config_.fields.response);
                if (field == nullptr || !field->is_string()) {
                    throw Error("generate " + config_.endpoint_url + ": response has no string field '" +
                                config_.fields.response + "'");
                }
                return field->get<std::string>();
            } catch (const Error&) {
                if (attempt >= config_.retries) throw;
            }
        }
    }

    std::string name() const override { return "http:" + config_.endpoint_url; }
    const HttpBackendConfig& config() const { return config_; }

private:
    HttpBackendConfig config_;
};

}  // namespace memguard
