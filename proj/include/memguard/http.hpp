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

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "memguard/common.hpp"

namespace memguard::http {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // starts with '/'
};

inline Endpoint split_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error("invalid endpoint url (missing scheme): " + std::string(url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string_view::npos) {
        ep.origin = std::string(url);
        ep.path = "/";
    } else {
        ep.origin = std::string(url.substr(0, path_start));
        ep.path = std::string(url.substr(path_start));
    }
    if (ep.origin.size() <= scheme_end + 3) throw Error("invalid endpoint url (missing host): " + std::string(url));
    return ep;
}

/// POSTs a JSON body and returns the parsed JSON response. Transport failures,
/// non-2xx statuses and unparsable bodies all raise Error naming the endpoint.
inline nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                                double timeout_seconds) {
    const auto ep = split_url(url);
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::duration<double>(timeout_seconds);
    const auto secs = static_cast<time_t>(std::floor(timeout.count()));
    const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(ep.path, body.dump(), "application/json");
    if (!res) {
        throw Error("POST " + url + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error("POST " + url + " returned HTTP " + std::to_string(res->status) + ": " +
                    res->body.substr(0, 200));
    }
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("POST " + url + " returned invalid JSON: " + e.what());
    }
}

/// Opens a connection to the endpoint's origin and issues a GET. Any HTTP
/// status counts as reachable; only transport failures throw.
inline void probe(const std::string& url, double timeout_seconds) {
    const auto ep = split_url(url);
    httplib::Client client(ep.origin);
    const auto secs = static_cast<time_t>(std::floor(timeout_seconds));
    const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    auto res = client.Get("/");
    if (!res) throw Error("endpoint " + url + " unreachable: " + httplib::to_string(res.error()));
}

/// Resolves a dotted path such as "data.0.embedding" inside a JSON document.
inline const nlohmann::json* find_path(const nlohmann::json& doc, std::string_view path) {
    const nlohmann::json* cur = &doc;
    while (!path.empty()) {
        const auto dot = path.find('.');
        const auto key = path.substr(0, dot);
        path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
        if (cur->is_object()) {
            auto it = cur->find(std::string(key));
            if (it == cur->end()) return nullptr;
            cur = &*it;
        } else if (cur->is_array()) {
            std::size_t idx = 0;
            auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (ec != std::errc{} || p != key.data() + key.size() || idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else {
            return nullptr;
        }
    }
    return cur;
}

}  // namespace memguard::http
