/*
 * Copyright 2026 The ragforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "http_util.hpp"

#include <httplib.h>

#include "ragforge/error.hpp"

namespace ragforge::http {

Endpoint parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL '" + url + "' has no scheme");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint URL '" + url + "' must use http or https");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint endpoint;
    endpoint.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) {
        endpoint.prefix = url.substr(path_start);
        while (!endpoint.prefix.empty() && endpoint.prefix.back() == '/') {
            endpoint.prefix.pop_back();
        }
    }
    if (endpoint.origin.size() <= scheme_end + 3) {
        throw ConfigError("endpoint URL '" + url + "' has no host");
    }
    return endpoint;
}

namespace {

httplib::Client make_client(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
    httplib::Client client(endpoint.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    return client;
}

nlohmann::json handle(const httplib::Result& result, const std::string& target) {
    if (!result) {
        throw TransportError(target + ": " + httplib::to_string(result.error()));
    }
    const int status = result->status;
    if (status == 429 || status >= 500) {
        throw TransportError(target + ": HTTP " + std::to_string(status));
    }
    if (status < 200 || status >= 300) {
        throw ProtocolError(target + ": HTTP " + std::to_string(status) + ": " + result->body.substr(0, 200));
    }
    try {
        return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProtocolError(target + ": response is not JSON: " + e.what());
    }
}

}  // namespace

nlohmann::json post_json(const std::string& url, const std::string& path, const nlohmann::json& body,
                         const Headers& headers, std::chrono::milliseconds timeout) {
    const auto endpoint = parse_url(url);
    auto client = make_client(endpoint, timeout);
    httplib::Headers request_headers;
    for (const auto& [name, value] : headers) {
        request_headers.emplace(name, value);
    }
    const auto target = endpoint.prefix + path;
    return handle(client.Post(target, request_headers, body.dump(), "application/json"), url + path);
}

nlohmann::json get_json(const std::string& url, const std::string& path, std::chrono::milliseconds timeout) {
    const auto endpoint = parse_url(url);
    auto client = make_client(endpoint, timeout);
    return handle(client.Get(endpoint.prefix + path), url + path);
}

}  // namespace ragforge::http
