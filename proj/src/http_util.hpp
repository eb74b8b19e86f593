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

#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ragforge::http {

/// "http://host:port/prefix" split into the origin and the path prefix.
struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // "" or "/something", never trailing slash
};

Endpoint parse_url(const std::string& url);

using Headers = std::vector<std::pair<std::string, std::string>>;

/// POST a JSON body and parse a JSON reply.
/// Connection failures, 429 and 5xx raise TransportError; other non-2xx
/// statuses and unparsable bodies raise ProtocolError.
nlohmann::json post_json(const std::string& url, const std::string& path, const nlohmann::json& body,
                         const Headers& headers, std::chrono::milliseconds timeout);

nlohmann::json get_json(const std::string& url, const std::string& path, std::chrono::milliseconds timeout);

}  // namespace ragforge::http
