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

#include "ragforge/embed.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "http_util.hpp"
#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

Embedding EmbeddingProvider::embed_one(std::string_view text) const {
    const std::string owned(text);
    auto vectors = embed(std::span<const std::string>(&owned, 1));
    return std::move(vectors.front());
}

std::uint64_t stable_hash(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

double l2_norm(std::span<const float> v) {
    double sum = 0.0;
    for (const float x : v) {
        sum += static_cast<double>(x) * x;
    }
    return std::sqrt(sum);
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw ArgumentError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        norm_a += static_cast<double>(a[i]) * a[i];
        norm_b += static_cast<double>(b[i]) * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw ArgumentError("cosine_similarity: zero vector");
    }
    const double value = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    return std::clamp(value, -1.0, 1.0);
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        throw ArgumentError("HashingEmbedder: dim must be positive");
    }
}

std::string HashingEmbedder::id() const {
    return "fallback:hash-v1-" + std::to_string(dim_);
}

std::vector<Embedding> HashingEmbedder::embed(std::span<const std::string> texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(embed_text(text));
    }
    return out;
}

Embedding HashingEmbedder::embed_text(std::string_view input) const {
    std::vector<double> accum(dim_, 0.0);
    const auto add_feature = [&](std::string_view feature) {
        const auto hash = stable_hash(feature);
        const double sign = (hash & 1U) ? -1.0 : 1.0;
        accum[(hash >> 1) % dim_] += sign;
    };

    const auto tokens = text::tokenize(input);
    std::string feature;
    for (const auto& token : tokens) {
        add_feature("w:" + token);
        // Trigrams over the space-padded token so word boundaries are features too.
        std::vector<std::string_view> chars;
        const std::string padded = " " + token + " ";
        for (std::size_t i = 0; i < padded.size();) {
            const auto length = text::decode_utf8(padded, i).length;
            chars.push_back(std::string_view(padded).substr(i, length));
            i += length;
        }
        for (std::size_t i = 0; i + 3 <= chars.size(); ++i) {
            feature = "c:";
            feature.append(chars[i]).append(chars[i + 1]).append(chars[i + 2]);
            add_feature(feature);
        }
    }
    if (tokens.empty()) {
        const auto trimmed = text::trim(input);
        if (trimmed.empty()) {
            throw ArgumentError("embed: text must be non-empty");
        }
        add_feature("r:" + text::to_lower(trimmed));
    }

    double norm = 0.0;
    for (const double x : accum) {
        norm += x * x;
    }
    if (norm == 0.0) {
        // Every feature cancelled out; keep the vector non-zero.
        accum[(stable_hash(input) >> 1) % dim_] = 1.0;
        norm = 1.0;
    }
    norm = std::sqrt(norm);
    Embedding result(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        result[i] = static_cast<float>(accum[i] / norm);
    }
    return result;
}

SidecarEmbedder::SidecarEmbedder(SidecarOptions options) : options_(std::move(options)), dim_(options_.dim) {
    http::parse_url(options_.url);
    if (options_.batch_size == 0) {
        throw ConfigError("sidecar batch_size must be positive");
    }
}

std::string SidecarEmbedder::id() const {
    return options_.provider_id.empty() ? "sidecar:" + options_.url : options_.provider_id;
}

std::size_t SidecarEmbedder::dim() const {
    if (dim_.load() == 0) {
        const auto health = http::get_json(options_.url, "/healthz", options_.timeout);
        if (!health.is_object() || !health.contains("dim") || !health["dim"].is_number_unsigned() ||
            health["dim"].get<std::size_t>() == 0) {
            throw ProtocolError("sidecar /healthz did not report a positive dim");
        }
        dim_.store(health["dim"].get<std::size_t>());
    }
    return dim_.load();
}

std::vector<Embedding> SidecarEmbedder::embed(std::span<const std::string> texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
        const auto count = std::min(options_.batch_size, texts.size() - start);
        auto batch = embed_batch(texts.subspan(start, count));
        std::move(batch.begin(), batch.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<Embedding> SidecarEmbedder::embed_batch(std::span<const std::string> texts) const {
    for (const auto& text : texts) {
        if (text.empty()) {
            throw ArgumentError("embed: text must be non-empty");
        }
    }
    const auto expected_dim = dim();
    const nlohmann::json request = {{"texts", texts}};
    const auto reply = http::post_json(options_.url, "/v1/embed", request, {}, options_.timeout);

    if (!reply.is_object() || !reply.contains("dim") || !reply.contains("vectors") || !reply["vectors"].is_array()) {
        throw ProtocolError("sidecar reply lacks dim/vectors");
    }
    if (!reply["dim"].is_number_unsigned() || reply["dim"].get<std::size_t>() != expected_dim) {
        throw ProtocolError("sidecar dim " + reply["dim"].dump() + " != expected " + std::to_string(expected_dim));
    }
    const auto& vectors = reply["vectors"];
    if (vectors.size() != texts.size()) {
        throw ProtocolError("sidecar returned " + std::to_string(vectors.size()) + " vectors for " +
                            std::to_string(texts.size()) + " texts");
    }
    std::vector<Embedding> out;
    out.reserve(vectors.size());
    for (const auto& row : vectors) {
        if (!row.is_array() || row.size() != expected_dim) {
            throw ProtocolError("sidecar vector has wrong dimension");
        }
        Embedding vector;
        vector.reserve(expected_dim);
        for (const auto& value : row) {
            if (!value.is_number() || !std::isfinite(value.get<double>())) {
                throw ProtocolError("sidecar vector has a non-finite entry");
            }
            vector.push_back(value.get<float>());
        }
        out.push_back(std::move(vector));
    }
    return out;
}

}  // namespace ragforge
