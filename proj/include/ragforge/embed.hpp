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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragforge {

using Embedding = std::vector<float>;

/// Source of text embeddings. Implementations must be deterministic: the
/// same text always maps to the same vector for one provider instance, and
/// embed() must be safe to call from several threads.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    /// Stable identifier recorded in persisted indices.
    virtual std::string id() const = 0;
    virtual std::size_t dim() const = 0;
    /// One vector per text, same order. Throws ArgumentError on empty texts.
    virtual std::vector<Embedding> embed(std::span<const std::string> texts) const = 0;

    Embedding embed_one(std::string_view text) const;
};

/// Offline provider: word tokens and character trigrams hashed into signed
/// buckets, then L2-normalized. Pure function of the input bytes.
class HashingEmbedder final : public EmbeddingProvider {
public:
    static constexpr std::size_t kDefaultDim = 256;

    explicit HashingEmbedder(std::size_t dim = kDefaultDim);

    std::string id() const override;
    std::size_t dim() const override { return dim_; }
    std::vector<Embedding> embed(std::span<const std::string> texts) const override;

    Embedding embed_text(std::string_view text) const;

private:
    std::size_t dim_;
};

struct SidecarOptions {
    std::string url;                  // e.g. http://127.0.0.1:8088
    std::string provider_id;          // defaults to "sidecar:<url>"
    std::size_t dim = 0;              // 0 = ask GET /healthz on first use
    std::size_t batch_size = 64;
    std::chrono::milliseconds timeout{30000};
};

/// Client for the embedding sidecar: POST /v1/embed {"texts":[...]} ->
/// {"dim":int,"vectors":[[...]]}.
class SidecarEmbedder final : public EmbeddingProvider {
public:
    explicit SidecarEmbedder(SidecarOptions options);

    std::string id() const override;
    std::size_t dim() const override;
    std::vector<Embedding> embed(std::span<const std::string> texts) const override;

private:
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const;

    SidecarOptions options_;
    mutable std::atomic<std::size_t> dim_;
};

/// 64-bit FNV-1a.
std::uint64_t stable_hash(std::string_view bytes);

/// dot(a,b) / (|a| |b|). Throws ArgumentError on dimension mismatch or a zero vector.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

double l2_norm(std::span<const float> v);

}  // namespace ragforge
