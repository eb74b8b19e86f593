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

#include "ragforge/vector_store.hpp"

#include <cmath>

#include "ragforge/error.hpp"

namespace ragforge {

VectorStore::VectorStore(std::string provider_id, std::size_t dim) : provider_id_(std::move(provider_id)), dim_(dim) {
    if (dim_ == 0) {
        throw ArgumentError("VectorStore: dim must be positive");
    }
}

void VectorStore::add(std::string chunk_id, std::span<const float> vector) {
    if (vector.size() != dim_) {
        throw ArgumentError("VectorStore: vector for '" + chunk_id + "' has dim " + std::to_string(vector.size()) +
                            ", store expects " + std::to_string(dim_));
    }
    for (const float x : vector) {
        if (!std::isfinite(x)) {
            throw ArgumentError("VectorStore: vector for '" + chunk_id + "' has a non-finite entry");
        }
    }
    if (!rows_.emplace(chunk_id, ids_.size()).second) {
        throw ArgumentError("VectorStore: chunk '" + chunk_id + "' added twice");
    }
    ids_.push_back(std::move(chunk_id));
    data_.insert(data_.end(), vector.begin(), vector.end());
}

std::span<const float> VectorStore::vector(std::size_t row) const {
    return std::span<const float>(data_).subspan(row * dim_, dim_);
}

std::span<const float> VectorStore::vector(std::string_view chunk_id) const {
    const auto it = rows_.find(std::string(chunk_id));
    if (it == rows_.end()) {
        throw ArgumentError("VectorStore: unknown chunk '" + std::string(chunk_id) + "'");
    }
    return vector(it->second);
}

RankedList VectorStore::search(std::span<const float> query, std::size_t top_k, const ChunkFilter& filter) const {
    if (top_k == 0) {
        throw ArgumentError("vector_search: top_k must be >= 1");
    }
    RankedList result;
    result.source = RankSource::dense;
    if (ids_.empty()) {
        return result;
    }
    result.entries.reserve(ids_.size());
    for (std::size_t row = 0; row < ids_.size(); ++row) {
        if (filter && !filter(ids_[row])) {
            continue;
        }
        result.entries.push_back({ids_[row], cosine_similarity(query, vector(row))});
    }
    sort_and_truncate(result.entries, top_k);
    return result;
}

}  // namespace ragforge
