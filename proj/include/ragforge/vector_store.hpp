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

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragforge/embed.hpp"
#include "ragforge/ranked_list.hpp"

namespace ragforge {

/// Exhaustive cosine search over chunk embeddings. Vectors live in one
/// row-major buffer in insertion order.
class VectorStore {
public:
    VectorStore() = default;
    VectorStore(std::string provider_id, std::size_t dim);

    void add(std::string chunk_id, std::span<const float> vector);

    RankedList search(std::span<const float> query, std::size_t top_k, const ChunkFilter& filter = {}) const;

    const std::string& provider_id() const { return provider_id_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& chunk_ids() const { return ids_; }
    std::span<const float> vector(std::size_t row) const;
    std::span<const float> vector(std::string_view chunk_id) const;
    const std::vector<float>& data() const { return data_; }

private:
    std::string provider_id_;
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> rows_;
    std::vector<float> data_;
};

}  // namespace ragforge
