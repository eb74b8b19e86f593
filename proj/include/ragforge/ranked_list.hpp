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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ragforge {

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;

    friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

enum class RankSource { bm25, dense, fused, multi_query, child_parent };

std::string_view to_string(RankSource source);

/// Ordered retrieval output. Scores are non-increasing, ties ordered by
/// ascending chunk_id, chunk_ids unique.
struct RankedList {
    std::vector<ScoredChunk> entries;
    RankSource source = RankSource::dense;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    std::vector<std::string> ids() const;
    bool contains(std::string_view chunk_id) const;

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Sorts by descending score, then ascending chunk_id, and keeps at most top_k.
void sort_and_truncate(std::vector<ScoredChunk>& entries, std::size_t top_k);

/// Optional predicate restricting which chunks a search may return.
using ChunkFilter = std::function<bool(std::string_view chunk_id)>;

}  // namespace ragforge
