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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragforge/bm25.hpp"
#include "ragforge/chunking.hpp"
#include "ragforge/corpus.hpp"
#include "ragforge/embed.hpp"
#include "ragforge/vector_store.hpp"

namespace ragforge {

struct TopicEntry {
    std::string topic_id;
    std::string title;

    friend bool operator==(const TopicEntry&, const TopicEntry&) = default;
};

/// Program names and section titles, used by the pre-retrieval filter and
/// for labelling context chunks in prompts.
struct ProgramEntry {
    std::string program_id;
    std::string name;
    Language language = Language::en;
    std::vector<TopicEntry> topics;

    const TopicEntry* find_topic(std::string_view topic_id) const;

    friend bool operator==(const ProgramEntry&, const ProgramEntry&) = default;
};

struct IndexOptions {
    ChunkLimits limits;
    Bm25Params bm25;
};

/// Where a chunk came from.
struct ChunkLocation {
    std::string program_id;
    std::string topic_id;

    friend bool operator==(const ChunkLocation&, const ChunkLocation&) = default;
};

/// Everything retrieval needs for one corpus: chunk tables with the
/// child -> parent linkage, one BM25 index and one vector store per
/// granularity, and the program catalog. Immutable once built or loaded.
///
/// On disk it is a directory holding meta.json, chunks.jsonl, postings.bin
/// and vectors.bin (see docs/index_format.md).
class IndexBundle {
public:
    static constexpr int kFormatVersion = 1;

    static IndexBundle build(const Corpus& corpus, const EmbeddingProvider& provider, IndexOptions options = {});

    void save(const std::filesystem::path& dir) const;
    /// Throws FormatError on a bad magic header, unknown version or inconsistent tables.
    static IndexBundle load(const std::filesystem::path& dir);

    /// Throws ConfigError unless the bundle was embedded with `provider_id`.
    void require_provider(std::string_view provider_id) const;

    const std::string& provider_id() const { return provider_id_; }
    const IndexOptions& options() const { return options_; }
    const std::vector<ProgramEntry>& programs() const { return programs_; }
    const std::vector<ParentChunk>& parents() const { return parents_; }
    const std::vector<ChildChunk>& children() const { return children_; }
    const Bm25Index& parent_bm25() const { return parent_bm25_; }
    const Bm25Index& child_bm25() const { return child_bm25_; }
    const VectorStore& parent_vectors() const { return parent_vectors_; }
    const VectorStore& child_vectors() const { return child_vectors_; }

    const ProgramEntry* find_program(std::string_view program_id) const;
    const ParentChunk* find_parent(std::string_view parent_id) const;
    const ChildChunk* find_child(std::string_view child_id) const;
    /// Program and topic of a parent or child chunk.
    std::optional<ChunkLocation> locate(std::string_view chunk_id) const;

private:
    void link();

    std::string provider_id_;
    IndexOptions options_;
    std::vector<ProgramEntry> programs_;
    std::vector<ParentChunk> parents_;
    std::vector<ChildChunk> children_;
    std::unordered_map<std::string, std::size_t> parent_rows_;
    std::unordered_map<std::string, std::size_t> child_rows_;
    Bm25Index parent_bm25_;
    Bm25Index child_bm25_;
    VectorStore parent_vectors_;
    VectorStore child_vectors_;
};

}  // namespace ragforge
