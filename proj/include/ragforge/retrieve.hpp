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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragforge/embed.hpp"
#include "ragforge/error.hpp"
#include "ragforge/index_bundle.hpp"
#include "ragforge/llm.hpp"
#include "ragforge/ranked_list.hpp"

namespace ragforge {

enum class PrefilterMode { off, list_constrained, free_predict };

std::string_view to_string(PrefilterMode mode);
PrefilterMode parse_prefilter_mode(std::string_view value);

struct RetrieverConfig {
    bool use_multi_query = false;
    bool use_child_parent = false;
    bool use_ensemble = false;
    double w_bm25 = 0.5;
    double w_dense = 0.5;
    int rrf_k = 60;
    std::size_t top_k = 5;
    std::size_t num_rephrasings = 3;
    std::size_t fetch_k = 20;  // candidates each base list contributes to a fusion
    PrefilterMode prefilter = PrefilterMode::off;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

inline constexpr std::size_t kNoTruncation = std::numeric_limits<std::size_t>::max();

/// Weighted reciprocal rank fusion: score(d) = sum_i w_i / (k + rank_i(d)),
/// ranks 1-based. Lists with weight 0 contribute nothing.
RankedList rrf_fuse(std::span<const RankedList> lists, std::span<const double> weights, int k = 60,
                    std::size_t top_k = kNoTruncation);

/// Maps a child chunk id to its parent id; nullptr when the child is unknown.
using ParentResolver = std::function<const std::string*(std::string_view child_id)>;

/// Dense search over child chunks, each hit replaced by its parent, each
/// parent scored by its best child. `parent_filter` sees parent ids.
RankedList child_parent_retrieve(std::span<const float> query, const VectorStore& children,
                                 const ParentResolver& parent_of, std::size_t top_k,
                                 const ChunkFilter& parent_filter = {});
RankedList child_parent_retrieve(std::span<const float> query, const IndexBundle& index, std::size_t top_k,
                                 const ChunkFilter& parent_filter = {});

/// Parent-level BM25 and dense lists fused with the configured weights. The
/// dense leg is child-parent retrieval when `cfg.use_child_parent` is set.
/// Throws ConfigError when the index was embedded by another provider.
RankedList ensemble_retrieve(std::string_view query, const IndexBundle& index, const EmbeddingProvider& provider,
                             const RetrieverConfig& cfg, const ChunkFilter& filter = {});

/// Original question first, then `n` rephrasings. Falls back to
/// [question] when the endpoint cannot be reached.
std::vector<std::string> multi_query_expand(std::string_view question, const ChatEndpoint& llm, std::size_t n,
                                            const CompletionOptions& options = {}, const RetryPolicy& retry = {});

/// Splits a completion into candidate questions: one per line, list markers
/// and surrounding quotes removed, blank lines dropped.
std::vector<std::string> parse_rephrasings(std::string_view completion);

using BaseRetriever = std::function<RankedList(std::string_view query)>;

/// Runs `base` once per query and fuses the lists with equal weights.
RankedList multi_query_retrieve(std::span<const std::string> queries, const BaseRetriever& base,
                                std::size_t top_k, int rrf_k = 60);

/// Argmax-cosine lookup of free text against a fixed set of labels.
class NameMatcher {
public:
    NameMatcher() = default;
    NameMatcher(std::vector<std::string> keys, std::span<const std::string> labels,
                const EmbeddingProvider& provider);

    /// Key of the label closest to `text`; the first label wins ties.
    const std::string& match(std::string_view text, const EmbeddingProvider& provider) const;
    const std::string& match(std::span<const float> embedding) const;

    std::size_t size() const { return keys_.size(); }
    bool empty() const { return keys_.empty(); }

private:
    std::vector<std::string> keys_;
    std::vector<Embedding> embeddings_;
};

/// Embedded program names and section titles of one index.
class PrefilterCatalog {
public:
    PrefilterCatalog(const IndexBundle& index, const EmbeddingProvider& provider);

    const NameMatcher& programs() const { return programs_; }
    const NameMatcher& topics(std::string_view program_id) const;
    const std::vector<std::string>& program_names() const { return program_names_; }
    const IndexBundle& index() const { return index_; }
    const EmbeddingProvider& provider() const { return provider_; }

private:
    const IndexBundle& index_;
    const EmbeddingProvider& provider_;
    std::vector<std::string> program_names_;
    NameMatcher programs_;
    std::vector<std::pair<std::string, NameMatcher>> topics_;
};

/// Asks the LLM for the study program and matches its output to a program.
/// Returns nullopt (prefilter disabled, logged) when the LLM fails.
std::optional<std::string> prefilter_program(std::string_view question, const PrefilterCatalog& catalog,
                                             const ChatEndpoint& llm, PrefilterMode mode,
                                             const CompletionOptions& options = {}, const RetryPolicy& retry = {});

/// Asks the LLM for the topic within `program_id` and matches it to a section.
std::optional<std::string> prefilter_topic(std::string_view question, std::string_view program_id,
                                           const PrefilterCatalog& catalog, const ChatEndpoint& llm,
                                           const CompletionOptions& options = {}, const RetryPolicy& retry = {});

/// Failure inside one pipeline stage; what() starts with the stage label.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct PipelineResult {
    RankedList ranked;
    std::optional<std::string> program_id;  // prefilter match, when the prefilter ran
    std::optional<std::string> topic_id;    // advisory, never used to filter
    std::vector<std::string> queries;
    std::vector<std::string> trace;  // one "stage:detail" line per executed stage
};

struct PipelineContext {
    const IndexBundle& index;
    const EmbeddingProvider& provider;
    const ChatEndpoint& llm;
    const PrefilterCatalog* catalog = nullptr;  // required when the prefilter is on
    CompletionOptions completion;
    RetryPolicy retry;
};

/// prefilter -> multi-query expansion -> base retriever (ensemble,
/// child-parent or dense) -> fusion -> top_k.
PipelineResult retrieve_pipeline(std::string_view question, const RetrieverConfig& cfg, const PipelineContext& ctx);

}  // namespace ragforge
