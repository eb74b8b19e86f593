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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragforge/ranked_list.hpp"

namespace ragforge {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over an in-memory inverted index.
///
///   score(q, d) = sum_{t in q} idf(t) * tf / (tf + k1 * (1 - b + b * |d| / avgdl))
///   idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
///
/// Query terms are summed with multiplicity. Built by a single writer,
/// then read-only.
class Bm25Index {
public:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;

        friend bool operator==(const Posting&, const Posting&) = default;
    };

    explicit Bm25Index(Bm25Params params = {});

    /// Tokenizes and indexes one chunk. Throws ArgumentError on a duplicate id.
    void add(std::string chunk_id, std::string_view text);
    /// Indexes pre-tokenized terms.
    void add_terms(std::string chunk_id, std::span<const std::string> terms);

    double score(std::span<const std::string> query_terms, std::string_view chunk_id) const;
    double idf(std::string_view term) const;

    RankedList search(std::string_view query_text, std::size_t top_k, const ChunkFilter& filter = {}) const;
    RankedList search_terms(std::span<const std::string> query_terms, std::size_t top_k,
                            const ChunkFilter& filter = {}) const;

    const Bm25Params& params() const { return params_; }
    std::size_t size() const { return ids_.size(); }
    double avg_doc_length() const;
    std::uint32_t doc_length(std::string_view chunk_id) const;
    std::size_t document_frequency(std::string_view term) const;
    const std::vector<std::string>& chunk_ids() const { return ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const { return lengths_; }
    const std::unordered_map<std::string, std::vector<Posting>>& postings() const { return postings_; }

    /// Rebuilds an index from persisted tables; validates consistency.
    static Bm25Index from_tables(Bm25Params params, std::vector<std::string> ids, std::vector<std::uint32_t> lengths,
                                 std::unordered_map<std::string, std::vector<Posting>> postings);

private:
    std::uint32_t ordinal(std::string_view chunk_id) const;
    double term_weight(double idf, std::uint32_t tf, std::uint32_t length, double avgdl) const;

    Bm25Params params_;
    std::vector<std::string> ids_;
    std::vector<std::uint32_t> lengths_;
    std::unordered_map<std::string, std::uint32_t> ordinals_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::uint64_t total_length_ = 0;
};

}  // namespace ragforge
