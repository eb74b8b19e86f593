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

#include "ragforge/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

std::string_view to_string(RankSource source) {
    switch (source) {
        case RankSource::bm25:
            return "bm25";
        case RankSource::dense:
            return "dense";
        case RankSource::fused:
            return "fused";
        case RankSource::multi_query:
            return "multi-query";
        case RankSource::child_parent:
            return "child-parent";
    }
    return "unknown";
}

std::vector<std::string> RankedList::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& entry : entries) {
        out.push_back(entry.chunk_id);
    }
    return out;
}

bool RankedList::contains(std::string_view chunk_id) const {
    return std::ranges::any_of(entries, [&](const ScoredChunk& e) { return e.chunk_id == chunk_id; });
}

void sort_and_truncate(std::vector<ScoredChunk>& entries, std::size_t top_k) {
    const auto better = [](const ScoredChunk& a, const ScoredChunk& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.chunk_id < b.chunk_id;
    };
    if (entries.size() > top_k) {
        std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(top_k), entries.end(),
                          better);
        entries.resize(top_k);
    } else {
        std::sort(entries.begin(), entries.end(), better);
    }
}

Bm25Index::Bm25Index(Bm25Params params) : params_(params) {
    if (!(params_.k1 >= 0.0) || !(params_.b >= 0.0 && params_.b <= 1.0)) {
        throw ArgumentError("BM25 parameters require k1 >= 0 and 0 <= b <= 1");
    }
}

void Bm25Index::add(std::string chunk_id, std::string_view text) {
    const auto terms = text::tokenize(text);
    add_terms(std::move(chunk_id), terms);
}

void Bm25Index::add_terms(std::string chunk_id, std::span<const std::string> terms) {
    if (ordinals_.contains(chunk_id)) {
        throw ArgumentError("BM25: chunk '" + chunk_id + "' indexed twice");
    }
    if (ids_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw ArgumentError("BM25: too many chunks");
    }
    const auto doc = static_cast<std::uint32_t>(ids_.size());
    std::map<std::string_view, std::uint32_t> counts;
    for (const auto& term : terms) {
        ++counts[term];
    }
    for (const auto& [term, tf] : counts) {
        postings_[std::string(term)].push_back({doc, tf});
    }
    ordinals_.emplace(chunk_id, doc);
    ids_.push_back(std::move(chunk_id));
    lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    total_length_ += terms.size();
}

double Bm25Index::avg_doc_length() const {
    return ids_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(ids_.size());
}

std::uint32_t Bm25Index::ordinal(std::string_view chunk_id) const {
    const auto it = ordinals_.find(std::string(chunk_id));
    if (it == ordinals_.end()) {
        throw ArgumentError("BM25: unknown chunk '" + std::string(chunk_id) + "'");
    }
    return it->second;
}

std::uint32_t Bm25Index::doc_length(std::string_view chunk_id) const {
    return lengths_[ordinal(chunk_id)];
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::idf(std::string_view term) const {
    const auto n = static_cast<double>(ids_.size());
    const auto df = static_cast<double>(document_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint32_t length, double avgdl) const {
    const double ratio = avgdl > 0.0 ? static_cast<double>(length) / avgdl : 1.0;
    const double tf_d = static_cast<double>(tf);
    return idf * tf_d / (tf_d + params_.k1 * (1.0 - params_.b + params_.b * ratio));
}

double Bm25Index::score(std::span<const std::string> query_terms, std::string_view chunk_id) const {
    const auto doc = ordinal(chunk_id);
    const double avgdl = avg_doc_length();
    double total = 0.0;
    for (const auto& term : query_terms) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const auto& list = it->second;
        const auto hit = std::ranges::lower_bound(list, doc, {}, &Posting::doc);
        if (hit == list.end() || hit->doc != doc) {
            continue;
        }
        total += term_weight(idf(term), hit->tf, lengths_[doc], avgdl);
    }
    return total;
}

RankedList Bm25Index::search(std::string_view query_text, std::size_t top_k, const ChunkFilter& filter) const {
    const auto terms = text::tokenize(query_text);
    return search_terms(terms, top_k, filter);
}

RankedList Bm25Index::search_terms(std::span<const std::string> query_terms, std::size_t top_k,
                                   const ChunkFilter& filter) const {
    if (top_k == 0) {
        throw ArgumentError("bm25_search: top_k must be >= 1");
    }
    RankedList result;
    result.source = RankSource::bm25;
    if (ids_.empty()) {
        return result;
    }
    // Term-at-a-time accumulation; a repeated query term is added once per occurrence.
    std::map<std::string_view, std::uint32_t> multiplicity;
    for (const auto& term : query_terms) {
        ++multiplicity[term];
    }
    const double avgdl = avg_doc_length();
    std::unordered_map<std::uint32_t, double> accum;
    for (const auto& [term, count] : multiplicity) {
        const auto it = postings_.find(std::string(term));
        if (it == postings_.end()) {
            continue;
        }
        const double term_idf = idf(term);
        for (const auto& posting : it->second) {
            accum[posting.doc] += count * term_weight(term_idf, posting.tf, lengths_[posting.doc], avgdl);
        }
    }
    result.entries.reserve(accum.size());
    for (const auto& [doc, value] : accum) {
        if (filter && !filter(ids_[doc])) {
            continue;
        }
        result.entries.push_back({ids_[doc], value});
    }
    sort_and_truncate(result.entries, top_k);
    return result;
}

Bm25Index Bm25Index::from_tables(Bm25Params params, std::vector<std::string> ids, std::vector<std::uint32_t> lengths,
                                 std::unordered_map<std::string, std::vector<Posting>> postings) {
    if (ids.size() != lengths.size()) {
        throw FormatError("BM25 tables: id/length count mismatch");
    }
    Bm25Index index(params);
    for (std::uint32_t i = 0; i < ids.size(); ++i) {
        if (!index.ordinals_.emplace(ids[i], i).second) {
            throw FormatError("BM25 tables: duplicate chunk id '" + ids[i] + "'");
        }
        index.total_length_ += lengths[i];
    }
    for (auto& [term, list] : postings) {
        std::uint32_t previous = 0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].doc >= ids.size() || list[i].tf == 0 || (i > 0 && list[i].doc <= previous)) {
                throw FormatError("BM25 tables: corrupt posting list for term '" + term + "'");
            }
            previous = list[i].doc;
        }
    }
    index.ids_ = std::move(ids);
    index.lengths_ = std::move(lengths);
    index.postings_ = std::move(postings);
    return index;
}

}  // namespace ragforge
