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

#include "ragforge/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ragforge/prompts.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

std::string_view to_string(PrefilterMode mode) {
    switch (mode) {
        case PrefilterMode::off:
            return "off";
        case PrefilterMode::list_constrained:
            return "list_constrained";
        case PrefilterMode::free_predict:
            return "free_predict";
    }
    return "off";
}

PrefilterMode parse_prefilter_mode(std::string_view value) {
    if (value == "off") {
        return PrefilterMode::off;
    }
    if (value == "list_constrained") {
        return PrefilterMode::list_constrained;
    }
    if (value == "free_predict") {
        return PrefilterMode::free_predict;
    }
    throw ConfigError("unknown prefilter mode '" + std::string(value) +
                      "' (expected off, list_constrained or free_predict)");
}

void RetrieverConfig::validate() const {
    if (!(w_bm25 >= 0.0) || !(w_dense >= 0.0)) {
        throw ConfigError("ensemble weights w_bm25 and w_dense must be non-negative");
    }
    if (std::abs(w_bm25 + w_dense - 1.0) > 1e-9) {
        throw ConfigError("ensemble weights w_bm25 and w_dense must sum to 1");
    }
    if (rrf_k <= 0) {
        throw ConfigError("rrf_k must be positive");
    }
    if (top_k == 0 || num_rephrasings == 0) {
        throw ConfigError("top_k and num_rephrasings must be positive");
    }
    if (fetch_k < top_k) {
        throw ConfigError("fetch_k must be at least top_k");
    }
}

RankedList rrf_fuse(std::span<const RankedList> lists, std::span<const double> weights, int k, std::size_t top_k) {
    if (k <= 0) {
        throw ArgumentError("rrf_fuse: k must be positive");
    }
    if (lists.empty() || lists.size() != weights.size()) {
        throw ArgumentError("rrf_fuse: need one weight per list and at least one list");
    }
    std::unordered_map<std::string, double> fused;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw ArgumentError("rrf_fuse: weights must be finite and non-negative");
        }
        if (weights[i] == 0.0) {
            continue;
        }
        for (std::size_t rank = 0; rank < lists[i].entries.size(); ++rank) {
            const auto& id = lists[i].entries[rank].chunk_id;
            const auto [it, inserted] = fused.try_emplace(id, 0.0);
            if (inserted) {
                order.push_back(id);
            }
            it->second += weights[i] / static_cast<double>(k + static_cast<long long>(rank) + 1);
        }
    }
    RankedList out;
    out.source = RankSource::fused;
    out.entries.reserve(order.size());
    for (auto& id : order) {
        const double score = fused[id];
        out.entries.push_back({std::move(id), score});
    }
    sort_and_truncate(out.entries, top_k);
    return out;
}

RankedList child_parent_retrieve(std::span<const float> query, const VectorStore& children,
                                 const ParentResolver& parent_of, std::size_t top_k, const ChunkFilter& parent_filter) {
    if (top_k == 0) {
        throw ArgumentError("child_parent_retrieve: top_k must be positive");
    }
    RankedList out;
    out.source = RankSource::child_parent;
    if (children.size() == 0) {
        return out;
    }
    const auto hits = children.search(query, children.size());
    std::unordered_map<std::string, double> best;
    for (const auto& hit : hits.entries) {
        const std::string* parent = parent_of(hit.chunk_id);
        if (!parent) {
            throw IntegrityError("child chunk '" + hit.chunk_id + "' has no parent");
        }
        if (parent_filter && !parent_filter(*parent)) {
            continue;
        }
        const auto [it, inserted] = best.try_emplace(*parent, hit.score);
        if (!inserted) {
            it->second = std::max(it->second, hit.score);
        }
    }
    out.entries.reserve(best.size());
    for (auto& [id, score] : best) {
        out.entries.push_back({id, score});
    }
    sort_and_truncate(out.entries, top_k);
    return out;
}

RankedList child_parent_retrieve(std::span<const float> query, const IndexBundle& index, std::size_t top_k,
                                 const ChunkFilter& parent_filter) {
    const ParentResolver parent_of = [&index](std::string_view child_id) -> const std::string* {
        const auto* child = index.find_child(child_id);
        if (!child || !index.find_parent(child->parent_id)) {
            return nullptr;
        }
        return &child->parent_id;
    };
    return child_parent_retrieve(query, index.child_vectors(), parent_of, top_k, parent_filter);
}

namespace {

RankedList dense_leg(const Embedding& query, const IndexBundle& index, const RetrieverConfig& cfg,
                     const ChunkFilter& filter, std::size_t k) {
    if (cfg.use_child_parent) {
        return child_parent_retrieve(query, index, k, filter);
    }
    return index.parent_vectors().search(query, k, filter);
}

}  // namespace

RankedList ensemble_retrieve(std::string_view query, const IndexBundle& index, const EmbeddingProvider& provider,
                             const RetrieverConfig& cfg, const ChunkFilter& filter) {
    index.require_provider(provider.id());
    const std::vector<RankedList> lists = {
        cfg.w_bm25 > 0.0 ? index.parent_bm25().search(query, cfg.fetch_k, filter) : RankedList{},
        cfg.w_dense > 0.0 ? dense_leg(provider.embed_one(query), index, cfg, filter, cfg.fetch_k) : RankedList{},
    };
    const double weights[] = {cfg.w_bm25, cfg.w_dense};
    return rrf_fuse(lists, weights, cfg.rrf_k, cfg.top_k);
}

// --- multi-query -----------------------------------------------------------

namespace {

std::string_view strip_list_marker(std::string_view line) {
    line = text::trim(line);
    if (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '\xE2')) {
        // "-", "*" or a UTF-8 bullet (U+2022 is E2 80 A2)
        if (line.front() == '\xE2') {
            if (line.substr(0, 3) != "\xE2\x80\xA2") {
                return line;
            }
            line.remove_prefix(3);
        } else {
            line.remove_prefix(1);
        }
        return text::trim(line);
    }
    std::size_t digits = 0;
    while (digits < line.size() && line[digits] >= '0' && line[digits] <= '9') {
        ++digits;
    }
    if (digits > 0 && digits + 1 < line.size() && (line[digits] == '.' || line[digits] == ')') &&
        (line[digits + 1] == ' ' || line[digits + 1] == '\t')) {
        line.remove_prefix(digits + 1);
    }
    return text::trim(line);
}

std::string_view strip_quotes(std::string_view line) {
    if (line.size() >= 2 && line.front() == '"' && line.back() == '"') {
        line = text::trim(line.substr(1, line.size() - 2));
    }
    return line;
}

std::string normalized(std::string_view line) {
    return text::to_lower(text::trim(line));
}

}  // namespace

std::vector<std::string> parse_rephrasings(std::string_view completion) {
    std::vector<std::string> out;
    while (!completion.empty()) {
        const auto end = completion.find('\n');
        const auto line = strip_quotes(strip_list_marker(completion.substr(0, end)));
        if (!line.empty()) {
            out.emplace_back(line);
        }
        if (end == std::string_view::npos) {
            break;
        }
        completion.remove_prefix(end + 1);
    }
    return out;
}

std::vector<std::string> multi_query_expand(std::string_view question, const ChatEndpoint& llm, std::size_t n,
                                            const CompletionOptions& options, const RetryPolicy& retry) {
    if (n == 0) {
        throw ArgumentError("multi_query_expand: n must be positive");
    }
    std::vector<std::string> queries{std::string(question)};
    std::unordered_set<std::string> seen{normalized(question)};
    std::vector<std::string> proposed;
    constexpr int kMaxReasks = 2;
    for (int attempt = 0; attempt <= kMaxReasks && queries.size() < n + 1; ++attempt) {
        std::string completion;
        try {
            const auto messages = prompts::multi_query_prompt(question, n + 1 - queries.size(), proposed);
            completion = complete(llm, messages, options, retry);
        } catch (const GenerationError& e) {
            spdlog::warn("multi-query expansion disabled for this question: {}", e.what());
            return {std::string(question)};
        } catch (const TransportError& e) {
            spdlog::warn("multi-query expansion disabled for this question: {}", e.what());
            return {std::string(question)};
        }
        for (auto& line : parse_rephrasings(completion)) {
            if (queries.size() == n + 1) {
                break;
            }
            if (seen.insert(normalized(line)).second) {
                proposed.push_back(line);
                queries.push_back(std::move(line));
            }
        }
    }
    while (queries.size() < n + 1) {
        queries.emplace_back(question);
    }
    return queries;
}

RankedList multi_query_retrieve(std::span<const std::string> queries, const BaseRetriever& base, std::size_t top_k,
                                int rrf_k) {
    if (queries.empty()) {
        throw ArgumentError("multi_query_retrieve: need at least one query");
    }
    std::vector<RankedList> lists;
    lists.reserve(queries.size());
    for (const auto& query : queries) {
        lists.push_back(base(query));
    }
    const std::vector<double> weights(lists.size(), 1.0 / static_cast<double>(lists.size()));
    auto fused = rrf_fuse(lists, weights, rrf_k, top_k);
    fused.source = RankSource::multi_query;
    return fused;
}

// --- prefilter -------------------------------------------------------------

NameMatcher::NameMatcher(std::vector<std::string> keys, std::span<const std::string> labels,
                         const EmbeddingProvider& provider)
    : keys_(std::move(keys)) {
    if (keys_.size() != labels.size()) {
        throw ArgumentError("NameMatcher: one label per key required");
    }
    embeddings_ = provider.embed(labels);
}

const std::string& NameMatcher::match(std::string_view text, const EmbeddingProvider& provider) const {
    return match(provider.embed_one(text));
}

const std::string& NameMatcher::match(std::span<const float> embedding) const {
    if (keys_.empty()) {
        throw ArgumentError("NameMatcher: nothing to match against");
    }
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t i = 0; i < embeddings_.size(); ++i) {
        const double score = cosine_similarity(embedding, embeddings_[i]);
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return keys_[best];
}

namespace {

std::string label_or_key(const std::string& label, const std::string& key) {
    return text::trim(label).empty() ? key : label;
}

}  // namespace

PrefilterCatalog::PrefilterCatalog(const IndexBundle& index, const EmbeddingProvider& provider)
    : index_(index), provider_(provider) {
    index.require_provider(provider.id());
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    for (const auto& program : index.programs()) {
        ids.push_back(program.program_id);
        program_names_.push_back(program.name);
        labels.push_back(label_or_key(program.name, program.program_id));
        std::vector<std::string> topic_ids;
        std::vector<std::string> titles;
        for (const auto& topic : program.topics) {
            topic_ids.push_back(topic.topic_id);
            titles.push_back(label_or_key(topic.title, topic.topic_id));
        }
        topics_.emplace_back(program.program_id, NameMatcher(std::move(topic_ids), titles, provider));
    }
    programs_ = NameMatcher(std::move(ids), labels, provider);
}

const NameMatcher& PrefilterCatalog::topics(std::string_view program_id) const {
    for (const auto& [id, matcher] : topics_) {
        if (id == program_id) {
            return matcher;
        }
    }
    throw ArgumentError("unknown program '" + std::string(program_id) + "'");
}

namespace {

// Runs one LLM step and matches the reply; nullopt when anything fails.
template <typename Match>
std::optional<std::string> predict(std::string_view what, std::span<const ChatMessage> messages,
                                   const ChatEndpoint& llm, const CompletionOptions& options,
                                   const RetryPolicy& retry, Match&& match) {
    try {
        const auto reply = complete(llm, messages, options, retry);
        if (text::trim(reply).empty()) {
            spdlog::warn("{} prediction returned nothing; prefilter disabled for this question", what);
            return std::nullopt;
        }
        return match(reply);
    } catch (const Error& e) {
        spdlog::warn("{} prediction failed; prefilter disabled for this question: {}", what, e.what());
        return std::nullopt;
    }
}

}  // namespace

std::optional<std::string> prefilter_program(std::string_view question, const PrefilterCatalog& catalog,
                                             const ChatEndpoint& llm, PrefilterMode mode,
                                             const CompletionOptions& options, const RetryPolicy& retry) {
    if (mode == PrefilterMode::off || catalog.programs().empty()) {
        return std::nullopt;
    }
    const auto prompt_mode = mode == PrefilterMode::free_predict ? prompts::ProgramPromptMode::free_predict
                                                                 : prompts::ProgramPromptMode::list_constrained;
    const auto messages = prompts::program_prompt(question, catalog.program_names(), prompt_mode);
    return predict("program", messages, llm, options, retry, [&](const std::string& reply) {
        return catalog.programs().match(text::trim(reply), catalog.provider());
    });
}

std::optional<std::string> prefilter_topic(std::string_view question, std::string_view program_id,
                                           const PrefilterCatalog& catalog, const ChatEndpoint& llm,
                                           const CompletionOptions& options, const RetryPolicy& retry) {
    const auto* program = catalog.index().find_program(program_id);
    if (!program) {
        throw ArgumentError("prefilter_topic: unknown program '" + std::string(program_id) + "'");
    }
    const auto& matcher = catalog.topics(program_id);
    std::vector<std::string> titles;
    for (const auto& topic : program->topics) {
        titles.push_back(topic.title);
    }
    const auto messages = prompts::topic_prompt(question, program->name, titles);
    return predict("topic", messages, llm, options, retry, [&](const std::string& reply) {
        return matcher.match(text::trim(reply), catalog.provider());
    });
}

// --- pipeline --------------------------------------------------------------

StageError::StageError(std::string stage, const std::string& message)
    : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::string base_label(const RetrieverConfig& cfg) {
    if (cfg.use_ensemble) {
        return cfg.use_child_parent ? "ensemble(bm25+child_parent)" : "ensemble(bm25+dense)";
    }
    return cfg.use_child_parent ? "child_parent" : "dense";
}

}  // namespace

PipelineResult retrieve_pipeline(std::string_view question, const RetrieverConfig& cfg, const PipelineContext& ctx) {
    cfg.validate();
    ctx.index.require_provider(ctx.provider.id());
    PipelineResult result;

    ChunkFilter filter;
    if (cfg.prefilter != PrefilterMode::off) {
        if (!ctx.catalog) {
            throw ConfigError("prefilter is on but no prefilter catalog was supplied");
        }
        in_stage("prefilter", [&] {
            result.program_id = prefilter_program(question, *ctx.catalog, ctx.llm, cfg.prefilter, ctx.completion,
                                                  ctx.retry);
            if (result.program_id) {
                result.topic_id =
                    prefilter_topic(question, *result.program_id, *ctx.catalog, ctx.llm, ctx.completion, ctx.retry);
            }
        });
        if (result.program_id) {
            const IndexBundle& index = ctx.index;
            filter = [&index, program = *result.program_id](std::string_view chunk_id) {
                const auto location = index.locate(chunk_id);
                return location && location->program_id == program;
            };
            result.trace.push_back("prefilter:program=" + *result.program_id +
                                   " topic=" + result.topic_id.value_or("?"));
        } else {
            result.trace.emplace_back("prefilter:disabled");
        }
    }

    if (cfg.use_multi_query) {
        result.queries = in_stage("multi_query", [&] {
            return multi_query_expand(question, ctx.llm, cfg.num_rephrasings, ctx.completion, ctx.retry);
        });
        result.trace.push_back("multi_query:" + std::to_string(result.queries.size()) + " queries");
    } else {
        result.queries = {std::string(question)};
    }

    // Inside multi-query every base list keeps fetch_k candidates for the fusion.
    const std::size_t base_k = cfg.use_multi_query ? cfg.fetch_k : cfg.top_k;
    RetrieverConfig base_cfg = cfg;
    base_cfg.top_k = base_k;
    const BaseRetriever base = [&](std::string_view query) {
        if (cfg.use_ensemble) {
            return ensemble_retrieve(query, ctx.index, ctx.provider, base_cfg, filter);
        }
        return dense_leg(ctx.provider.embed_one(query), ctx.index, cfg, filter, base_k);
    };

    const auto label = base_label(cfg);
    if (cfg.use_multi_query) {
        std::vector<RankedList> lists = in_stage("retrieve", [&] {
            std::vector<RankedList> per_query;
            per_query.reserve(result.queries.size());
            for (const auto& query : result.queries) {
                per_query.push_back(base(query));
            }
            return per_query;
        });
        result.trace.push_back("retrieve:" + label + " x" + std::to_string(lists.size()));
        result.ranked = in_stage("fuse", [&] {
            const std::vector<double> weights(lists.size(), 1.0 / static_cast<double>(lists.size()));
            auto fused = rrf_fuse(lists, weights, cfg.rrf_k, cfg.top_k);
            fused.source = RankSource::multi_query;
            return fused;
        });
        result.trace.emplace_back("fuse:rrf equal weights");
    } else {
        result.ranked = in_stage("retrieve", [&] { return base(question); });
        result.trace.push_back("retrieve:" + label);
        if (cfg.use_ensemble) {
            result.trace.emplace_back("fuse:rrf bm25/dense weights");
        }
    }
    sort_and_truncate(result.ranked.entries, cfg.top_k);
    result.trace.push_back("truncate:top_k=" + std::to_string(cfg.top_k));
    return result;
}

}  // namespace ragforge
