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

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragforge/corpus.hpp"
#include "ragforge/embed.hpp"
#include "ragforge/index_bundle.hpp"
#include "ragforge/llm.hpp"
#include "ragforge/ranked_list.hpp"

namespace ragforge {

enum class Feature { relevance, coherence, fluency, faithfulness };
enum class Rater { llm, human };

inline constexpr std::array<Feature, 4> kAllFeatures = {Feature::faithfulness, Feature::relevance, Feature::coherence,
                                                       Feature::fluency};

std::string_view to_string(Feature feature);
Feature parse_feature(std::string_view value);
std::string_view to_string(Rater rater);
Rater parse_rater(std::string_view value);

struct JudgeScore {
    std::string qa_id;
    Feature feature = Feature::faithfulness;
    int score = 1;  // 1..5
    Rater rater = Rater::llm;
    bool match = false;

    friend bool operator==(const JudgeScore&, const JudgeScore&) = default;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    friend bool operator==(const Prf&, const Prf&) = default;
};

// --- Retrieval -------------------------------------------------------------

using ChunkLocator = std::function<std::optional<ChunkLocation>(std::string_view chunk_id)>;

/// True when one of the first k entries sits in the gold program and topic.
bool is_hit(const RankedList& retrieved, std::string_view gold_program_id, std::string_view gold_topic_id,
            const ChunkLocator& locate, std::size_t k = 5);

struct HitItem {
    std::string qa_id;
    RankedList retrieved;
};

struct HitRateReport {
    std::size_t hits = 0;
    std::size_t total = 0;
    double rate = 0.0;  // percent
    std::vector<std::pair<std::string, bool>> per_item;
};

/// Items align with the QA set by qa_id (order-independent); a qa_id missing
/// on either side is an ArgumentError.
HitRateReport hit_rate(std::span<const HitItem> items, std::span<const QAItem> qa, const ChunkLocator& locate,
                       std::size_t k = 5);

// --- Reference-based -------------------------------------------------------

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Token-level ROUGE-L on the shared tokenizer. Empty inputs give (0,0,0).
Prf rouge_l(std::string_view candidate, std::string_view reference);

/// Greedy token matching: every token is embedded on its own, precision is
/// the mean over candidate tokens of the best cosine against reference
/// tokens, recall the mirror image. No idf weighting, no baseline rescaling.
/// Throws ArgumentError when either text has no tokens; provider errors propagate.
Prf bertscore_greedy(std::string_view candidate, std::string_view reference, const EmbeddingProvider& provider);

// --- LLM judge -------------------------------------------------------------

struct JudgeRequest {
    std::string qa_id;
    std::string question;
    std::string answer;
    std::string context;
    std::string reference;  // optional
    bool match = false;
};

/// First integer token of the completion, when it lies in 1..5.
std::optional<int> parse_judge_score(std::string_view completion);

std::vector<ChatMessage> judge_messages(const JudgeRequest& request, Feature feature);

/// Asks the judge for one feature; re-asks once when the reply has no
/// valid score. Throws ScoreParseError after the second failure.
JudgeScore judge_answer(const JudgeRequest& request, Feature feature, const ChatEndpoint& judge,
                        const CompletionOptions& options, const RetryPolicy& retry = {});

// --- Confusion matrix ------------------------------------------------------

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::optional<Feature> feature;
    int threshold = 5;

    std::size_t total() const { return tp + fn + fp + tn; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Acceptable means score >= threshold. Mixed features are an ArgumentError.
ConfusionMatrix confusion_matrix(std::span<const JudgeScore> scores, int threshold = 5);

// --- Aggregation -----------------------------------------------------------

struct ScoreRecord {
    std::string model;
    std::string language;
    std::string config;
    JudgeScore score;
};

enum class GroupKey { model, language, config, feature, match, rater };

struct MeanCell {
    std::size_t count = 0;
    long long sum = 0;
    double mean = 0.0;
    double rounded = 0.0;  // one decimal, half away from zero

    friend bool operator==(const MeanCell&, const MeanCell&) = default;
};

/// Mean of `sum / count` rounded to one decimal without going through a
/// binary fraction first, so 4.45 rounds to 4.5.
double round_mean_1dp(long long sum, std::size_t count);

/// Group labels are the keys' string values in `keys` order; match renders
/// as "Match" / "No Match".
std::map<std::vector<std::string>, MeanCell> aggregate_scores(std::span<const ScoreRecord> records,
                                                              std::span<const GroupKey> keys);

// --- Human ratings ---------------------------------------------------------

struct HumanRating {
    std::string qa_id;
    Feature feature = Feature::faithfulness;
    int score = 1;
    // Optional narrowing when one qa_id was answered by several experiments.
    std::string experiment;
    std::string model;
    std::string language;
};

/// JSONL of {"qa_id","feature","score","rater":"human"} (extra keys optional).
std::vector<HumanRating> load_human_ratings(const std::filesystem::path& path);

}  // namespace ragforge
