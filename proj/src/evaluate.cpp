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

#include "ragforge/evaluate.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "ragforge/error.hpp"
#include "ragforge/prompts.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

std::string_view to_string(Feature feature) {
    switch (feature) {
        case Feature::relevance:
            return "relevance";
        case Feature::coherence:
            return "coherence";
        case Feature::fluency:
            return "fluency";
        case Feature::faithfulness:
            return "faithfulness";
    }
    return "unknown";
}

Feature parse_feature(std::string_view value) {
    for (const auto feature : kAllFeatures) {
        if (to_string(feature) == value) {
            return feature;
        }
    }
    throw ArgumentError("unknown feature '" + std::string(value) + "'");
}

std::string_view to_string(Rater rater) {
    return rater == Rater::llm ? "llm" : "human";
}

Rater parse_rater(std::string_view value) {
    if (value == "llm") {
        return Rater::llm;
    }
    if (value == "human") {
        return Rater::human;
    }
    throw ArgumentError("unknown rater '" + std::string(value) + "'");
}

bool is_hit(const RankedList& retrieved, std::string_view gold_program_id, std::string_view gold_topic_id,
            const ChunkLocator& locate, std::size_t k) {
    const auto limit = std::min(k, retrieved.entries.size());
    for (std::size_t i = 0; i < limit; ++i) {
        const auto location = locate(retrieved.entries[i].chunk_id);
        if (location && location->program_id == gold_program_id && location->topic_id == gold_topic_id) {
            return true;
        }
    }
    return false;
}

HitRateReport hit_rate(std::span<const HitItem> items, std::span<const QAItem> qa, const ChunkLocator& locate,
                       std::size_t k) {
    std::unordered_map<std::string_view, const HitItem*> by_id;
    for (const auto& item : items) {
        if (!by_id.emplace(item.qa_id, &item).second) {
            throw ArgumentError("hit_rate: qa_id '" + item.qa_id + "' appears twice");
        }
    }
    if (by_id.size() != qa.size()) {
        throw ArgumentError("hit_rate: " + std::to_string(items.size()) + " retrieval results for " +
                            std::to_string(qa.size()) + " QA items");
    }
    HitRateReport report;
    for (const auto& question : qa) {
        const auto it = by_id.find(question.qa_id);
        if (it == by_id.end()) {
            throw ArgumentError("hit_rate: no retrieval result for qa_id '" + question.qa_id + "'");
        }
        const bool hit =
            is_hit(it->second->retrieved, question.gold_program_id, question.gold_topic_id, locate, k);
        report.hits += hit ? 1 : 0;
        report.per_item.emplace_back(question.qa_id, hit);
    }
    report.total = qa.size();
    report.rate = report.total == 0 ? 0.0 : 100.0 * static_cast<double>(report.hits) / static_cast<double>(report.total);
    return report;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    // Two-row dynamic programme over the shorter sequence.
    if (a.size() < b.size()) {
        std::swap(a, b);
    }
    std::vector<std::size_t> previous(b.size() + 1, 0);
    std::vector<std::size_t> current(b.size() + 1, 0);
    for (const auto& token : a) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            current[j] = token == b[j - 1] ? previous[j - 1] + 1 : std::max(previous[j], current[j - 1]);
        }
        std::swap(previous, current);
    }
    return previous[b.size()];
}

Prf rouge_l(std::string_view candidate, std::string_view reference) {
    const auto cand = text::tokenize(candidate);
    const auto ref = text::tokenize(reference);
    if (cand.empty() || ref.empty()) {
        return {};
    }
    const auto lcs = static_cast<double>(lcs_length(cand, ref));
    Prf out;
    out.precision = lcs / static_cast<double>(cand.size());
    out.recall = lcs / static_cast<double>(ref.size());
    out.f1 = out.precision + out.recall > 0.0 ? 2.0 * out.precision * out.recall / (out.precision + out.recall) : 0.0;
    return out;
}

Prf bertscore_greedy(std::string_view candidate, std::string_view reference, const EmbeddingProvider& provider) {
    const auto cand = text::tokenize(candidate);
    const auto ref = text::tokenize(reference);
    if (cand.empty() || ref.empty()) {
        throw ArgumentError("bertscore_greedy: both texts need at least one token");
    }
    // Embed each distinct token once.
    std::vector<std::string> vocabulary;
    std::unordered_map<std::string, std::size_t> slot;
    for (const auto* tokens : {&cand, &ref}) {
        for (const auto& token : *tokens) {
            if (slot.emplace(token, vocabulary.size()).second) {
                vocabulary.push_back(token);
            }
        }
    }
    const auto vectors = provider.embed(vocabulary);
    if (vectors.size() != vocabulary.size()) {
        throw ProtocolError("bertscore_greedy: provider returned the wrong number of vectors");
    }
    std::vector<std::vector<double>> sim(cand.size(), std::vector<double>(ref.size()));
    for (std::size_t i = 0; i < cand.size(); ++i) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
            sim[i][j] = cosine_similarity(vectors[slot[cand[i]]], vectors[slot[ref[j]]]);
        }
    }
    double precision = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        precision += *std::max_element(sim[i].begin(), sim[i].end());
    }
    precision /= static_cast<double>(cand.size());
    double recall = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
        double best = sim[0][j];
        for (std::size_t i = 1; i < cand.size(); ++i) {
            best = std::max(best, sim[i][j]);
        }
        recall += best;
    }
    recall /= static_cast<double>(ref.size());
    const double f1 = precision + recall != 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return {precision, recall, f1};
}

std::optional<int> parse_judge_score(std::string_view completion) {
    std::size_t i = 0;
    while (i < completion.size() && !(completion[i] >= '0' && completion[i] <= '9')) {
        ++i;
    }
    if (i == completion.size()) {
        return std::nullopt;
    }
    long value = 0;
    while (i < completion.size() && completion[i] >= '0' && completion[i] <= '9') {
        value = value * 10 + (completion[i] - '0');
        if (value > 1000) {
            return std::nullopt;
        }
        ++i;
    }
    if (value < 1 || value > 5) {
        return std::nullopt;
    }
    return static_cast<int>(value);
}

namespace {

struct Rubric {
    std::string_view title;
    std::string_view criteria;
    std::string_view steps;
};

// Adapted from the G-Eval summarisation rubrics for question answering.
Rubric rubric(Feature feature) {
    switch (feature) {
        case Feature::relevance:
            return {"Relevance",
                    "how well the answer addresses the student's question. The answer should include the "
                    "information the question asks for and leave out unrelated details.",
                    "1. Read the question carefully and identify what information is requested.\n"
                    "2. Read the answer and check whether it provides that information.\n"
                    "3. Penalize answers that are off-topic or padded with irrelevant content.\n"
                    "4. Assign a relevance score from 1 to 5."};
        case Feature::coherence:
            return {"Coherence",
                    "the collective quality of all sentences. The answer should be well-structured and "
                    "well-organized, building from sentence to sentence into a coherent body of information.",
                    "1. Read the question and the answer.\n"
                    "2. Check whether the answer presents its information in a clear and logical order.\n"
                    "3. Assign a coherence score from 1 to 5."};
        case Feature::fluency:
            return {"Fluency",
                    "the quality of the answer in terms of grammar, spelling, punctuation, word choice, and "
                    "sentence structure.",
                    "1. Read the answer.\n"
                    "2. Note grammatical errors, awkward phrasing and formatting problems.\n"
                    "3. Assign a fluency score from 1 to 5."};
        case Feature::faithfulness:
            return {"Faithfulness",
                    "the factual alignment between the answer and the provided context. A faithful answer "
                    "only states facts supported by the context documents and contains no hallucinated content.",
                    "1. Read the context documents carefully.\n"
                    "2. Read the answer and list the factual claims it makes.\n"
                    "3. Check each claim against the context; unsupported or contradicting claims lower the "
                    "score.\n"
                    "4. Assign a faithfulness score from 1 to 5."};
    }
    throw ArgumentError("unknown feature");
}

}  // namespace

std::vector<ChatMessage> judge_messages(const JudgeRequest& request, Feature feature) {
    const auto r = rubric(feature);
    const std::string_view answer = request.answer.empty() ? std::string_view("(no answer)") : request.answer;
    const std::string_view context = request.context.empty() ? std::string_view("(no context)") : request.context;
    return prompts::judge_prompt(r.title, r.criteria, r.steps, request.question, context, answer, request.reference);
}

JudgeScore judge_answer(const JudgeRequest& request, Feature feature, const ChatEndpoint& judge,
                        const CompletionOptions& options, const RetryPolicy& retry) {
    auto messages = judge_messages(request, feature);
    std::string reply = complete(judge, messages, options, retry);
    auto score = parse_judge_score(reply);
    if (!score) {
        messages.push_back({Role::assistant, reply.empty() ? std::string("(empty)") : reply});
        messages.push_back({Role::user, "Please answer with a single integer score from 1 to 5."});
        reply = complete(judge, messages, options, retry);
        score = parse_judge_score(reply);
    }
    if (!score) {
        throw ScoreParseError("judge reply for " + std::string(to_string(feature)) + " of '" + request.qa_id +
                              "' has no 1-5 score: " + reply.substr(0, 80));
    }
    return {request.qa_id, feature, *score, Rater::llm, request.match};
}

ConfusionMatrix confusion_matrix(std::span<const JudgeScore> scores, int threshold) {
    if (threshold < 1 || threshold > 5) {
        throw ArgumentError("confusion_matrix: threshold must be in 1..5");
    }
    ConfusionMatrix matrix;
    matrix.threshold = threshold;
    for (const auto& score : scores) {
        if (matrix.feature && *matrix.feature != score.feature) {
            throw ArgumentError("confusion_matrix: scores mix features " + std::string(to_string(*matrix.feature)) +
                                " and " + std::string(to_string(score.feature)));
        }
        matrix.feature = score.feature;
        const bool acceptable = score.score >= threshold;
        if (score.match) {
            ++(acceptable ? matrix.tp : matrix.fn);
        } else {
            ++(acceptable ? matrix.fp : matrix.tn);
        }
    }
    return matrix;
}

double round_mean_1dp(long long sum, std::size_t count) {
    if (count == 0) {
        return 0.0;
    }
    const auto n = static_cast<long long>(count);
    const long long tenths = sum >= 0 ? (20 * sum + n) / (2 * n) : -((-20 * sum + n) / (2 * n));
    return static_cast<double>(tenths) / 10.0;
}

std::map<std::vector<std::string>, MeanCell> aggregate_scores(std::span<const ScoreRecord> records,
                                                              std::span<const GroupKey> keys) {
    std::map<std::vector<std::string>, MeanCell> cells;
    for (const auto& record : records) {
        std::vector<std::string> label;
        label.reserve(keys.size());
        for (const auto key : keys) {
            switch (key) {
                case GroupKey::model:
                    label.push_back(record.model);
                    break;
                case GroupKey::language:
                    label.push_back(record.language);
                    break;
                case GroupKey::config:
                    label.push_back(record.config);
                    break;
                case GroupKey::feature:
                    label.emplace_back(to_string(record.score.feature));
                    break;
                case GroupKey::match:
                    label.emplace_back(record.score.match ? "Match" : "No Match");
                    break;
                case GroupKey::rater:
                    label.emplace_back(to_string(record.score.rater));
                    break;
            }
        }
        auto& cell = cells[label];
        ++cell.count;
        cell.sum += record.score.score;
    }
    for (auto& [label, cell] : cells) {
        cell.mean = static_cast<double>(cell.sum) / static_cast<double>(cell.count);
        cell.rounded = round_mean_1dp(cell.sum, cell.count);
    }
    return cells;
}

std::vector<HumanRating> load_human_ratings(const std::filesystem::path& path) {
    std::istringstream lines(read_file(path));
    std::vector<HumanRating> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(where + ": invalid JSON: " + e.what());
        }
        try {
            HumanRating rating;
            rating.qa_id = row.at("qa_id").get<std::string>();
            rating.feature = parse_feature(row.at("feature").get<std::string>());
            rating.score = row.at("score").get<int>();
            if (row.value("rater", "human") != "human") {
                throw SchemaError(where + ": rater must be \"human\"");
            }
            if (rating.score < 1 || rating.score > 5) {
                throw SchemaError(where + ": score must be in 1..5");
            }
            rating.experiment = row.value("experiment", "");
            rating.model = row.value("model", "");
            rating.language = row.value("language", "");
            out.push_back(std::move(rating));
        } catch (const json::exception& e) {
            throw SchemaError(where + ": " + e.what());
        } catch (const ArgumentError& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
    return out;
}

}  // namespace ragforge
