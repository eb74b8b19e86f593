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

#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "ragforge/error.hpp"
#include "ragforge/evaluate.hpp"

using namespace ragforge;

namespace {

std::optional<ChunkLocation> locate(std::string_view id) {
    // "<program>/<topic>/p<n>"
    const auto first = id.find('/');
    const auto second = id.find('/', first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos) {
        return std::nullopt;
    }
    return ChunkLocation{std::string(id.substr(0, first)), std::string(id.substr(first + 1, second - first - 1))};
}

RankedList ranked(std::vector<std::string> ids) {
    RankedList list;
    double score = 1.0;
    for (auto& id : ids) {
        list.entries.push_back({std::move(id), score});
        score -= 0.1;
    }
    return list;
}

// Replies from a fixed script, one per call.
class ScriptedJudge final : public ChatEndpoint {
public:
    explicit ScriptedJudge(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string complete(std::span<const ChatMessage> messages, const CompletionOptions&) const override {
        last_.assign(messages.begin(), messages.end());
        return replies_.at(calls_++);
    }
    std::string kind() const override { return "scripted"; }
    mutable std::size_t calls_ = 0;
    mutable std::vector<ChatMessage> last_;

private:
    std::vector<std::string> replies_;
};

}  // namespace

TEST_CASE("is_hit looks at the first k entries only") {
    const auto list = ranked({"a/costs/p0", "a/admission/p0", "b/costs/p0", "c/costs/p0", "d/costs/p0", "e/x/p0"});
    CHECK(is_hit(list, "a", "admission", locate));
    CHECK(is_hit(list, "d", "costs", locate));
    CHECK_FALSE(is_hit(list, "e", "x", locate));
    CHECK(is_hit(list, "e", "x", locate, 6));
    CHECK_FALSE(is_hit(list, "a", "language", locate));
    CHECK_FALSE(is_hit(ranked({}), "a", "costs", locate));
}

TEST_CASE("hit_rate aligns by qa_id and reports percent") {
    std::vector<QAItem> qa{{"q1", "", "", "a", "costs", Language::en}, {"q2", "", "", "b", "costs", Language::en},
                           {"q3", "", "", "c", "costs", Language::en}, {"q4", "", "", "d", "costs", Language::en}};
    std::vector<HitItem> items{{"q4", ranked({"d/costs/p1"})},
                               {"q2", ranked({"x/costs/p0"})},
                               {"q1", ranked({"a/costs/p0"})},
                               {"q3", ranked({"c/other/p0"})}};
    const auto report = hit_rate(items, qa, locate);
    CHECK(report.hits == 2);
    CHECK(report.total == 4);
    CHECK(report.rate == 50.0);
    REQUIRE(report.per_item.size() == 4);

    items.pop_back();
    CHECK_THROWS_AS(hit_rate(items, qa, locate), ArgumentError);
}

TEST_CASE("ROUGE-L on the reference pair and edge cases") {
    const auto prf = rouge_l("the cat sat", "the cat");
    CHECK(prf.precision == doctest::Approx(2.0 / 3.0));
    CHECK(prf.recall == 1.0);
    CHECK(prf.f1 == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rouge_l("", "the cat") == Prf{});
    CHECK(rouge_l("the cat", "") == Prf{});
    CHECK(rouge_l("dog", "cat") == Prf{});
    CHECK(rouge_l("The Cat!", "the cat").f1 == 1.0);
}

TEST_CASE("LCS agrees with the textbook table on random sequences") {
    std::mt19937_64 rng(31);
    const std::vector<std::string> vocab{"a", "b", "c", "d"};
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> x(std::uniform_int_distribution<int>(0, 12)(rng));
        std::vector<std::string> y(std::uniform_int_distribution<int>(0, 12)(rng));
        for (auto& t : x) {
            t = vocab[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
        }
        for (auto& t : y) {
            t = vocab[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
        }
        CHECK(lcs_length(x, y) == oracle::lcs(x, y));
    }
}

TEST_CASE("greedy BERTScore with the fallback embedder") {
    // Reference values from tests/oracles/oracle_values.py.
    const HashingEmbedder embedder;
    const auto prf = bertscore_greedy("the students pay fees", "students pay no tuition fees", embedder);
    CHECK(prf.precision == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(prf.recall == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(prf.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(bertscore_greedy("same words", "same words", embedder).f1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(bertscore_greedy("?!", "words", embedder), ArgumentError);
}

TEST_CASE("judge score parsing") {
    CHECK(parse_judge_score("Score: 4") == 4);
    CHECK(parse_judge_score("- Faithfulness: 5") == 5);
    CHECK(parse_judge_score("5/5") == 5);
    CHECK(parse_judge_score("I would say 3.") == 3);
    CHECK_FALSE(parse_judge_score("Score: 0").has_value());
    CHECK_FALSE(parse_judge_score("Score: 10").has_value());
    CHECK_FALSE(parse_judge_score("excellent").has_value());
    CHECK_FALSE(parse_judge_score("").has_value());
}

TEST_CASE("judge_answer re-asks once, then gives up") {
    const JudgeRequest request{"q1", "Fees?", "0 EUR.", "Fees are 0 EUR.", "", true};
    const ScriptedJudge good({"Score: 4"});
    const auto score = judge_answer(request, Feature::relevance, good, {});
    CHECK(score == JudgeScore{"q1", Feature::relevance, 4, Rater::llm, true});

    const ScriptedJudge second({"great answer", "2"});
    CHECK(judge_answer(request, Feature::fluency, second, {}).score == 2);
    CHECK(second.calls_ == 2);
    REQUIRE(second.last_.size() >= 2);
    CHECK(second.last_[second.last_.size() - 2].role == Role::assistant);
    CHECK(second.last_[second.last_.size() - 2].content == "great answer");

    const ScriptedJudge bad({"no idea", "still none"});
    CHECK_THROWS_AS(judge_answer(request, Feature::coherence, bad, {}), ScoreParseError);
}

TEST_CASE("judge messages carry the feature and the inputs") {
    const JudgeRequest request{"q1", "Fees?", "0 EUR.", "CTX", "REF", false};
    for (const auto feature : kAllFeatures) {
        const auto messages = judge_messages(request, feature);
        REQUIRE(messages.size() == 2);
        std::string title(to_string(feature));
        title[0] = static_cast<char>(title[0] - 'a' + 'A');
        CHECK(messages[0].content.find(title + " (1-5)") != std::string::npos);
        CHECK(messages[1].content.find("Fees?") != std::string::npos);
        CHECK(messages[1].content.find("CTX") != std::string::npos);
        CHECK(messages[1].content.find("REF") != std::string::npos);
        CHECK(messages[1].content.find("0 EUR.") != std::string::npos);
    }
}

TEST_CASE("confusion matrix counts score >= threshold as acceptable") {
    // 10 matched items all scoring 5, 10 unmatched with five 5s and five lower scores.
    std::vector<JudgeScore> scores;
    for (int i = 0; i < 10; ++i) {
        scores.push_back({"m" + std::to_string(i), Feature::faithfulness, 5, Rater::llm, true});
        scores.push_back({"n" + std::to_string(i), Feature::faithfulness, i < 5 ? 5 : 1 + i % 4, Rater::llm, false});
    }
    const auto cm = confusion_matrix(scores, 5);
    CHECK(cm.tp == 10);
    CHECK(cm.fn == 0);
    CHECK(cm.fp == 5);
    CHECK(cm.tn == 5);
    CHECK(cm.total() == 20);
    CHECK(cm.feature == Feature::faithfulness);

    const auto lenient = confusion_matrix(scores, 1);
    CHECK(lenient.tp == 10);
    CHECK(lenient.fp == 10);

    scores.push_back({"x", Feature::fluency, 3, Rater::llm, true});
    CHECK_THROWS_AS(confusion_matrix(scores, 5), ArgumentError);
    CHECK_THROWS_AS(confusion_matrix({}, 6), ArgumentError);
    CHECK(confusion_matrix({}, 5).total() == 0);
}

TEST_CASE("one-decimal rounding is exact") {
    CHECK(round_mean_1dp(89, 20) == 4.5);  // 4.45
    CHECK(round_mean_1dp(87, 20) == 4.4);  // 4.35
    CHECK(round_mean_1dp(90, 20) == 4.5);
    CHECK(round_mean_1dp(10, 3) == 3.3);
    CHECK(round_mean_1dp(11, 3) == 3.7);
    CHECK(round_mean_1dp(5, 1) == 5.0);
}

TEST_CASE("aggregation groups by the requested keys") {
    std::vector<ScoreRecord> records;
    const auto add = [&](std::string model, std::string lang, std::string config, int score, bool match) {
        records.push_back({model, lang, config, {"q", Feature::faithfulness, score, Rater::llm, match}});
    };
    add("gpt", "en", "er", 5, true);
    add("gpt", "en", "er", 4, true);
    add("gpt", "en", "er", 2, false);
    add("gpt", "de", "er", 3, true);
    add("mistral", "en", "mq-er", 1, false);
    const GroupKey keys[] = {GroupKey::model, GroupKey::language, GroupKey::match};
    const auto cells = aggregate_scores(records, keys);
    CHECK(cells.size() == 4);
    const auto& matched = cells.at({"gpt", "en", "Match"});
    CHECK(matched.count == 2);
    CHECK(matched.sum == 9);
    CHECK(matched.mean == 4.5);
    CHECK(matched.rounded == 4.5);
    CHECK(cells.at({"gpt", "en", "No Match"}).rounded == 2.0);
    CHECK(cells.at({"mistral", "en", "No Match"}).count == 1);

    const GroupKey by_feature[] = {GroupKey::feature, GroupKey::rater};
    CHECK(aggregate_scores(records, by_feature).at({"faithfulness", "llm"}).count == 5);
}

TEST_CASE("feature and rater names") {
    for (const auto feature : kAllFeatures) {
        CHECK(parse_feature(to_string(feature)) == feature);
    }
    CHECK(parse_rater("human") == Rater::human);
    CHECK_THROWS_AS(parse_feature("style"), ArgumentError);
}

TEST_CASE("human ratings JSONL") {
    const auto path = std::filesystem::temp_directory_path() / "ragforge-test-human.jsonl";
    write_file(path,
               "{\"qa_id\":\"q1\",\"feature\":\"faithfulness\",\"score\":4,\"rater\":\"human\"}\n\n"
               "{\"qa_id\":\"q2\",\"feature\":\"fluency\",\"score\":2,\"experiment\":\"mq-er\"}\n");
    const auto ratings = load_human_ratings(path);
    REQUIRE(ratings.size() == 2);
    CHECK(ratings[0].score == 4);
    CHECK(ratings[1].feature == Feature::fluency);
    CHECK(ratings[1].experiment == "mq-er");

    write_file(path, "{\"qa_id\":\"q1\",\"feature\":\"faithfulness\",\"score\":7}\n");
    CHECK_THROWS_AS(load_human_ratings(path), SchemaError);
    write_file(path, "{\"qa_id\":\"q1\",\"feature\":\"faithfulness\",\"score\":3,\"rater\":\"llm\"}\n");
    CHECK_THROWS_AS(load_human_ratings(path), SchemaError);
    write_file(path, "not json\n");
    CHECK_THROWS_AS(load_human_ratings(path), SchemaError);
    std::filesystem::remove(path);
}
