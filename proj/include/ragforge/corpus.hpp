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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ragforge {

enum class Language { en, de };

std::string_view to_string(Language language);
/// Parses "en" / "de"; throws ArgumentError otherwise.
Language parse_language(std::string_view value);

struct TopicSection {
    std::string topic_id;
    std::string title;
    std::string body;

    friend bool operator==(const TopicSection&, const TopicSection&) = default;
};

struct StudyProgramDoc {
    std::string program_id;
    std::string name;
    Language language = Language::en;
    std::vector<TopicSection> sections;

    const TopicSection* find_section(std::string_view topic_id) const;

    friend bool operator==(const StudyProgramDoc&, const StudyProgramDoc&) = default;
};

/// Immutable, validated set of study programs ordered by program_id.
class Corpus {
public:
    Corpus() = default;
    /// Validates every invariant and sorts by program_id. Throws ValidationError.
    explicit Corpus(std::vector<StudyProgramDoc> programs);

    const std::vector<StudyProgramDoc>& programs() const { return programs_; }
    std::size_t size() const { return programs_.size(); }
    bool empty() const { return programs_.empty(); }

    const StudyProgramDoc* find(std::string_view program_id) const;
    const TopicSection* find_section(std::string_view program_id, std::string_view topic_id) const;

    /// Programs of one language, as their own corpus.
    Corpus filter(Language language) const;

    friend bool operator==(const Corpus&, const Corpus&) = default;

private:
    std::vector<StudyProgramDoc> programs_;
};

struct QAItem {
    std::string qa_id;
    std::string question;
    std::string reference_answer;
    std::string gold_program_id;
    std::string gold_topic_id;
    Language language = Language::en;

    friend bool operator==(const QAItem&, const QAItem&) = default;
};

Corpus corpus_from_json(const nlohmann::json& document);
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Items keep file order. Every gold label must resolve against `corpus`;
/// otherwise a single ValidationError lists all dangling items.
std::vector<QAItem> qa_set_from_json(const nlohmann::json& document, const Corpus& corpus);
nlohmann::json qa_set_to_json(std::span<const QAItem> items);
std::vector<QAItem> load_qa_set(const std::filesystem::path& path, const Corpus& corpus);
void save_qa_set(std::span<const QAItem> items, const std::filesystem::path& path);

/// Reads a whole file; throws ArgumentError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ragforge
