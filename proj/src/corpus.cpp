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

#include "ragforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

std::string_view to_string(Language language) {
    return language == Language::en ? "en" : "de";
}

Language parse_language(std::string_view value) {
    if (value == "en") {
        return Language::en;
    }
    if (value == "de") {
        return Language::de;
    }
    throw ArgumentError("unknown language '" + std::string(value) + "' (expected en or de)");
}

const TopicSection* StudyProgramDoc::find_section(std::string_view topic_id) const {
    for (const auto& section : sections) {
        if (section.topic_id == topic_id) {
            return &section;
        }
    }
    return nullptr;
}

Corpus::Corpus(std::vector<StudyProgramDoc> programs) : programs_(std::move(programs)) {
    std::ranges::sort(programs_, {}, &StudyProgramDoc::program_id);
    for (std::size_t i = 0; i < programs_.size(); ++i) {
        const auto& doc = programs_[i];
        if (doc.program_id.empty()) {
            throw ValidationError("program with name '" + doc.name + "' has an empty program_id");
        }
        if (i > 0 && programs_[i - 1].program_id == doc.program_id) {
            throw ValidationError("duplicate program_id '" + doc.program_id + "'");
        }
        if (doc.sections.empty()) {
            throw ValidationError("program '" + doc.program_id + "' has no sections");
        }
        std::set<std::string_view> topics;
        for (const auto& section : doc.sections) {
            if (section.topic_id.empty()) {
                throw ValidationError("program '" + doc.program_id + "' has a section with an empty topic_id");
            }
            if (!topics.insert(section.topic_id).second) {
                throw ValidationError("program '" + doc.program_id + "' has duplicate topic_id '" +
                                      section.topic_id + "'");
            }
            if (text::trim(section.body).empty()) {
                throw ValidationError("section '" + doc.program_id + "/" + section.topic_id +
                                      "' has an empty body");
            }
        }
    }
}

const StudyProgramDoc* Corpus::find(std::string_view program_id) const {
    const auto it = std::ranges::lower_bound(programs_, program_id, {}, &StudyProgramDoc::program_id);
    if (it == programs_.end() || it->program_id != program_id) {
        return nullptr;
    }
    return &*it;
}

const TopicSection* Corpus::find_section(std::string_view program_id, std::string_view topic_id) const {
    const auto* doc = find(program_id);
    return doc ? doc->find_section(topic_id) : nullptr;
}

Corpus Corpus::filter(Language language) const {
    std::vector<StudyProgramDoc> selected;
    std::ranges::copy_if(programs_, std::back_inserter(selected),
                         [&](const StudyProgramDoc& doc) { return doc.language == language; });
    return Corpus(std::move(selected));
}

namespace {

std::string record_label(std::string_view array, std::size_t index, const json& record, const char* key) {
    std::string label = std::string(array) + "[" + std::to_string(index) + "]";
    if (record.is_object()) {
        const auto it = record.find(key);
        if (it != record.end() && it->is_string()) {
            label += " (" + std::string(key) + "=\"" + it->get<std::string>() + "\")";
        }
    }
    return label;
}

std::string require_string(const json& object, const char* key, const std::string& where) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw SchemaError(where + ": missing field '" + key + "'");
    }
    if (!it->is_string()) {
        throw SchemaError(where + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

const json& require_array(const json& object, const char* key, const std::string& where) {
    if (!object.is_object()) {
        throw SchemaError(where + ": expected an object");
    }
    const auto it = object.find(key);
    if (it == object.end() || !it->is_array()) {
        throw SchemaError(where + ": field '" + key + "' must be an array");
    }
    return *it;
}

Language require_language(const json& object, const std::string& where) {
    const auto value = require_string(object, "language", where);
    if (value != "en" && value != "de") {
        throw SchemaError(where + ": language must be \"en\" or \"de\", got \"" + value + "\"");
    }
    return parse_language(value);
}

json parse_json_file(const std::filesystem::path& path) {
    const auto contents = read_file(path);
    try {
        return json::parse(contents);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
}

}  // namespace

Corpus corpus_from_json(const json& document) {
    const auto& records = require_array(document, "programs", "corpus");
    std::vector<StudyProgramDoc> programs;
    programs.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        const auto where = record_label("programs", i, record, "program_id");
        if (!record.is_object()) {
            throw SchemaError(where + ": expected an object");
        }
        StudyProgramDoc doc;
        doc.program_id = require_string(record, "program_id", where);
        doc.name = require_string(record, "name", where);
        doc.language = require_language(record, where);
        const auto& sections = require_array(record, "sections", where);
        for (std::size_t j = 0; j < sections.size(); ++j) {
            const auto section_where = where + "." + record_label("sections", j, sections[j], "topic_id");
            if (!sections[j].is_object()) {
                throw SchemaError(section_where + ": expected an object");
            }
            doc.sections.push_back({require_string(sections[j], "topic_id", section_where),
                                    require_string(sections[j], "title", section_where),
                                    require_string(sections[j], "body", section_where)});
        }
        programs.push_back(std::move(doc));
    }
    return Corpus(std::move(programs));
}

json corpus_to_json(const Corpus& corpus) {
    json programs = json::array();
    for (const auto& doc : corpus.programs()) {
        json sections = json::array();
        for (const auto& section : doc.sections) {
            sections.push_back({{"topic_id", section.topic_id}, {"title", section.title}, {"body", section.body}});
        }
        programs.push_back({{"program_id", doc.program_id},
                            {"name", doc.name},
                            {"language", to_string(doc.language)},
                            {"sections", std::move(sections)}});
    }
    return {{"programs", std::move(programs)}};
}

Corpus load_corpus(const std::filesystem::path& path) {
    return corpus_from_json(parse_json_file(path));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    write_file(path, corpus_to_json(corpus).dump(2) + "\n");
}

std::vector<QAItem> qa_set_from_json(const json& document, const Corpus& corpus) {
    const auto& records = require_array(document, "items", "qa set");
    std::vector<QAItem> items;
    items.reserve(records.size());
    std::vector<std::string> dangling;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        const auto where = record_label("items", i, record, "qa_id");
        if (!record.is_object()) {
            throw SchemaError(where + ": expected an object");
        }
        QAItem item;
        item.qa_id = require_string(record, "qa_id", where);
        item.question = require_string(record, "question", where);
        item.reference_answer = require_string(record, "reference_answer", where);
        item.gold_program_id = require_string(record, "gold_program_id", where);
        item.gold_topic_id = require_string(record, "gold_topic_id", where);
        item.language = require_language(record, where);
        if (!corpus.find(item.gold_program_id)) {
            dangling.push_back(item.qa_id + " (unknown program '" + item.gold_program_id + "')");
        } else if (!corpus.find_section(item.gold_program_id, item.gold_topic_id)) {
            dangling.push_back(item.qa_id + " (unknown topic '" + item.gold_program_id + "/" +
                               item.gold_topic_id + "')");
        }
        items.push_back(std::move(item));
    }
    if (!dangling.empty()) {
        std::ostringstream message;
        message << dangling.size() << " QA item(s) with dangling gold labels:";
        for (const auto& entry : dangling) {
            message << "\n  " << entry;
        }
        throw ValidationError(message.str());
    }
    return items;
}

json qa_set_to_json(std::span<const QAItem> items) {
    json out = json::array();
    for (const auto& item : items) {
        out.push_back({{"qa_id", item.qa_id},
                       {"question", item.question},
                       {"reference_answer", item.reference_answer},
                       {"gold_program_id", item.gold_program_id},
                       {"gold_topic_id", item.gold_topic_id},
                       {"language", to_string(item.language)}});
    }
    return {{"items", std::move(out)}};
}

std::vector<QAItem> load_qa_set(const std::filesystem::path& path, const Corpus& corpus) {
    return qa_set_from_json(parse_json_file(path), corpus);
}

void save_qa_set(std::span<const QAItem> items, const std::filesystem::path& path) {
    write_file(path, qa_set_to_json(items).dump(2) + "\n");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ArgumentError("cannot write '" + path.string() + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace ragforge
