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

#include "ragforge/generate.hpp"

#include "ragforge/error.hpp"
#include "ragforge/prompts.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

void GenerationConfig::validate() const {
    if (use_icl && icl_exemplars.size() != kIclShots) {
        throw ConfigError("in-context learning needs exactly " + std::to_string(kIclShots) + " exemplars, got " +
                          std::to_string(icl_exemplars.size()));
    }
    for (const auto& exemplar : icl_exemplars) {
        if (text::trim(exemplar.question).empty() || text::trim(exemplar.answer).empty()) {
            throw ConfigError("ICL exemplars need a non-empty question and answer");
        }
    }
    if (!(temperature >= 0.0)) {
        throw ConfigError("temperature must be >= 0");
    }
    if (max_context_chunks == 0) {
        throw ConfigError("max_context_chunks must be positive");
    }
    if (model_id.empty()) {
        throw ConfigError("model_id must be set");
    }
}

std::vector<ContextChunk> context_for(const RankedList& retrieved, const IndexBundle& index) {
    std::vector<ContextChunk> out;
    out.reserve(retrieved.size());
    for (const auto& entry : retrieved.entries) {
        const auto* parent = index.find_parent(entry.chunk_id);
        std::string text;
        if (parent) {
            text = parent->text;
        } else if (const auto* child = index.find_child(entry.chunk_id)) {
            text = child->text;
            parent = index.find_parent(child->parent_id);
        }
        if (!parent) {
            throw IntegrityError("retrieved chunk '" + entry.chunk_id + "' is not in the index");
        }
        const auto* program = index.find_program(parent->program_id);
        const auto* topic = program ? program->find_topic(parent->topic_id) : nullptr;
        out.push_back({program ? program->name : parent->program_id, topic ? topic->title : parent->topic_id,
                       std::move(text)});
    }
    return out;
}

std::string render_context(std::span<const ContextChunk> context) {
    std::string out;
    for (std::size_t i = 0; i < context.size(); ++i) {
        out += prompts::kDocumentLead;
        out += std::to_string(i + 1) + ": " + context[i].program_name + " | " + context[i].topic_title + " ---\n";
        out += text::trim(context[i].text);
        out += "\n\n";
    }
    return out;
}

std::vector<ChatMessage> build_prompt(std::string_view question, std::span<const ContextChunk> context,
                                      const GenerationConfig& config) {
    if (context.size() > config.max_context_chunks) {
        throw ArgumentError("build_prompt: " + std::to_string(context.size()) + " context chunks exceed the limit of " +
                            std::to_string(config.max_context_chunks));
    }
    std::vector<ChatMessage> messages;
    messages.push_back({Role::system, std::string(prompts::kGenerationSystem)});
    if (config.use_icl) {
        for (const auto& exemplar : config.icl_exemplars) {
            messages.push_back({Role::user, "Question: " + exemplar.question});
            messages.push_back({Role::assistant, exemplar.answer});
        }
    }
    std::string user;
    if (context.empty()) {
        user = std::string(prompts::kNoContextNotice) + "\n\n";
    } else {
        user = "Context documents:\n\n" + render_context(context);
    }
    user += "Question: ";
    user += question;
    messages.push_back({Role::user, std::move(user)});
    return messages;
}

std::vector<QaExemplar> default_exemplars() {
    return {
        {"What are the tuition fees for international students in the Aerospace Master of Science (M.Sc.)?",
         "The Aerospace M.Sc. charges no tuition fees for international students; only the semester "
         "contribution for student services has to be paid each semester."},
        {"How do I apply for the Master's program in Management if I have an undergraduate degree from outside "
         "the EU?",
         "Applicants with a degree from outside the EU apply online through the university's application portal "
         "within the application period and upload their certified degree certificate, transcript and proof of "
         "English proficiency."},
        {"How many ECTS points do I need for Mathematics in Data Science?",
         "The Mathematics in Data Science master's program requires 120 ECTS credits in total, including the "
         "master's thesis."},
    };
}

std::vector<QaExemplar> load_exemplars(const std::filesystem::path& path) {
    json document;
    try {
        document = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
    std::vector<QaExemplar> out;
    try {
        for (const auto& entry : document.at("exemplars")) {
            out.push_back({entry.at("question").get<std::string>(), entry.at("answer").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace ragforge
