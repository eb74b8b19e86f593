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

#include "ragforge/prompts.hpp"

namespace ragforge::prompts {

namespace {

std::string join(std::span<const std::string> items, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += items[i];
    }
    return out;
}

std::string system_line() {
    return "System: The following will be a query by a student about study programs of a Technical University. "
           "I want you to output the study program the student is having questions about. " +
           std::string(kProgramMarker);
}

std::string context_line(std::span<const std::string> names, ProgramPromptMode mode) {
    std::string line =
        "Context: Please note, that we only need the study program. Do not self-reference, comment or give any "
        "notes. Only output the study program.";
    if (mode == ProgramPromptMode::list_constrained) {
        line += " ";
        line += kProgramListLead;
        line += join(names, kListSeparator);
    }
    return line;
}

}  // namespace

std::vector<ChatMessage> program_prompt(std::string_view question, std::span<const std::string> program_names,
                                        ProgramPromptMode mode) {
    return {
        {Role::system, system_line() + "\n" + context_line(program_names, mode)},
        {Role::user, "Human: " + std::string(question) + "\nResponse:"},
    };
}

std::string program_prompt_listing(std::string_view question, std::span<const std::string> program_names,
                                   ProgramPromptMode mode) {
    return system_line() + "\n" + context_line(program_names, mode) + "\nHuman: " + std::string(question) +
           "\nResponse: ";
}

std::vector<ChatMessage> topic_prompt(std::string_view question, std::string_view program_name,
                                      std::span<const std::string> topic_titles) {
    std::string system =
        "The following will be a query by a student about the study program \"" + std::string(program_name) +
        "\" of a Technical University. I want you to output the topic of the study program the student is "
        "asking about, such as costs, admission requirements, language proficiency or type of study. "
        "Do not self-reference, comment or give any notes. " +
        std::string(kTopicMarker);
    if (!topic_titles.empty()) {
        system += "\n";
        system += kTopicListLead;
        system += join(topic_titles, kListSeparator);
    }
    return {
        {Role::system, std::move(system)},
        {Role::user, "Human: " + std::string(question) + "\nResponse:"},
    };
}

std::vector<ChatMessage> multi_query_prompt(std::string_view question, std::size_t count,
                                            std::span<const std::string> already) {
    std::string system = "You are an AI language model assistant. Your task is to generate " + std::to_string(count) +
                         " " + std::string(kMultiQueryMarker) +
                         " to retrieve relevant documents from a vector database. The question is about one study "
                         "program of a Technical University; keep that study program unchanged and only rephrase "
                         "the question. Provide these alternative questions separated by newlines, without "
                         "numbering or any other text.";
    std::string user = std::string(kOriginalQuestionLead) + std::string(question);
    if (!already.empty()) {
        user += "\nAlready proposed (do not repeat these):\n" + join(already, "\n");
    }
    return {{Role::system, std::move(system)}, {Role::user, std::move(user)}};
}

std::vector<ChatMessage> judge_prompt(std::string_view feature_title, std::string_view criteria,
                                      std::string_view steps, std::string_view question, std::string_view context,
                                      std::string_view answer, std::string_view reference) {
    std::string system =
        "You will be given a student's question about a study program, the context documents retrieved for it, "
        "and an answer generated from that context.\n\nYour task is to rate the answer on one metric.\n\n"
        "Please make sure you read and understand these instructions carefully. Please keep this document open "
        "while reviewing, and refer to it as needed.\n\nEvaluation Criteria:\n\n";
    system += feature_title;
    system += " (1-5) - ";
    system += criteria;
    system += "\n\nEvaluation Steps:\n\n";
    system += steps;

    std::string user = "Question:\n" + std::string(question) + "\n\nContext:\n" + std::string(context);
    if (!reference.empty()) {
        user += kJudgeReferenceHeader;
        user += reference;
    }
    user += kJudgeAnswerHeader;
    user += answer;
    user += "\n\n";
    user += kJudgeFormMarker;
    user += "\n\n- ";
    user += feature_title;
    user += ":";
    return {{Role::system, std::move(system)}, {Role::user, std::move(user)}};
}

}  // namespace ragforge::prompts
