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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragforge/llm.hpp"

// Prompt templates. Changing any text here changes experiment results, so
// bump kPromptVersion with it; the version is part of every result record.
namespace ragforge::prompts {

inline constexpr std::string_view kPromptVersion = "v1";

// Markers the mock endpoint uses to recognise each prompt kind.
inline constexpr std::string_view kProgramMarker = "Only output the study program!";
inline constexpr std::string_view kProgramListLead = "Here are the possible study programs: ";
inline constexpr std::string_view kTopicMarker = "Only output the topic!";
inline constexpr std::string_view kTopicListLead = "Possible topics: ";
inline constexpr std::string_view kMultiQueryMarker = "different versions of the given user question";
inline constexpr std::string_view kOriginalQuestionLead = "Original question: ";
inline constexpr std::string_view kJudgeFormMarker = "Evaluation Form (scores ONLY):";
inline constexpr std::string_view kDocumentLead = "--- Document ";
inline constexpr std::string_view kListSeparator = ", ";
inline constexpr std::string_view kJudgeReferenceHeader = "\n\nReference Answer:\n";
inline constexpr std::string_view kJudgeAnswerHeader = "\n\nAnswer:\n";

enum class ProgramPromptMode { list_constrained, free_predict };

/// Study-program prediction prompt:
///   system: "System: ..." and "Context: ..." lines (program list omitted in free mode)
///   user:   "Human: <question>" and "Response:"
std::vector<ChatMessage> program_prompt(std::string_view question, std::span<const std::string> program_names,
                                        ProgramPromptMode mode);

/// The same prompt flattened into the four-line System/Context/Human/Response listing.
std::string program_prompt_listing(std::string_view question, std::span<const std::string> program_names,
                                   ProgramPromptMode mode);

std::vector<ChatMessage> topic_prompt(std::string_view question, std::string_view program_name,
                                      std::span<const std::string> topic_titles);

/// `already` lists rephrasings collected by earlier attempts.
std::vector<ChatMessage> multi_query_prompt(std::string_view question, std::size_t count,
                                            std::span<const std::string> already = {});

/// G-Eval style single-metric judge prompt. The reference section is
/// omitted when `reference` is empty.
std::vector<ChatMessage> judge_prompt(std::string_view feature_title, std::string_view criteria,
                                      std::string_view steps, std::string_view question, std::string_view context,
                                      std::string_view answer, std::string_view reference);

inline constexpr std::string_view kGenerationSystem =
    "You are a helpful assistant answering students' questions about the study programs of a technical "
    "university. Answer only with information from the provided context documents. If the context does not "
    "contain the answer, say that the information was not found. Answer in the language of the question.";

inline constexpr std::string_view kNoContextNotice =
    "No program information was found for this question. Tell the student that no information about the "
    "study program was found.";

}  // namespace ragforge::prompts
