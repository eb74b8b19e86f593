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

#include "ragforge/index_bundle.hpp"
#include "ragforge/llm.hpp"
#include "ragforge/ranked_list.hpp"

namespace ragforge {

struct QaExemplar {
    std::string question;
    std::string answer;

    friend bool operator==(const QaExemplar&, const QaExemplar&) = default;
};

inline constexpr std::size_t kIclShots = 3;

struct GenerationConfig {
    bool use_icl = false;
    std::vector<QaExemplar> icl_exemplars;  // exactly kIclShots when use_icl
    std::string model_id = std::string(MockChatEndpoint::kModelId);
    double temperature = 0.0;
    std::size_t max_context_chunks = 5;

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;
};

/// A retrieved chunk as it appears in the prompt.
struct ContextChunk {
    std::string program_name;
    std::string topic_title;
    std::string text;
};

/// Resolves retrieved chunk ids to prompt context, in rank order.
std::vector<ContextChunk> context_for(const RankedList& retrieved, const IndexBundle& index);

/// System message, then three exemplar user/assistant turns when ICL is on,
/// then one user turn with the numbered context documents and the question.
/// Pure: identical inputs give byte-identical messages.
std::vector<ChatMessage> build_prompt(std::string_view question, std::span<const ContextChunk> context,
                                      const GenerationConfig& config);

/// The context block on its own, as embedded in the final user turn.
std::string render_context(std::span<const ContextChunk> context);

struct GeneratedAnswer {
    std::string qa_id;
    std::string answer_text;  // empty marks a generation failure
    std::string error;        // set when answer_text is empty because of an error
    RankedList retrieved;
    bool match = false;  // gold program and topic present in `retrieved`
    std::string model_id;
    std::string config_fingerprint;
    double latency_ms = 0.0;
};

/// Three exemplars drawn from different topic types.
std::vector<QaExemplar> default_exemplars();

/// JSON {"exemplars":[{"question":..,"answer":..}]}.
std::vector<QaExemplar> load_exemplars(const std::filesystem::path& path);

}  // namespace ragforge
