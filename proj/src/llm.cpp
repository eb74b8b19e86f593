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

#include "ragforge/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "http_util.hpp"
#include "ragforge/error.hpp"
#include "ragforge/evaluate.hpp"
#include "ragforge/prompts.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system:
            return "system";
        case Role::user:
            return "user";
        case Role::assistant:
            return "assistant";
    }
    return "user";
}

std::string complete(const ChatEndpoint& endpoint, std::span<const ChatMessage> messages,
                     const CompletionOptions& options, const RetryPolicy& retry) {
    const int attempts = 1 + std::max(0, retry.max_retries);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(retry.base_delay * (1 << (attempt - 1)));
        }
        try {
            return endpoint.complete(messages, options);
        } catch (const TransportError& e) {
            last_error = e.what();
            spdlog::warn("{} completion attempt {}/{} failed: {}", endpoint.kind(), attempt + 1, attempts, e.what());
        }
    }
    throw GenerationError("completion failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

std::string api_key_from_env() {
    const char* key = std::getenv("RAGFORGE_API_KEY");
    return key ? std::string(key) : std::string();
}

namespace {

json messages_json(std::span<const ChatMessage> messages) {
    json out = json::array();
    for (const auto& message : messages) {
        out.push_back({{"role", to_string(message.role)}, {"content", message.content}});
    }
    return out;
}

}  // namespace

OpenAiChatEndpoint::OpenAiChatEndpoint(std::string url, std::string api_key, std::chrono::milliseconds timeout)
    : url_(std::move(url)), api_key_(std::move(api_key)), timeout_(timeout) {
    http::parse_url(url_);
}

std::string OpenAiChatEndpoint::complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const {
    const json body = {{"model", options.model}, {"messages", messages_json(messages)}, {"temperature", options.temperature}};
    http::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace_back("Authorization", "Bearer " + api_key_);
    }
    const auto reply = http::post_json(url_, "/v1/chat/completions", body, headers, timeout_);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProtocolError("chat completion reply has no choices[0].message.content: " + std::string(e.what()));
    }
}

OllamaChatEndpoint::OllamaChatEndpoint(std::string url, std::chrono::milliseconds timeout)
    : url_(std::move(url)), timeout_(timeout) {
    http::parse_url(url_);
}

std::string OllamaChatEndpoint::complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const {
    const json body = {{"model", options.model},
                       {"messages", messages_json(messages)},
                       {"stream", false},
                       {"options", {{"temperature", options.temperature}}}};
    const auto reply = http::post_json(url_, "/api/chat", body, {}, timeout_);
    try {
        return reply.at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProtocolError("ollama reply has no message.content: " + std::string(e.what()));
    }
}

std::string first_sentence(std::string_view input) {
    const auto body = text::trim(input);
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        if (i + 1 == body.size()) {
            break;
        }
        const auto next = text::decode_utf8(body, i + 1).code_point;
        if (text::is_whitespace(next)) {
            return std::string(body.substr(0, i + 1));
        }
    }
    return std::string(body);
}

// --- mock ------------------------------------------------------------------

namespace {

std::string_view between(std::string_view haystack, std::string_view open, std::string_view close) {
    const auto start = haystack.find(open);
    if (start == std::string_view::npos) {
        return {};
    }
    const auto from = start + open.size();
    const auto end = close.empty() ? std::string_view::npos : haystack.find(close, from);
    return haystack.substr(from, end == std::string_view::npos ? std::string_view::npos : end - from);
}

std::string_view rest_of_line(std::string_view text, std::string_view lead) {
    return between(text, lead, "\n");
}

std::vector<std::string> split_list(std::string_view list) {
    std::vector<std::string> out;
    while (!list.empty()) {
        const auto pos = list.find(prompts::kListSeparator);
        const auto item = text::trim(list.substr(0, pos));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        list.remove_prefix(pos + prompts::kListSeparator.size());
    }
    return out;
}

std::string best_overlap(std::string_view question, const std::vector<std::string>& candidates) {
    if (candidates.empty()) {
        return std::string(text::trim(question));
    }
    const auto question_tokens = text::tokenize(question);
    const std::set<std::string> wanted(question_tokens.begin(), question_tokens.end());
    std::size_t best = 0;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto tokens = text::tokenize(candidates[i]);
        const std::set<std::string> have(tokens.begin(), tokens.end());
        std::size_t count = 0;
        for (const auto& token : have) {
            count += wanted.contains(token) ? 1 : 0;
        }
        if (count > best_count) {
            best = i;
            best_count = count;
        }
    }
    return candidates[best];
}

std::string joined_system(std::span<const ChatMessage> messages) {
    std::string out;
    for (const auto& message : messages) {
        if (message.role == Role::system) {
            out += message.content;
            out += '\n';
        }
    }
    return out;
}

const ChatMessage* last_user_containing(std::span<const ChatMessage> messages, std::string_view needle) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user && it->content.find(needle) != std::string::npos) {
            return &*it;
        }
    }
    return nullptr;
}

std::string human_question(std::span<const ChatMessage> messages) {
    const auto* user = last_user_containing(messages, "Human: ");
    return user ? std::string(between(user->content, "Human: ", "\nResponse:")) : std::string();
}

std::string mock_judge(const ChatMessage& user) {
    const std::string_view content = user.content;
    const auto answer_start = content.rfind(prompts::kJudgeAnswerHeader);
    const auto form = content.rfind(std::string("\n\n") + std::string(prompts::kJudgeFormMarker));
    std::string_view answer;
    if (answer_start != std::string_view::npos && form != std::string_view::npos && form > answer_start) {
        const auto from = answer_start + prompts::kJudgeAnswerHeader.size();
        answer = content.substr(from, form - from);
    }
    std::string_view reference = between(content.substr(0, answer_start), prompts::kJudgeReferenceHeader, "");
    if (reference.empty()) {
        reference = between(content.substr(0, answer_start), "\n\nContext:\n", "");
    }
    const double f1 = rouge_l(answer, reference).f1;
    const long score = std::clamp(1L + std::lround(4.0 * f1), 1L, 5L);
    return "Score: " + std::to_string(score);
}

std::string mock_rephrasings(std::span<const ChatMessage> messages, const std::string& system,
                             const MockOptions& options) {
    const auto* user = last_user_containing(messages, prompts::kOriginalQuestionLead);
    const std::string question = user ? std::string(rest_of_line(user->content, prompts::kOriginalQuestionLead)) : "";
    std::size_t count = 3;
    const auto count_text = between(system, "generate ", " ");
    if (!count_text.empty()) {
        count = std::strtoul(std::string(count_text).c_str(), nullptr, 10);
    }
    std::string out;
    if (const auto it = options.rephrasings.find(question); it != options.rephrasings.end()) {
        for (const auto& line : it->second) {
            out += line + "\n";
        }
        return out;
    }
    static constexpr std::string_view kTemplates[] = {
        "What can you tell me about this: ", "Please explain: ", "I would like to know: ", "Could you clarify: ",
        "Information needed: "};
    for (std::size_t i = 0; i < count; ++i) {
        out += kTemplates[i % std::size(kTemplates)];
        out += question;
        if (i >= std::size(kTemplates)) {
            out += " (" + std::to_string(i / std::size(kTemplates) + 1) + ")";
        }
        out += "\n";
    }
    return out;
}

std::string mock_generation(std::span<const ChatMessage> messages) {
    const ChatMessage* user = nullptr;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) {
            user = &*it;
            break;
        }
    }
    if (!user) {
        return "No information about this study program was found.";
    }
    std::string_view content = user->content;
    std::string answer;
    std::size_t pos = content.find(prompts::kDocumentLead);
    while (pos != std::string_view::npos) {
        const auto header_end = content.find('\n', pos);
        if (header_end == std::string_view::npos) {
            break;
        }
        auto next = content.find(std::string("\n") + std::string(prompts::kDocumentLead), header_end);
        auto end = next;
        if (end == std::string_view::npos) {
            end = content.rfind("\n\nQuestion: ");
            if (end == std::string_view::npos || end < header_end) {
                end = content.size();
            }
        }
        const auto sentence = first_sentence(content.substr(header_end + 1, end - header_end - 1));
        if (!sentence.empty()) {
            if (!answer.empty()) {
                answer += ' ';
            }
            answer += sentence;
        }
        pos = next == std::string_view::npos ? next : next + 1;
    }
    return answer.empty() ? "No information about this study program was found." : answer;
}

}  // namespace

MockChatEndpoint::MockChatEndpoint(MockOptions options) : options_(std::move(options)) {}

std::string MockChatEndpoint::complete(std::span<const ChatMessage> messages, const CompletionOptions&) const {
    if (const auto* judge = last_user_containing(messages, prompts::kJudgeFormMarker)) {
        return mock_judge(*judge);
    }
    const auto system = joined_system(messages);
    if (system.find(prompts::kProgramMarker) != std::string::npos) {
        const auto listed = rest_of_line(system, prompts::kProgramListLead);
        const auto names = listed.empty() ? options_.program_names : split_list(listed);
        return best_overlap(human_question(messages), names);
    }
    if (system.find(prompts::kTopicMarker) != std::string::npos) {
        return best_overlap(human_question(messages), split_list(rest_of_line(system, prompts::kTopicListLead)));
    }
    if (system.find(prompts::kMultiQueryMarker) != std::string::npos) {
        return mock_rephrasings(messages, system, options_);
    }
    return mock_generation(messages);
}

}  // namespace ragforge
