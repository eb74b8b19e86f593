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

#include <chrono>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragforge {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct CompletionOptions {
    std::string model;
    double temperature = 0.0;
};

/// A chat-completion backend. complete() must be safe to call concurrently;
/// transient failures are reported as TransportError.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual std::string complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const = 0;
    virtual std::string kind() const = 0;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds base_delay{250};
};

/// Calls the endpoint, retrying TransportError with exponential backoff
/// (base_delay, 2*base_delay, ...). Throws GenerationError once every
/// attempt has failed; ProtocolError is not retried.
std::string complete(const ChatEndpoint& endpoint, std::span<const ChatMessage> messages,
                     const CompletionOptions& options, const RetryPolicy& retry = {});

/// POST {url}/v1/chat/completions with a bearer token.
class OpenAiChatEndpoint final : public ChatEndpoint {
public:
    OpenAiChatEndpoint(std::string url, std::string api_key, std::chrono::milliseconds timeout = std::chrono::seconds(120));
    std::string complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const override;
    std::string kind() const override { return "openai"; }

private:
    std::string url_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

/// POST {url}/api/chat with stream=false.
class OllamaChatEndpoint final : public ChatEndpoint {
public:
    explicit OllamaChatEndpoint(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(300));
    std::string complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const override;
    std::string kind() const override { return "ollama"; }

private:
    std::string url_;
    std::chrono::milliseconds timeout_;
};

struct MockOptions {
    /// Candidate names when the program prompt carries no list (free prediction).
    std::vector<std::string> program_names;
    /// Canned rephrasings per original question; other questions get
    /// template rephrasings.
    std::map<std::string, std::vector<std::string>> rephrasings;
};

/// Offline endpoint with frozen, deterministic behaviour per prompt kind:
///   program prompt      -> listed name with the largest token overlap with the question
///   topic prompt        -> listed topic title with the largest token overlap
///   multi-query prompt  -> canned or template rephrasings, one per line
///   judge prompt        -> "Score: N", N = 1 + round(4 * ROUGE-L F1(answer, reference)) in [1, 5]
///   anything else       -> first sentence of every context document, concatenated
/// Ties go to the earliest listed candidate.
class MockChatEndpoint final : public ChatEndpoint {
public:
    static constexpr std::string_view kModelId = "mock:deterministic";

    explicit MockChatEndpoint(MockOptions options = {});
    std::string complete(std::span<const ChatMessage> messages, const CompletionOptions& options) const override;
    std::string kind() const override { return "mock"; }

private:
    MockOptions options_;
};

/// First sentence of `text`: up to and including the first '.', '!' or '?'
/// that ends the text or is followed by whitespace; the trimmed text otherwise.
std::string first_sentence(std::string_view text);

std::string api_key_from_env();

}  // namespace ragforge
