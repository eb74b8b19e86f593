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

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ragforge/error.hpp"
#include "ragforge/llm.hpp"
#include "ragforge/prompts.hpp"

using namespace ragforge;
using nlohmann::json;

namespace {

// Fails with `error` for the first `failures` calls, then answers "ok".
class FlakyEndpoint final : public ChatEndpoint {
public:
    FlakyEndpoint(int failures, bool protocol) : failures_(failures), protocol_(protocol) {}
    std::string complete(std::span<const ChatMessage>, const CompletionOptions&) const override {
        if (calls_++ < failures_) {
            if (protocol_) {
                throw ProtocolError("bad payload");
            }
            throw TransportError("connection reset");
        }
        return "ok";
    }
    std::string kind() const override { return "flaky"; }
    int calls() const { return calls_; }

private:
    int failures_;
    bool protocol_;
    mutable std::atomic<int> calls_{0};
};

const std::vector<ChatMessage> kHello{{Role::user, "hello"}};
const RetryPolicy kFast{2, std::chrono::milliseconds(1)};

std::string ask(const MockChatEndpoint& mock, const std::vector<ChatMessage>& messages) {
    return mock.complete(messages, {});
}

}  // namespace

TEST_CASE("complete retries transport failures with backoff") {
    const FlakyEndpoint endpoint(2, false);
    CHECK(complete(endpoint, kHello, {}, kFast) == "ok");
    CHECK(endpoint.calls() == 3);

    const FlakyEndpoint hopeless(5, false);
    CHECK_THROWS_AS(complete(hopeless, kHello, {}, kFast), GenerationError);
    CHECK(hopeless.calls() == 3);

    const FlakyEndpoint once(1, false);
    CHECK_THROWS_AS(complete(once, kHello, {}, RetryPolicy{0, std::chrono::milliseconds(1)}), GenerationError);
    CHECK(once.calls() == 1);
}

TEST_CASE("complete does not retry protocol errors") {
    const FlakyEndpoint endpoint(1, true);
    CHECK_THROWS_AS(complete(endpoint, kHello, {}, kFast), ProtocolError);
    CHECK(endpoint.calls() == 1);
}

TEST_CASE("first_sentence") {
    CHECK(first_sentence("Fees are 100 EUR. Pay early!") == "Fees are 100 EUR.");
    CHECK(first_sentence("  Version 2.5 applies. More text.") == "Version 2.5 applies.");
    CHECK(first_sentence("No terminator here ") == "No terminator here");
    CHECK(first_sentence("Is it free?\nYes.") == "Is it free?");
    CHECK(first_sentence("").empty());
}

TEST_CASE("mock picks the listed program with the largest token overlap") {
    const MockChatEndpoint mock;
    const std::vector<std::string> names{"Mathematics", "Mathematics in Data Science", "Informatics"};
    const auto prompt = prompts::program_prompt("How many ECTS points do I need for Mathematics in Data Science?",
                                                names, prompts::ProgramPromptMode::list_constrained);
    CHECK(ask(mock, prompt) == "Mathematics in Data Science");
    // No overlap at all: the first candidate.
    const auto none = prompts::program_prompt("Hello?", names, prompts::ProgramPromptMode::list_constrained);
    CHECK(ask(mock, none) == "Mathematics");
}

TEST_CASE("mock free prediction uses configured names or echoes the question") {
    const auto prompt = prompts::program_prompt("Costs of Informatics?", std::vector<std::string>{},
                                                prompts::ProgramPromptMode::free_predict);
    const MockChatEndpoint with_names(MockOptions{{"Physics", "Informatics"}, {}});
    CHECK(ask(with_names, prompt) == "Informatics");
    const MockChatEndpoint bare;
    CHECK(ask(bare, prompt) == "Costs of Informatics?");
}

TEST_CASE("mock topic prediction") {
    const MockChatEndpoint mock;
    const std::vector<std::string> titles{"Costs", "Admission Requirements", "Language Proficiency"};
    CHECK(ask(mock, prompts::topic_prompt("What are the admission requirements?", "Physics", titles)) ==
          "Admission Requirements");
}

TEST_CASE("mock rephrasings: canned lines or templates") {
    MockOptions options;
    options.rephrasings["Fees?"] = {"How much does it cost?", "Tuition amount?"};
    const MockChatEndpoint mock(options);
    CHECK(ask(mock, prompts::multi_query_prompt("Fees?", 3)) == "How much does it cost?\nTuition amount?\n");
    const auto templated = ask(mock, prompts::multi_query_prompt("Deadline?", 2));
    CHECK(templated == "What can you tell me about this: Deadline?\nPlease explain: Deadline?\n");
}

TEST_CASE("mock judge maps ROUGE-L against the reference onto 1..5") {
    const MockChatEndpoint mock;
    const auto judge = [&](std::string_view answer, std::string_view reference) {
        return ask(mock, prompts::judge_prompt("Faithfulness", "criteria", "steps", "q?", "some context", answer,
                                               reference));
    };
    CHECK(judge("the fee is 100 euro", "the fee is 100 euro") == "Score: 5");
    CHECK(judge("completely unrelated", "the fee is 100 euro") == "Score: 1");
    // LCS 2 of 5: P=1, R=0.4, F1=4/7, 1 + round(16/7) = 3.
    CHECK(judge("the fee", "the fee is 100 euro") == "Score: 3");
    // Without a reference the context is the yardstick.
    CHECK(judge("some context", "") == "Score: 5");
}

TEST_CASE("mock generation takes the first sentence of each document") {
    const MockChatEndpoint mock;
    const std::vector<ChatMessage> messages{
        {Role::system, "sys"},
        {Role::user, "Context documents:\n\n--- Document 1: A | Costs ---\nFees are 0 EUR. Really.\n\n"
                     "--- Document 2: A | Admission ---\nA bachelor is required. Also more.\n\nQuestion: q?"}};
    CHECK(ask(mock, messages) == "Fees are 0 EUR. A bachelor is required.");
    const std::vector<ChatMessage> no_docs{{Role::user, "Question: q?"}};
    CHECK(ask(mock, no_docs) == "No information about this study program was found.");
}

namespace {

struct FakeChatServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    json last_body;
    std::string last_auth;
    int status = 200;
    std::string reply;

    FakeChatServer() {
        const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            last_body = json::parse(req.body);
            last_auth = req.get_header_value("Authorization");
            res.status = status;
            res.set_content(reply, "application/json");
        };
        server.Post("/v1/chat/completions", handler);
        server.Post("/api/chat", handler);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeChatServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("OpenAI-compatible client request and reply") {
    FakeChatServer fake;
    fake.reply = R"({"choices":[{"message":{"role":"assistant","content":"Hi there"}}]})";
    const OpenAiChatEndpoint endpoint(fake.url(), "secret", std::chrono::milliseconds(5000));
    const std::vector<ChatMessage> messages{{Role::system, "s"}, {Role::user, "u"}};
    CHECK(endpoint.complete(messages, {"gpt-x", 0.0}) == "Hi there");
    CHECK(fake.last_auth == "Bearer secret");
    CHECK(fake.last_body["model"] == "gpt-x");
    CHECK(fake.last_body["temperature"] == 0.0);
    CHECK(fake.last_body["messages"] == json::parse(R"([{"role":"system","content":"s"},{"role":"user","content":"u"}])"));

    fake.reply = R"({"choices":[]})";
    CHECK_THROWS_AS(endpoint.complete(messages, {}), ProtocolError);
    fake.status = 500;
    CHECK_THROWS_AS(endpoint.complete(messages, {}), TransportError);
    fake.status = 429;
    CHECK_THROWS_AS(endpoint.complete(messages, {}), TransportError);
    fake.status = 400;
    CHECK_THROWS_AS(endpoint.complete(messages, {}), ProtocolError);
}

TEST_CASE("Ollama client request and reply") {
    FakeChatServer fake;
    fake.reply = R"({"message":{"role":"assistant","content":"Hallo"},"done":true})";
    const OllamaChatEndpoint endpoint(fake.url(), std::chrono::milliseconds(5000));
    CHECK(endpoint.complete(kHello, {"mistral:7b", 0.2}) == "Hallo");
    CHECK(fake.last_body["stream"] == false);
    CHECK(fake.last_body["model"] == "mistral:7b");
    CHECK(fake.last_body["options"]["temperature"] == 0.2);
    fake.reply = "[]";
    CHECK_THROWS_AS(endpoint.complete(kHello, {}), ProtocolError);
}

TEST_CASE("endpoint URLs are validated") {
    CHECK_THROWS_AS(OpenAiChatEndpoint("ftp://host", ""), ConfigError);
    CHECK_THROWS_AS(OllamaChatEndpoint("localhost:11434"), ConfigError);
}
