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

#include <string>

#include "ragforge/chunking.hpp"
#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

using namespace ragforge;

namespace {

std::string lorem(std::size_t chars) {
    std::string words;
    for (int i = 0; i < 40; ++i) {
        words += "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor ";
    }
    return words.substr(0, chars);
}

std::vector<std::size_t> lengths(const std::vector<std::string_view>& pieces) {
    std::vector<std::size_t> out;
    for (const auto piece : pieces) {
        out.push_back(text::char_count(piece));
    }
    return out;
}

}  // namespace

TEST_CASE("a 3100-character section splits like the reference splitter") {
    // Reference lengths from tests/oracles/oracle_values.py.
    const auto section = lorem(3100);
    const auto parents = split_text(section, 1500);
    CHECK(lengths(parents) == std::vector<std::size_t>{1490, 1498, 92});
    CHECK(lengths(split_text(parents[0], 300)) == std::vector<std::size_t>{300, 300, 297, 297, 296});
    CHECK(lengths(split_text(parents[1], 300)) == std::vector<std::size_t>{299, 296, 295, 300, 300, 8});
    CHECK(lengths(split_text(parents[2], 300)) == std::vector<std::size_t>{92});
}

TEST_CASE("short text stays whole and empty text gives no pieces") {
    CHECK(split_text("short text", 300) == std::vector<std::string_view>{"short text"});
    CHECK(split_text("", 300).empty());
    CHECK_THROWS_AS(split_text("x", 0), ArgumentError);
}

TEST_CASE("splits end at whitespace boundaries") {
    const auto pieces = split_text("aaaa bbbb cccc", 7);
    CHECK(pieces == std::vector<std::string_view>{"aaaa ", "bbbb ", "cccc"});
    const auto at_space = split_text("aaaa  bbbb", 5);
    CHECK(at_space == std::vector<std::string_view>{"aaaa ", " bbbb"});
}

TEST_CASE("a token longer than the limit is cut at the limit") {
    const std::string url = "https://example.org/" + std::string(40, 'x');
    const auto pieces = split_text(url, 25);
    CHECK(lengths(pieces) == std::vector<std::size_t>{25, 25, 10});
    std::string joined;
    for (const auto piece : pieces) {
        joined += piece;
    }
    CHECK(joined == url);
}

TEST_CASE("limits count characters, so multi-byte text is never split inside a code point") {
    const std::string text = "äöüäöü äöüäöü";
    const auto pieces = split_text(text, 4);
    for (const auto piece : pieces) {
        CHECK(text::char_count(piece) <= 4);
        for (std::size_t i = 0; i < piece.size();) {
            const auto decoded = text::decode_utf8(piece, i);
            CHECK(decoded.code_point != 0xFFFD);
            i += decoded.length;
        }
    }
}

TEST_CASE("chunk_document builds linked parents and children per section") {
    StudyProgramDoc doc{"msc-x-en", "X M.Sc.", Language::en,
                        {{"costs", "Costs", lorem(1600)}, {"admission", "Admission", "A bachelor degree."}}};
    const auto chunked = chunk_document(doc);
    REQUIRE(chunked.parents.size() == 3);
    CHECK(chunked.parents[0].parent_id == "msc-x-en/costs/p0");
    CHECK(chunked.parents[1].parent_id == "msc-x-en/costs/p1");
    CHECK(chunked.parents[2].parent_id == "msc-x-en/admission/p0");
    CHECK(chunked.parents[2].child_ids == std::vector<std::string>{"msc-x-en/admission/p0/c0"});
    CHECK(chunked.parents[0].text + chunked.parents[1].text == doc.sections[0].body);
    for (const auto& child : chunked.children) {
        CHECK(child.child_id.rfind(child.parent_id + "/c", 0) == 0);
        CHECK(text::char_count(child.text) <= 300);
    }
}

TEST_CASE("custom limits are validated") {
    StudyProgramDoc doc{"p", "P", Language::en, {{"t", "T", "body text here"}}};
    CHECK(chunk_document(doc, {10, 5}).children.size() == 3);
    CHECK_THROWS_AS(chunk_document(doc, {5, 10}), ArgumentError);
    CHECK_THROWS_AS(chunk_document(doc, {0, 0}), ArgumentError);
}
