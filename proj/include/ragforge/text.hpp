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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ragforge::text {

/// One decoded code point and the number of bytes it occupied.
/// Malformed UTF-8 decodes as U+FFFD with length 1 so that byte offsets always advance.
struct DecodedChar {
    char32_t code_point;
    std::size_t length;
};

DecodedChar decode_utf8(std::string_view text, std::size_t offset);
void append_utf8(std::string& out, char32_t code_point);

/// Number of characters (code points) in `text`.
std::size_t char_count(std::string_view text);

bool is_whitespace(char32_t cp);
bool is_word_char(char32_t cp);
char32_t to_lower(char32_t cp);

/// Lowercase word tokens in order of appearance. Letters and digits of any
/// script count as word characters; everything else separates tokens.
/// No stemming and no stop words, so English and German are treated alike.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace ragforge::text
