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

#include "ragforge/text.hpp"

namespace ragforge::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

DecodedChar decode_utf8(std::string_view text, std::size_t offset) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char lead = byte(offset);
    if (lead < 0x80) {
        return {lead, 1};
    }
    std::size_t length = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        cp = lead & 0x07;
    } else {
        return {kReplacement, 1};
    }
    if (offset + length > text.size()) {
        return {kReplacement, 1};
    }
    for (std::size_t i = 1; i < length; ++i) {
        const unsigned char cont = byte(offset + i);
        if ((cont & 0xC0) != 0x80) {
            return {kReplacement, 1};
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    // Overlong encodings and surrogates are rejected.
    static constexpr char32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[length] || cp > 0x10FFFF || in(cp, 0xD800, 0xDFFF)) {
        return {kReplacement, 1};
    }
    return {cp, length};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::size_t char_count(std::string_view text) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size(); i += decode_utf8(text, i).length) {
        ++count;
    }
    return count;
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\v':
        case U'\f':
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return in(cp, 0x2000, 0x200A);
    }
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return in(cp, U'0', U'9') || in(cp, U'a', U'z') || in(cp, U'A', U'Z');
    }
    if (cp < 0x100) {
        // Latin-1: letters only, minus the multiplication and division signs.
        return cp == 0xAA || cp == 0xB5 || cp == 0xBA || (cp >= 0xC0 && cp != 0xD7 && cp != 0xF7);
    }
    if (cp == kReplacement || is_whitespace(cp)) {
        return false;
    }
    // Punctuation and symbol blocks; every other code point is treated as a letter.
    return !(in(cp, 0x2000, 0x2BFF) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE10, 0xFE1F) ||
             in(cp, 0xFE30, 0xFE6F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
             in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF) ||
             in(cp, 0xE000, 0xF8FF));
}

char32_t to_lower(char32_t cp) {
    if (in(cp, U'A', U'Z')) {
        return cp + 32;
    }
    if (cp < 0x80) {
        return cp;
    }
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 32;
    }
    // Latin Extended-A pairs alternate upper/lower, with a parity shift at U+0139..U+0148.
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) {
        return cp | 1;
    }
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) {
        return (cp & 1) ? cp + 1 : cp;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if (in(cp, 0x391, 0x3AB) && cp != 0x3A2) {
        return cp + 32;
    }
    if (in(cp, 0x410, 0x42F)) {
        return cp + 32;
    }
    if (in(cp, 0x400, 0x40F)) {
        return cp + 80;
    }
    if (cp == 0x1E9E) {
        return 0xDF;  // capital sharp s
    }
    return cp;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < text.size();) {
        const auto [cp, length] = decode_utf8(text, i);
        i += length;
        if (is_word_char(cp)) {
            append_utf8(current, to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        const auto [cp, length] = decode_utf8(text, i);
        if (cp == kReplacement && length == 1) {
            out.push_back(text[i]);
        } else {
            append_utf8(out, to_lower(cp));
        }
        i += length;
    }
    return out;
}

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    while (begin < text.size()) {
        const auto decoded = decode_utf8(text, begin);
        if (!is_whitespace(decoded.code_point)) {
            break;
        }
        begin += decoded.length;
    }
    std::size_t end = begin;
    for (std::size_t i = begin; i < text.size();) {
        const auto decoded = decode_utf8(text, i);
        i += decoded.length;
        if (!is_whitespace(decoded.code_point)) {
            end = i;
        }
    }
    return text.substr(begin, end - begin);
}

}  // namespace ragforge::text
