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

#include "ragforge/chunking.hpp"

#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

std::vector<std::string_view> split_text(std::string_view text, std::size_t limit) {
    if (limit == 0) {
        throw ArgumentError("split_text: limit must be positive");
    }
    std::vector<std::string_view> pieces;
    // offsets[i] = byte offset of the i-th character of the current window,
    // spaces[i] = whether that character is whitespace.
    std::vector<std::size_t> offsets;
    std::vector<bool> spaces;
    std::size_t start = 0;
    while (start < text.size()) {
        offsets.clear();
        spaces.clear();
        std::size_t pos = start;
        while (pos < text.size() && offsets.size() <= limit) {
            const auto decoded = text::decode_utf8(text, pos);
            offsets.push_back(pos);
            spaces.push_back(text::is_whitespace(decoded.code_point));
            pos += decoded.length;
        }
        if (offsets.size() <= limit) {
            pieces.push_back(text.substr(start));
            break;
        }
        // A cut after `cut` characters is clean when it touches whitespace on either side.
        std::size_t cut = limit;
        while (cut > 0 && !spaces[cut - 1] && !spaces[cut]) {
            --cut;
        }
        if (cut == 0) {
            cut = limit;
        }
        pieces.push_back(text.substr(start, offsets[cut] - start));
        start = offsets[cut];
    }
    return pieces;
}

ChunkedDocument chunk_document(const StudyProgramDoc& doc, ChunkLimits limits) {
    if (limits.parent == 0 || limits.child == 0 || limits.child > limits.parent) {
        throw ArgumentError("chunk limits must be positive with child <= parent");
    }
    ChunkedDocument out;
    for (const auto& section : doc.sections) {
        const auto parents = split_text(section.body, limits.parent);
        for (std::size_t p = 0; p < parents.size(); ++p) {
            ParentChunk parent;
            parent.parent_id = doc.program_id + "/" + section.topic_id + "/p" + std::to_string(p);
            parent.program_id = doc.program_id;
            parent.topic_id = section.topic_id;
            parent.text = std::string(parents[p]);
            const auto children = split_text(parents[p], limits.child);
            for (std::size_t c = 0; c < children.size(); ++c) {
                ChildChunk child;
                child.child_id = parent.parent_id + "/c" + std::to_string(c);
                child.parent_id = parent.parent_id;
                child.text = std::string(children[c]);
                parent.child_ids.push_back(child.child_id);
                out.children.push_back(std::move(child));
            }
            out.parents.push_back(std::move(parent));
        }
    }
    return out;
}

}  // namespace ragforge
