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

#include "ragforge/corpus.hpp"

namespace ragforge {

struct ChunkLimits {
    std::size_t parent = 1500;
    std::size_t child = 300;
};

struct ParentChunk {
    std::string parent_id;
    std::string program_id;
    std::string topic_id;
    std::string text;
    std::vector<std::string> child_ids;

    friend bool operator==(const ParentChunk&, const ParentChunk&) = default;
};

struct ChildChunk {
    std::string child_id;
    std::string parent_id;
    std::string text;

    friend bool operator==(const ChildChunk&, const ChildChunk&) = default;
};

struct ChunkedDocument {
    std::vector<ParentChunk> parents;
    std::vector<ChildChunk> children;
};

/// Greedy split of `text` into pieces of at most `limit` characters (code
/// points). Each piece ends at the last whitespace boundary that fits; a
/// piece is cut mid-token only when no boundary exists inside the window.
/// Concatenating the pieces reproduces `text` exactly.
std::vector<std::string_view> split_text(std::string_view text, std::size_t limit);

/// Splits every section into parents, and every parent into children.
/// Text never crosses a section boundary.
///
/// IDs: parent "<program_id>/<topic_id>/p<n>", child "<parent_id>/c<m>".
ChunkedDocument chunk_document(const StudyProgramDoc& doc, ChunkLimits limits = {});

}  // namespace ragforge
