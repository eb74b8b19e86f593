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

#include <string>
#include <utility>
#include <vector>

// Brute-force reference implementations. They share no code with the engine
// beyond plain containers, so agreement is meaningful.
namespace ragforge::oracle {

using Doc = std::vector<std::string>;

/// Okapi BM25 recomputed from raw token lists on every call.
double bm25(const std::vector<Doc>& docs, std::size_t doc, const std::vector<std::string>& query, double k1 = 1.2,
            double b = 0.75);

using Ranking = std::vector<std::pair<std::string, double>>;

/// Weighted reciprocal rank fusion by linear search over every input list.
Ranking rrf(const std::vector<std::vector<std::string>>& lists, const std::vector<double>& weights, int k);

/// Longest common subsequence by the textbook quadratic table.
std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Sort (id, score) pairs by descending score, ascending id.
void sort_ranking(Ranking& ranking);

}  // namespace ragforge::oracle
