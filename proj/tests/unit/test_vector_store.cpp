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

#include <cmath>
#include <limits>

#include "ragforge/error.hpp"
#include "ragforge/vector_store.hpp"

using namespace ragforge;

TEST_CASE("search ranks by cosine with id tie-break") {
    VectorStore store("test", 2);
    store.add("x", std::vector<float>{1, 0});
    store.add("y", std::vector<float>{0, 1});
    store.add("a", std::vector<float>{1, 0});
    store.add("d", std::vector<float>{1, 1});
    const auto ranked = store.search(std::vector<float>{2, 0}, 10);
    CHECK(ranked.source == RankSource::dense);
    CHECK(ranked.ids() == std::vector<std::string>{"a", "x", "d", "y"});
    CHECK(ranked.entries[0].score == doctest::Approx(1.0));
    CHECK(ranked.entries[2].score == doctest::Approx(std::sqrt(0.5)));
    CHECK(store.search(std::vector<float>{2, 0}, 2).ids() == std::vector<std::string>{"a", "x"});
}

TEST_CASE("filter restricts the candidates") {
    VectorStore store("test", 2);
    store.add("keep", std::vector<float>{0, 1});
    store.add("drop", std::vector<float>{1, 0});
    const auto ranked = store.search(std::vector<float>{1, 0}, 5, [](std::string_view id) { return id == "keep"; });
    CHECK(ranked.ids() == std::vector<std::string>{"keep"});
}

TEST_CASE("rows are stored in insertion order") {
    VectorStore store("test", 3);
    store.add("first", std::vector<float>{1, 2, 3});
    store.add("second", std::vector<float>{4, 5, 6});
    CHECK(store.size() == 2);
    CHECK(store.chunk_ids() == std::vector<std::string>{"first", "second"});
    CHECK(store.data() == std::vector<float>{1, 2, 3, 4, 5, 6});
    CHECK(store.vector("second")[1] == 5.0f);
    CHECK(store.vector(0)[2] == 3.0f);
    CHECK_THROWS_AS(store.vector("third"), ArgumentError);
}

TEST_CASE("invalid vectors are rejected") {
    VectorStore store("test", 2);
    CHECK_THROWS_AS(store.add("short", std::vector<float>{1}), ArgumentError);
    CHECK_THROWS_AS(store.add("nan", std::vector<float>{1, std::numeric_limits<float>::quiet_NaN()}), ArgumentError);
    store.add("ok", std::vector<float>{1, 1});
    CHECK_THROWS_AS(store.add("ok", std::vector<float>{1, 1}), ArgumentError);
    CHECK_THROWS_AS(store.search(std::vector<float>{1, 1}, 0), ArgumentError);
    CHECK_THROWS_AS(store.search(std::vector<float>{1, 1, 1}, 1), ArgumentError);
    CHECK_THROWS_AS(VectorStore("test", 0), ArgumentError);
}

TEST_CASE("empty store returns nothing") {
    VectorStore store("test", 2);
    CHECK(store.search(std::vector<float>{1, 0}, 3).empty());
}
