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

#include "oracles.hpp"
#include "ragforge/bm25.hpp"
#include "ragforge/error.hpp"
#include "ragforge/text.hpp"

using namespace ragforge;

namespace {

Bm25Index toy() {
    Bm25Index index;
    index.add("d0", "the cat sat on the mat");
    index.add("d1", "the dog chased the cat and the cat ran");
    index.add("d2", "a bird sang");
    return index;
}

const std::vector<std::string> kCat{"cat"};

}  // namespace

TEST_CASE("toy corpus scores match the reference computation") {
    // Reference values from tests/oracles/oracle_values.py.
    const auto index = toy();
    CHECK(index.score(kCat, "d0") == doctest::Approx(0.21363801329351617).epsilon(1e-12));
    CHECK(index.score(kCat, "d1") == doctest::Approx(0.25753623520314284).epsilon(1e-12));
    CHECK(index.score(kCat, "d2") == 0.0);
    const std::vector<std::string> cat_dog{"cat", "dog"};
    CHECK(index.score(cat_dog, "d1") == doctest::Approx(0.6276604816226622).epsilon(1e-12));
}

TEST_CASE("idf, lengths and document frequency") {
    const auto index = toy();
    CHECK(index.size() == 3);
    CHECK(index.idf("cat") == doctest::Approx(std::log(1.6)).epsilon(1e-12));
    CHECK(index.idf("unseen") == doctest::Approx(std::log(1.0 + 3.5 / 0.5)).epsilon(1e-12));
    CHECK(index.document_frequency("the") == 2);
    CHECK(index.document_frequency("unseen") == 0);
    CHECK(index.doc_length("d1") == 9);
    CHECK(index.avg_doc_length() == doctest::Approx(18.0 / 3.0));
    CHECK_THROWS_AS(index.doc_length("dx"), ArgumentError);
}

TEST_CASE("repeated query terms count with multiplicity") {
    const auto index = toy();
    const std::vector<std::string> twice{"cat", "cat"};
    CHECK(index.score(twice, "d0") == doctest::Approx(2 * index.score(kCat, "d0")).epsilon(1e-12));
    const auto ranked = index.search_terms(twice, 5);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked.entries[0].score == doctest::Approx(2 * index.score(kCat, "d1")).epsilon(1e-12));
}

TEST_CASE("search ranks matching chunks only, best first") {
    const auto index = toy();
    const auto ranked = index.search("Cat?", 10);
    CHECK(ranked.source == RankSource::bm25);
    CHECK(ranked.ids() == std::vector<std::string>{"d1", "d0"});
    CHECK(index.search("cat", 1).ids() == std::vector<std::string>{"d1"});
    CHECK(index.search("zebra", 10).empty());
    CHECK(index.search("cat", 10, [](std::string_view id) { return id != "d1"; }).ids() ==
          std::vector<std::string>{"d0"});
    CHECK_THROWS_AS(index.search("cat", 0), ArgumentError);
}

TEST_CASE("equal scores are ordered by chunk id") {
    Bm25Index index;
    index.add("b", "same words");
    index.add("a", "same words");
    index.add("c", "other text");
    CHECK(index.search("same", 5).ids() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("empty index and empty documents") {
    Bm25Index empty;
    CHECK(empty.search("anything", 3).empty());
    Bm25Index index;
    index.add("blank", "?!");
    index.add("word", "word");
    CHECK(index.doc_length("blank") == 0);
    CHECK(index.search("word", 3).ids() == std::vector<std::string>{"word"});
}

TEST_CASE("duplicate chunk ids and bad parameters are rejected") {
    auto index = toy();
    CHECK_THROWS_AS(index.add("d0", "again"), ArgumentError);
    CHECK_THROWS_AS(Bm25Index({-1.0, 0.5}), ArgumentError);
    CHECK_THROWS_AS(Bm25Index({1.2, 1.5}), ArgumentError);
}

TEST_CASE("other parameters agree with the oracle") {
    const std::vector<oracle::Doc> docs{{"a", "b", "a"}, {"b", "c"}, {"a", "c", "c", "c"}};
    for (const auto params : {Bm25Params{0.0, 0.0}, Bm25Params{2.0, 1.0}, Bm25Params{1.5, 0.3}}) {
        Bm25Index index(params);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            index.add_terms("d" + std::to_string(i), docs[i]);
        }
        const std::vector<std::string> query{"a", "c", "a"};
        for (std::size_t i = 0; i < docs.size(); ++i) {
            CHECK(index.score(query, "d" + std::to_string(i)) ==
                  doctest::Approx(oracle::bm25(docs, i, query, params.k1, params.b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("from_tables rebuilds an identical index and validates") {
    const auto index = toy();
    const auto copy = Bm25Index::from_tables(index.params(), index.chunk_ids(), index.doc_lengths(), index.postings());
    for (const char* id : {"d0", "d1", "d2"}) {
        CHECK(copy.score(kCat, id) == index.score(kCat, id));
    }
    auto lengths = index.doc_lengths();
    lengths.pop_back();
    CHECK_THROWS_AS(Bm25Index::from_tables(index.params(), index.chunk_ids(), lengths, index.postings()), FormatError);
    auto postings = index.postings();
    postings["cat"].push_back({7, 1});
    CHECK_THROWS_AS(Bm25Index::from_tables(index.params(), index.chunk_ids(), index.doc_lengths(), postings),
                    FormatError);
}
