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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ragforge/corpus.hpp"
#include "ragforge/evaluate.hpp"
#include "ragforge/generate.hpp"
#include "ragforge/index_bundle.hpp"
#include "ragforge/retrieve.hpp"

namespace ragforge {

enum class EndpointKind { mock, openai, ollama };

std::string_view to_string(EndpointKind kind);
EndpointKind parse_endpoint_kind(std::string_view value);

struct EndpointConfig {
    EndpointKind kind = EndpointKind::mock;
    std::string url;
    std::string model = std::string(MockChatEndpoint::kModelId);
    std::chrono::milliseconds timeout{60000};
};

struct ModelConfig {
    std::string name;  // label used in results and reports
    EndpointConfig endpoint;
};

enum class EmbedderKind { fallback, sidecar };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::fallback;
    std::string url;
    std::size_t dim = HashingEmbedder::kDefaultDim;  // sidecar: 0 asks the service
    std::size_t batch_size = 64;
};

/// Module toggles named by a config string such as "mq-cpr-icl".
struct Toggles {
    bool multi_query = false;
    bool child_parent = false;
    bool icl = false;
    bool ensemble = false;

    friend bool operator==(const Toggles&, const Toggles&) = default;
};

/// Dash-separated parts from {mq, cpr, icl, er} in any order, each at most
/// once; "base" names the all-off combination.
Toggles parse_config_name(std::string_view name);

/// Canonical name: parts in the order mq, cpr, icl, er.
std::string config_name(const Toggles& toggles);

struct ExperimentConfig {
    std::string name;  // config name, e.g. "mq-er"
    Toggles toggles;
    RetrieverConfig retriever;
    GenerationConfig generation;
    Language language = Language::en;
    ModelConfig generator;
    EndpointConfig judge;
    EmbedderConfig embedder;
    bool judge_enabled = true;
    std::vector<Feature> judge_features{kAllFeatures.begin(), kAllFeatures.end()};
    bool bertscore = true;
    std::optional<std::vector<std::string>> qa_subset;
    std::size_t sample_size = 0;  // 0 keeps every selected item
    std::uint64_t seed = 0;
    std::size_t concurrency = 4;

    /// "<model>/<language>/<name>", unique within a grid.
    std::string id() const;
    /// Stable hash of every setting that influences results.
    std::string fingerprint() const;
};

struct ProjectConfig {
    std::filesystem::path corpus;
    std::filesystem::path qa;
    std::filesystem::path index_dir = "index";
    std::filesystem::path out_dir = "results";
    std::filesystem::path exemplars;         // empty: built-in exemplars
    std::filesystem::path human_ratings;     // optional
    std::filesystem::path mock_rephrasings;  // optional {"question": ["line", ...]}

    EmbedderConfig embedder;
    IndexOptions index;
    RetrieverConfig retriever;
    GenerationConfig generation;

    EndpointConfig judge;
    bool judge_enabled = true;
    std::vector<Feature> judge_features{kAllFeatures.begin(), kAllFeatures.end()};
    int threshold = 5;

    std::vector<ModelConfig> models{{"mock", {}}};
    std::vector<std::string> configs{"er"};
    std::vector<Language> languages{Language::en, Language::de};

    std::optional<std::vector<std::string>> qa_subset;
    std::size_t sample_size = 0;
    std::uint64_t seed = 0;
    std::size_t concurrency = 4;
    bool bertscore = true;
};

/// Relative paths resolve against `base_dir`. Unknown keys are ConfigErrors.
ProjectConfig parse_project_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                   std::string_view source_name = "config");
ProjectConfig load_project_config(const std::filesystem::path& path);

/// Points every chat endpoint at the mock and the embedder at the fallback.
void force_mock(ProjectConfig& config);

ExperimentConfig make_experiment(const ProjectConfig& config, std::string_view config_name, Language language,
                                 const ModelConfig& model);

/// models x languages x configs, in that nesting order. Throws ConfigError
/// when two config names map to the same toggles.
std::vector<ExperimentConfig> expand_grid(const ProjectConfig& config);

/// Picks exactly three exemplars: the first three, or a seeded sample in
/// file order when more are given.
std::vector<QaExemplar> select_exemplars(std::span<const QaExemplar> pool, std::uint64_t seed);

}  // namespace ragforge
