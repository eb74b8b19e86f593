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

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ragforge/config.hpp"
#include "ragforge/evaluate.hpp"
#include "ragforge/generate.hpp"
#include "ragforge/retrieve.hpp"

namespace ragforge {

struct FeatureScore {
    Feature feature = Feature::faithfulness;
    std::optional<int> score;  // nullopt: judge unavailable for this item
    std::string error;

    friend bool operator==(const FeatureScore&, const FeatureScore&) = default;
};

/// One line of the results file.
struct ResultRecord {
    std::string experiment;  // ExperimentConfig::id()
    std::string model;
    std::string language;
    std::string config;
    std::size_t run = 1;
    std::uint64_t seed = 0;
    std::string prompt_version;

    std::string qa_id;
    std::string question;
    std::string reference_answer;
    std::string gold_program_id;
    std::string gold_topic_id;

    GeneratedAnswer answer;
    bool hit = false;
    std::optional<std::string> predicted_program;
    std::optional<std::string> predicted_topic;
    std::vector<std::string> queries;
    std::vector<std::string> trace;

    Prf rouge;
    std::optional<Prf> bertscore;
    std::string bertscore_error;
    std::vector<FeatureScore> judge;

    std::string started_at;
    std::string finished_at;
};

nlohmann::json to_json(const ResultRecord& record);
ResultRecord record_from_json(const nlohmann::json& value);

/// Reads a JSONL results file; a missing file gives no records.
std::vector<ResultRecord> load_results(const std::filesystem::path& path);
void append_results(const std::filesystem::path& path, std::span<const ResultRecord> records);

/// Records of the highest run number per experiment.
std::vector<ResultRecord> latest_runs(std::span<const ResultRecord> records);

/// One past the highest run already recorded for `experiment` in `path`.
std::size_t next_run_number(const std::filesystem::path& path, std::string_view experiment);

struct RunOptions {
    bool deterministic = false;  // fixed timestamps and zero latency
};

/// Everything an experiment reads; all members outlive the run.
struct ExperimentResources {
    const IndexBundle& index;
    const EmbeddingProvider& provider;
    const ChatEndpoint& generator;
    const ChatEndpoint& judge;
    const PrefilterCatalog* catalog = nullptr;
    RetryPolicy retry;
};

/// Items of the experiment's language, narrowed to qa_subset (file order)
/// and then to a seeded sample of sample_size.
std::vector<QAItem> select_items(const ExperimentConfig& cfg, std::span<const QAItem> qa);

/// Retrieval, generation and metrics for each item. Item failures are
/// recorded and never abort the run; records come back in item order.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, std::span<const QAItem> items,
                                         const ExperimentResources& resources, const RunOptions& options = {},
                                         std::size_t run_number = 1);

// --- wiring from configuration ---------------------------------------------

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config);
std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointConfig& config, const MockOptions& mock = {});

/// {"question": ["rephrasing", ...]} used by the mock multi-query step.
std::map<std::string, std::vector<std::string>> load_mock_rephrasings(const std::filesystem::path& path);

std::filesystem::path index_path(const ProjectConfig& config, Language language);

/// Loads the index for one language; a missing index is a ConfigError that
/// names the `index` command.
IndexBundle load_language_index(const ProjectConfig& config, Language language);

/// Builds and saves one index per configured language.
void build_indices(const ProjectConfig& config, const Corpus& corpus, const EmbeddingProvider& provider);

struct GridSummary {
    std::size_t experiments = 0;
    std::size_t records = 0;
    std::filesystem::path results;
};

/// Runs the experiments sequentially and appends their records to
/// <out_dir>/results.jsonl.
GridSummary run_grid(const ProjectConfig& config, std::span<const ExperimentConfig> experiments,
                     std::span<const QAItem> qa, const RunOptions& options = {});

}  // namespace ragforge
