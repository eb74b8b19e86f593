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

#include "ragforge/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "ragforge/error.hpp"
#include "ragforge/prompts.hpp"
#include "ragforge/text.hpp"

namespace ragforge {

using nlohmann::json;

// --- serialization ---------------------------------------------------------

namespace {

json prf_json(const Prf& prf) {
    return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

Prf prf_from(const json& value) {
    return {value.at("precision").get<double>(), value.at("recall").get<double>(), value.at("f1").get<double>()};
}

json optional_string(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

std::optional<std::string> optional_string_from(const json& value) {
    return value.is_null() ? std::nullopt : std::optional<std::string>(value.get<std::string>());
}

}  // namespace

json to_json(const ResultRecord& record) {
    json retrieved = json::array();
    for (const auto& entry : record.answer.retrieved.entries) {
        retrieved.push_back({{"chunk_id", entry.chunk_id}, {"score", entry.score}});
    }
    json judge = json::object();
    json judge_errors = json::object();
    for (const auto& item : record.judge) {
        const std::string feature(to_string(item.feature));
        judge[feature] = item.score ? json(*item.score) : json(nullptr);
        if (!item.error.empty()) {
            judge_errors[feature] = item.error;
        }
    }
    return {
        {"experiment", record.experiment},
        {"model", record.model},
        {"language", record.language},
        {"config", record.config},
        {"run", record.run},
        {"seed", record.seed},
        {"prompt_version", record.prompt_version},
        {"config_fingerprint", record.answer.config_fingerprint},
        {"qa_id", record.qa_id},
        {"question", record.question},
        {"reference_answer", record.reference_answer},
        {"gold_program_id", record.gold_program_id},
        {"gold_topic_id", record.gold_topic_id},
        {"model_id", record.answer.model_id},
        {"answer", record.answer.answer_text},
        {"error", record.answer.error},
        {"retrieved", retrieved},
        {"retrieved_source", to_string(record.answer.retrieved.source)},
        {"match", record.answer.match},
        {"hit", record.hit},
        {"predicted_program", optional_string(record.predicted_program)},
        {"predicted_topic", optional_string(record.predicted_topic)},
        {"queries", record.queries},
        {"trace", record.trace},
        {"rouge_l", prf_json(record.rouge)},
        {"bertscore", record.bertscore ? prf_json(*record.bertscore) : json(nullptr)},
        {"bertscore_error", record.bertscore_error},
        {"judge", judge},
        {"judge_errors", judge_errors},
        {"latency_ms", record.answer.latency_ms},
        {"started_at", record.started_at},
        {"finished_at", record.finished_at},
    };
}

namespace {

RankSource parse_source(std::string_view value) {
    for (const auto source : {RankSource::bm25, RankSource::dense, RankSource::fused, RankSource::multi_query,
                              RankSource::child_parent}) {
        if (to_string(source) == value) {
            return source;
        }
    }
    throw SchemaError("unknown retrieved_source '" + std::string(value) + "'");
}

}  // namespace

ResultRecord record_from_json(const json& value) {
    ResultRecord record;
    try {
        record.experiment = value.at("experiment").get<std::string>();
        record.model = value.at("model").get<std::string>();
        record.language = value.at("language").get<std::string>();
        record.config = value.at("config").get<std::string>();
        record.run = value.at("run").get<std::size_t>();
        record.seed = value.at("seed").get<std::uint64_t>();
        record.prompt_version = value.at("prompt_version").get<std::string>();
        record.qa_id = value.at("qa_id").get<std::string>();
        record.question = value.at("question").get<std::string>();
        record.reference_answer = value.at("reference_answer").get<std::string>();
        record.gold_program_id = value.at("gold_program_id").get<std::string>();
        record.gold_topic_id = value.at("gold_topic_id").get<std::string>();
        auto& answer = record.answer;
        answer.qa_id = record.qa_id;
        answer.config_fingerprint = value.at("config_fingerprint").get<std::string>();
        answer.model_id = value.at("model_id").get<std::string>();
        answer.answer_text = value.at("answer").get<std::string>();
        answer.error = value.at("error").get<std::string>();
        for (const auto& entry : value.at("retrieved")) {
            answer.retrieved.entries.push_back({entry.at("chunk_id").get<std::string>(), entry.at("score").get<double>()});
        }
        answer.retrieved.source = parse_source(value.at("retrieved_source").get<std::string>());
        answer.match = value.at("match").get<bool>();
        answer.latency_ms = value.at("latency_ms").get<double>();
        record.hit = value.at("hit").get<bool>();
        record.predicted_program = optional_string_from(value.at("predicted_program"));
        record.predicted_topic = optional_string_from(value.at("predicted_topic"));
        record.queries = value.at("queries").get<std::vector<std::string>>();
        record.trace = value.at("trace").get<std::vector<std::string>>();
        record.rouge = prf_from(value.at("rouge_l"));
        if (!value.at("bertscore").is_null()) {
            record.bertscore = prf_from(value.at("bertscore"));
        }
        record.bertscore_error = value.at("bertscore_error").get<std::string>();
        const auto& errors = value.at("judge_errors");
        for (const auto& [feature, score] : value.at("judge").items()) {
            FeatureScore item;
            item.feature = parse_feature(feature);
            if (!score.is_null()) {
                item.score = score.get<int>();
            }
            if (errors.contains(feature)) {
                item.error = errors.at(feature).get<std::string>();
            }
            record.judge.push_back(std::move(item));
        }
        // Keep the judge list in the fixed feature order regardless of key order on disk.
        std::sort(record.judge.begin(), record.judge.end(), [](const FeatureScore& a, const FeatureScore& b) {
            const auto rank = [](Feature f) {
                return std::find(kAllFeatures.begin(), kAllFeatures.end(), f) - kAllFeatures.begin();
            };
            return rank(a.feature) < rank(b.feature);
        });
        record.started_at = value.at("started_at").get<std::string>();
        record.finished_at = value.at("finished_at").get<std::string>();
    } catch (const json::exception& e) {
        throw SchemaError("result record: " + std::string(e.what()));
    }
    return record;
}

std::vector<ResultRecord> load_results(const std::filesystem::path& path) {
    std::vector<ResultRecord> out;
    if (!std::filesystem::exists(path)) {
        return out;
    }
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot read " + path.string());
    }
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

void append_results(const std::filesystem::path& path, std::span<const ResultRecord> records) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    for (const auto& record : records) {
        out << to_json(record).dump() << '\n';
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

std::vector<ResultRecord> latest_runs(std::span<const ResultRecord> records) {
    std::map<std::string, std::size_t> latest;
    for (const auto& record : records) {
        auto& run = latest[record.experiment];
        run = std::max(run, record.run);
    }
    std::vector<ResultRecord> out;
    for (const auto& record : records) {
        if (record.run == latest[record.experiment]) {
            out.push_back(record);
        }
    }
    return out;
}

std::size_t next_run_number(const std::filesystem::path& path, std::string_view experiment) {
    std::size_t highest = 0;
    for (const auto& record : load_results(path)) {
        if (record.experiment == experiment) {
            highest = std::max(highest, record.run);
        }
    }
    return highest + 1;
}

// --- running ---------------------------------------------------------------

std::vector<QAItem> select_items(const ExperimentConfig& cfg, std::span<const QAItem> qa) {
    std::vector<QAItem> items;
    for (const auto& item : qa) {
        if (item.language == cfg.language) {
            items.push_back(item);
        }
    }
    if (cfg.qa_subset) {
        const std::set<std::string> wanted(cfg.qa_subset->begin(), cfg.qa_subset->end());
        std::set<std::string> known;
        for (const auto& item : qa) {
            known.insert(item.qa_id);
        }
        std::string unknown;
        for (const auto& id : wanted) {
            if (!known.contains(id)) {
                unknown += (unknown.empty() ? "" : ", ") + id;
            }
        }
        if (!unknown.empty()) {
            throw ConfigError("qa_subset names unknown qa_ids: " + unknown);
        }
        std::erase_if(items, [&](const QAItem& item) { return !wanted.contains(item.qa_id); });
    }
    if (cfg.sample_size > 0 && cfg.sample_size < items.size()) {
        std::vector<std::size_t> order(items.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(cfg.seed);
        for (std::size_t i = 0; i < cfg.sample_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
            std::swap(order[i], order[j]);
        }
        order.resize(cfg.sample_size);
        std::sort(order.begin(), order.end());
        std::vector<QAItem> sampled;
        for (const auto i : order) {
            sampled.push_back(items[i]);
        }
        items = std::move(sampled);
    }
    return items;
}

namespace {

std::string timestamp(bool deterministic) {
    const auto now = deterministic ? std::time_t{0} : std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

bool gold_in(const RankedList& ranked, const QAItem& item, const IndexBundle& index) {
    for (const auto& entry : ranked.entries) {
        const auto location = index.locate(entry.chunk_id);
        if (location && location->program_id == item.gold_program_id && location->topic_id == item.gold_topic_id) {
            return true;
        }
    }
    return false;
}

ResultRecord run_item(const ExperimentConfig& cfg, const QAItem& item, const ExperimentResources& res,
                      const RunOptions& options, std::size_t run_number, const std::string& fingerprint) {
    ResultRecord record;
    record.experiment = cfg.id();
    record.model = cfg.generator.name;
    record.language = std::string(to_string(cfg.language));
    record.config = cfg.name;
    record.run = run_number;
    record.seed = cfg.seed;
    record.prompt_version = std::string(prompts::kPromptVersion);
    record.qa_id = item.qa_id;
    record.question = item.question;
    record.reference_answer = item.reference_answer;
    record.gold_program_id = item.gold_program_id;
    record.gold_topic_id = item.gold_topic_id;
    record.answer.qa_id = item.qa_id;
    record.answer.model_id = cfg.generation.model_id;
    record.answer.config_fingerprint = fingerprint;
    record.started_at = timestamp(options.deterministic);
    const auto clock_start = std::chrono::steady_clock::now();

    const CompletionOptions completion{cfg.generation.model_id, cfg.generation.temperature};
    const PipelineContext ctx{res.index, res.provider, res.generator, res.catalog, completion, res.retry};
    bool retrieved = false;
    try {
        auto pipeline = retrieve_pipeline(item.question, cfg.retriever, ctx);
        record.answer.retrieved = std::move(pipeline.ranked);
        record.predicted_program = std::move(pipeline.program_id);
        record.predicted_topic = std::move(pipeline.topic_id);
        record.queries = std::move(pipeline.queries);
        record.trace = std::move(pipeline.trace);
        retrieved = true;
    } catch (const Error& e) {
        record.answer.error = e.what();
        spdlog::warn("{} {}: {}", record.experiment, item.qa_id, e.what());
    }
    record.answer.match = gold_in(record.answer.retrieved, item, res.index);
    const ChunkLocator locate = [&](std::string_view id) { return res.index.locate(id); };
    record.hit = is_hit(record.answer.retrieved, item.gold_program_id, item.gold_topic_id, locate, 5);

    std::string context_text;
    if (retrieved) {
        try {
            auto context = context_for(record.answer.retrieved, res.index);
            if (context.size() > cfg.generation.max_context_chunks) {
                context.resize(cfg.generation.max_context_chunks);
            }
            context_text = render_context(context);
            const auto messages = build_prompt(item.question, context, cfg.generation);
            record.answer.answer_text = complete(res.generator, messages, completion, res.retry);
        } catch (const Error& e) {
            record.answer.answer_text.clear();
            record.answer.error = std::string("generate: ") + e.what();
            spdlog::warn("{} {}: {}", record.experiment, item.qa_id, record.answer.error);
        }
    }
    const auto& answer = record.answer.answer_text;

    record.rouge = rouge_l(answer, item.reference_answer);
    if (cfg.bertscore) {
        try {
            record.bertscore = bertscore_greedy(answer, item.reference_answer, res.provider);
        } catch (const Error& e) {
            record.bertscore_error = e.what();
        }
    }
    if (cfg.judge_enabled) {
        const JudgeRequest request{item.qa_id, item.question, answer, context_text, item.reference_answer,
                                   record.answer.match};
        const CompletionOptions judge_options{cfg.judge.model, 0.0};
        for (const auto feature : cfg.judge_features) {
            FeatureScore score{feature, std::nullopt, {}};
            if (text::trim(answer).empty()) {
                score.error = "no answer to judge";
            } else {
                try {
                    score.score = judge_answer(request, feature, res.judge, judge_options, res.retry).score;
                } catch (const Error& e) {
                    score.error = e.what();
                }
            }
            record.judge.push_back(std::move(score));
        }
    }

    record.finished_at = timestamp(options.deterministic);
    record.answer.latency_ms =
        options.deterministic
            ? 0.0
            : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - clock_start).count();
    return record;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, std::span<const QAItem> items,
                                         const ExperimentResources& resources, const RunOptions& options,
                                         std::size_t run_number) {
    cfg.retriever.validate();
    cfg.generation.validate();
    resources.index.require_provider(resources.provider.id());
    const auto fingerprint = cfg.fingerprint();
    std::vector<ResultRecord> records(items.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            records[i] = run_item(cfg, items[i], resources, options, run_number, fingerprint);
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(cfg.concurrency, 1), items.size());
    if (threads <= 1) {
        worker();
        return records;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    pool.clear();
    return records;
}

// --- wiring ----------------------------------------------------------------

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config) {
    if (config.kind == EmbedderKind::fallback) {
        return std::make_unique<HashingEmbedder>(config.dim);
    }
    SidecarOptions options;
    options.url = config.url;
    options.dim = config.dim;
    options.batch_size = config.batch_size;
    return std::make_unique<SidecarEmbedder>(std::move(options));
}

std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointConfig& config, const MockOptions& mock) {
    switch (config.kind) {
        case EndpointKind::mock:
            return std::make_unique<MockChatEndpoint>(mock);
        case EndpointKind::openai:
            return std::make_unique<OpenAiChatEndpoint>(config.url, api_key_from_env(), config.timeout);
        case EndpointKind::ollama:
            return std::make_unique<OllamaChatEndpoint>(config.url, config.timeout);
    }
    throw ConfigError("unknown endpoint kind");
}

std::map<std::string, std::vector<std::string>> load_mock_rephrasings(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path)).get<std::map<std::string, std::vector<std::string>>>();
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": expected {\"question\": [\"rephrasing\", ...]}: " + e.what());
    }
}

std::filesystem::path index_path(const ProjectConfig& config, Language language) {
    return config.index_dir / std::string(to_string(language));
}

IndexBundle load_language_index(const ProjectConfig& config, Language language) {
    const auto dir = index_path(config, language);
    if (!std::filesystem::exists(dir / "meta.json")) {
        throw ConfigError("no index for language '" + std::string(to_string(language)) + "' at " + dir.string() +
                          "; build it first with `ragforge index --config <file>`");
    }
    return IndexBundle::load(dir);
}

void build_indices(const ProjectConfig& config, const Corpus& corpus, const EmbeddingProvider& provider) {
    for (const auto language : config.languages) {
        const auto subset = corpus.filter(language);
        if (subset.empty()) {
            spdlog::warn("corpus has no '{}' programs; skipping that index", to_string(language));
            continue;
        }
        const auto bundle = IndexBundle::build(subset, provider, config.index);
        bundle.save(index_path(config, language));
        spdlog::info("indexed {} '{}' programs: {} parent and {} child chunks -> {}", subset.size(),
                     to_string(language), bundle.parents().size(), bundle.children().size(),
                     index_path(config, language).string());
    }
}

GridSummary run_grid(const ProjectConfig& config, std::span<const ExperimentConfig> experiments,
                     std::span<const QAItem> qa, const RunOptions& options) {
    GridSummary summary;
    summary.results = config.out_dir / "results.jsonl";
    const auto provider = make_embedder(config.embedder);
    std::map<std::string, std::vector<std::string>> rephrasings;
    if (!config.mock_rephrasings.empty()) {
        rephrasings = load_mock_rephrasings(config.mock_rephrasings);
    }

    struct LanguageState {
        IndexBundle index;
        std::unique_ptr<PrefilterCatalog> catalog;
        MockOptions mock;
    };
    std::map<Language, std::unique_ptr<LanguageState>> states;
    const auto state_for = [&](Language language) -> LanguageState& {
        auto& slot = states[language];
        if (!slot) {
            slot = std::make_unique<LanguageState>(LanguageState{load_language_index(config, language), nullptr, {}});
            slot->index.require_provider(provider->id());
            for (const auto& program : slot->index.programs()) {
                slot->mock.program_names.push_back(program.name);
            }
            slot->mock.rephrasings = rephrasings;
        }
        return *slot;
    };

    for (const auto& experiment : experiments) {
        auto& state = state_for(experiment.language);
        if (experiment.retriever.prefilter != PrefilterMode::off && !state.catalog) {
            state.catalog = std::make_unique<PrefilterCatalog>(state.index, *provider);
        }
        const auto generator = make_endpoint(experiment.generator.endpoint, state.mock);
        const auto judge = make_endpoint(experiment.judge, state.mock);
        const ExperimentResources resources{state.index, *provider, *generator, *judge, state.catalog.get(), {}};
        const auto items = select_items(experiment, qa);
        const auto run = next_run_number(summary.results, experiment.id());
        spdlog::info("running {} on {} items (run {})", experiment.id(), items.size(), run);
        const auto records = run_experiment(experiment, items, resources, options, run);
        append_results(summary.results, records);
        ++summary.experiments;
        summary.records += records.size();
    }
    return summary;
}

}  // namespace ragforge
