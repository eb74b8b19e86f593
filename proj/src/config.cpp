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

#include "ragforge/config.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "ragforge/error.hpp"
#include "ragforge/prompts.hpp"

namespace ragforge {

using nlohmann::json;

std::string_view to_string(EndpointKind kind) {
    switch (kind) {
        case EndpointKind::mock:
            return "mock";
        case EndpointKind::openai:
            return "openai";
        case EndpointKind::ollama:
            return "ollama";
    }
    return "mock";
}

EndpointKind parse_endpoint_kind(std::string_view value) {
    if (value == "mock") {
        return EndpointKind::mock;
    }
    if (value == "openai") {
        return EndpointKind::openai;
    }
    if (value == "ollama") {
        return EndpointKind::ollama;
    }
    throw ConfigError("unknown endpoint kind '" + std::string(value) + "' (expected mock, openai or ollama)");
}

Toggles parse_config_name(std::string_view name) {
    Toggles toggles;
    if (name == "base") {
        return toggles;
    }
    if (name.empty()) {
        throw ConfigError("empty config name");
    }
    std::set<std::string_view> seen;
    while (true) {
        const auto dash = name.find('-');
        const auto part = name.substr(0, dash);
        if (!seen.insert(part).second) {
            throw ConfigError("config name repeats '" + std::string(part) + "'");
        }
        if (part == "mq") {
            toggles.multi_query = true;
        } else if (part == "cpr") {
            toggles.child_parent = true;
        } else if (part == "icl") {
            toggles.icl = true;
        } else if (part == "er") {
            toggles.ensemble = true;
        } else {
            throw ConfigError("unknown module '" + std::string(part) + "' in config name (expected mq, cpr, icl, er)");
        }
        if (dash == std::string_view::npos) {
            break;
        }
        name.remove_prefix(dash + 1);
    }
    return toggles;
}

std::string config_name(const Toggles& toggles) {
    std::vector<std::string> parts;
    if (toggles.multi_query) {
        parts.emplace_back("mq");
    }
    if (toggles.child_parent) {
        parts.emplace_back("cpr");
    }
    if (toggles.icl) {
        parts.emplace_back("icl");
    }
    if (toggles.ensemble) {
        parts.emplace_back("er");
    }
    if (parts.empty()) {
        return "base";
    }
    std::string out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        out += "-" + parts[i];
    }
    return out;
}

std::string ExperimentConfig::id() const {
    return generator.name + "/" + std::string(to_string(language)) + "/" + name;
}

std::string ExperimentConfig::fingerprint() const {
    json features = json::array();
    for (const auto feature : judge_features) {
        features.push_back(to_string(feature));
    }
    json exemplars = json::array();
    if (generation.use_icl) {
        for (const auto& exemplar : generation.icl_exemplars) {
            exemplars.push_back({exemplar.question, exemplar.answer});
        }
    }
    const json canonical = {
        {"prompt_version", prompts::kPromptVersion},
        {"toggles", config_name(toggles)},
        {"retriever",
         {retriever.w_bm25, retriever.w_dense, retriever.rrf_k, retriever.top_k, retriever.fetch_k,
          retriever.num_rephrasings, to_string(retriever.prefilter)}},
        {"generation", {generation.model_id, generation.temperature, generation.max_context_chunks, exemplars}},
        {"generator", {to_string(generator.endpoint.kind), generator.endpoint.url, generator.endpoint.model}},
        {"judge", {judge_enabled, to_string(judge.kind), judge.url, judge.model, features}},
        {"embedder", {embedder.kind == EmbedderKind::fallback ? "fallback" : "sidecar", embedder.url, embedder.dim}},
        {"bertscore", bertscore},
        {"language", to_string(language)},
    };
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(stable_hash(canonical.dump())));
    return buffer;
}

// --- TOML ------------------------------------------------------------------

namespace {

class Reader {
public:
    Reader(const toml::table& root, std::string source) : root_(root), source_(std::move(source)) {}

    const toml::table* table(std::string_view name, std::initializer_list<std::string_view> keys) const {
        const auto* node = root_.get(name);
        if (!node) {
            return nullptr;
        }
        const auto* tbl = node->as_table();
        if (!tbl) {
            fail(std::string(name), "expected a table");
        }
        check_keys(*tbl, std::string(name), keys);
        return tbl;
    }

    void check_keys(const toml::table& tbl, const std::string& where,
                    std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, value] : tbl) {
            if (std::find(keys.begin(), keys.end(), key.str()) == keys.end()) {
                fail(where + "." + std::string(key.str()), "unknown key");
            }
        }
    }

    template <typename T>
    void get(const toml::table* tbl, const std::string& where, std::string_view key, T& out) const {
        if (!tbl) {
            return;
        }
        const auto* node = tbl->get(key);
        if (!node) {
            return;
        }
        const auto name = where + "." + std::string(key);
        if constexpr (std::is_same_v<T, bool>) {
            const auto value = node->value<bool>();
            if (!value) {
                fail(name, "expected a boolean");
            }
            out = *value;
        } else if constexpr (std::is_same_v<T, double>) {
            const auto value = node->value<double>();
            if (!value) {
                fail(name, "expected a number");
            }
            out = *value;
        } else if constexpr (std::is_integral_v<T>) {
            const auto value = node->value<std::int64_t>();
            if (!value || !node->is_integer()) {
                fail(name, "expected an integer");
            }
            if (*value < 0 && std::is_unsigned_v<T>) {
                fail(name, "must not be negative");
            }
            out = static_cast<T>(*value);
        } else if constexpr (std::is_same_v<T, std::string>) {
            const auto value = node->value<std::string>();
            if (!value) {
                fail(name, "expected a string");
            }
            out = *value;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            const auto* array = node->as_array();
            if (!array) {
                fail(name, "expected an array of strings");
            }
            out.clear();
            for (const auto& item : *array) {
                const auto value = item.value<std::string>();
                if (!value) {
                    fail(name, "expected an array of strings");
                }
                out.push_back(*value);
            }
        } else {
            static_assert(sizeof(T) == 0, "unsupported config value type");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        throw ConfigError(source_ + ": " + key + ": " + message);
    }

private:
    const toml::table& root_;
    std::string source_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    if (value.empty()) {
        return {};
    }
    const std::filesystem::path path(value);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

void read_endpoint(const Reader& reader, const toml::table* tbl, const std::string& where, EndpointConfig& out) {
    std::string kind(to_string(out.kind));
    reader.get(tbl, where, "kind", kind);
    out.kind = parse_endpoint_kind(kind);
    reader.get(tbl, where, "url", out.url);
    reader.get(tbl, where, "model", out.model);
    std::int64_t timeout_ms = out.timeout.count();
    reader.get(tbl, where, "timeout_ms", timeout_ms);
    if (timeout_ms <= 0) {
        reader.fail(where + ".timeout_ms", "must be positive");
    }
    out.timeout = std::chrono::milliseconds(timeout_ms);
    if (out.kind != EndpointKind::mock && out.url.empty()) {
        reader.fail(where + ".url", "required for " + std::string(to_string(out.kind)) + " endpoints");
    }
}

std::vector<Feature> parse_features(const Reader& reader, const std::vector<std::string>& names) {
    std::vector<Feature> out;
    for (const auto& name : names) {
        try {
            out.push_back(parse_feature(name));
        } catch (const Error& e) {
            reader.fail("judge.features", e.what());
        }
    }
    return out;
}

}  // namespace

ProjectConfig parse_project_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                   std::string_view source_name) {
    toml::table root;
    try {
        root = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream message;
        message << source_name << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
                << e.description();
        throw ConfigError(message.str());
    }
    const Reader reader(root, std::string(source_name));
    reader.check_keys(root, "", {"paths", "embedder", "index", "retriever", "generation", "judge", "models", "grid",
                                 "run"});
    ProjectConfig config;

    if (const auto* paths = reader.table("paths", {"corpus", "qa", "index_dir", "out_dir", "exemplars",
                                                   "human_ratings", "mock_rephrasings"})) {
        std::string corpus, qa, index_dir = config.index_dir.string(), out_dir = config.out_dir.string();
        std::string exemplars, human_ratings, rephrasings;
        reader.get(paths, "paths", "corpus", corpus);
        reader.get(paths, "paths", "qa", qa);
        reader.get(paths, "paths", "index_dir", index_dir);
        reader.get(paths, "paths", "out_dir", out_dir);
        reader.get(paths, "paths", "exemplars", exemplars);
        reader.get(paths, "paths", "human_ratings", human_ratings);
        reader.get(paths, "paths", "mock_rephrasings", rephrasings);
        config.corpus = resolve(base_dir, corpus);
        config.qa = resolve(base_dir, qa);
        config.index_dir = resolve(base_dir, index_dir);
        config.out_dir = resolve(base_dir, out_dir);
        config.exemplars = resolve(base_dir, exemplars);
        config.human_ratings = resolve(base_dir, human_ratings);
        config.mock_rephrasings = resolve(base_dir, rephrasings);
    } else {
        config.index_dir = resolve(base_dir, config.index_dir.string());
        config.out_dir = resolve(base_dir, config.out_dir.string());
    }

    if (const auto* embedder = reader.table("embedder", {"kind", "url", "dim", "batch_size"})) {
        std::string kind = "fallback";
        reader.get(embedder, "embedder", "kind", kind);
        if (kind == "fallback") {
            config.embedder.kind = EmbedderKind::fallback;
        } else if (kind == "sidecar") {
            config.embedder.kind = EmbedderKind::sidecar;
            config.embedder.dim = 0;
        } else {
            reader.fail("embedder.kind", "expected fallback or sidecar");
        }
        reader.get(embedder, "embedder", "url", config.embedder.url);
        reader.get(embedder, "embedder", "dim", config.embedder.dim);
        reader.get(embedder, "embedder", "batch_size", config.embedder.batch_size);
        if (config.embedder.kind == EmbedderKind::sidecar && config.embedder.url.empty()) {
            reader.fail("embedder.url", "required for the sidecar embedder");
        }
        if (config.embedder.kind == EmbedderKind::fallback && config.embedder.dim == 0) {
            reader.fail("embedder.dim", "must be positive");
        }
    }

    if (const auto* index = reader.table("index", {"parent_chars", "child_chars", "k1", "b"})) {
        reader.get(index, "index", "parent_chars", config.index.limits.parent);
        reader.get(index, "index", "child_chars", config.index.limits.child);
        reader.get(index, "index", "k1", config.index.bm25.k1);
        reader.get(index, "index", "b", config.index.bm25.b);
    }

    if (const auto* retriever = reader.table(
            "retriever", {"w_bm25", "w_dense", "rrf_k", "top_k", "fetch_k", "num_rephrasings", "prefilter"})) {
        auto& r = config.retriever;
        reader.get(retriever, "retriever", "w_bm25", r.w_bm25);
        reader.get(retriever, "retriever", "w_dense", r.w_dense);
        reader.get(retriever, "retriever", "rrf_k", r.rrf_k);
        reader.get(retriever, "retriever", "top_k", r.top_k);
        reader.get(retriever, "retriever", "fetch_k", r.fetch_k);
        reader.get(retriever, "retriever", "num_rephrasings", r.num_rephrasings);
        std::string prefilter(to_string(r.prefilter));
        reader.get(retriever, "retriever", "prefilter", prefilter);
        r.prefilter = parse_prefilter_mode(prefilter);
    }
    config.retriever.validate();

    if (const auto* generation = reader.table("generation", {"temperature", "max_context_chunks"})) {
        reader.get(generation, "generation", "temperature", config.generation.temperature);
        reader.get(generation, "generation", "max_context_chunks", config.generation.max_context_chunks);
    }
    config.generation.icl_exemplars =
        config.exemplars.empty() ? default_exemplars() : load_exemplars(config.exemplars);

    if (const auto* judge =
            reader.table("judge", {"enabled", "kind", "url", "model", "timeout_ms", "features", "threshold"})) {
        reader.get(judge, "judge", "enabled", config.judge_enabled);
        read_endpoint(reader, judge, "judge", config.judge);
        std::vector<std::string> features;
        reader.get(judge, "judge", "features", features);
        if (judge->get("features")) {
            config.judge_features = parse_features(reader, features);
        }
        reader.get(judge, "judge", "threshold", config.threshold);
        if (config.threshold < 1 || config.threshold > 5) {
            reader.fail("judge.threshold", "must be between 1 and 5");
        }
    }

    if (const auto* models = root.get("models")) {
        const auto* array = models->as_array();
        if (!array || !array->is_array_of_tables()) {
            reader.fail("models", "expected [[models]] tables");
        }
        config.models.clear();
        std::set<std::string> names;
        for (std::size_t i = 0; i < array->size(); ++i) {
            const auto& tbl = *array->get(i)->as_table();
            const auto where = "models[" + std::to_string(i) + "]";
            reader.check_keys(tbl, where, {"name", "kind", "url", "model", "timeout_ms"});
            ModelConfig model;
            reader.get(&tbl, where, "name", model.name);
            if (model.name.empty()) {
                reader.fail(where + ".name", "required");
            }
            if (!names.insert(model.name).second) {
                reader.fail(where + ".name", "duplicate model name '" + model.name + "'");
            }
            read_endpoint(reader, &tbl, where, model.endpoint);
            config.models.push_back(std::move(model));
        }
    }

    if (const auto* grid = reader.table("grid", {"configs", "languages", "models"})) {
        reader.get(grid, "grid", "configs", config.configs);
        std::vector<std::string> languages;
        reader.get(grid, "grid", "languages", languages);
        if (grid->get("languages")) {
            config.languages.clear();
            for (const auto& language : languages) {
                try {
                    config.languages.push_back(parse_language(language));
                } catch (const Error& e) {
                    reader.fail("grid.languages", e.what());
                }
            }
        }
        std::vector<std::string> selected;
        reader.get(grid, "grid", "models", selected);
        if (grid->get("models")) {
            std::vector<ModelConfig> kept;
            for (const auto& name : selected) {
                const auto it = std::find_if(config.models.begin(), config.models.end(),
                                             [&](const ModelConfig& m) { return m.name == name; });
                if (it == config.models.end()) {
                    reader.fail("grid.models", "no [[models]] entry named '" + name + "'");
                }
                kept.push_back(*it);
            }
            config.models = std::move(kept);
        }
    }

    if (const auto* run = reader.table("run", {"seed", "concurrency", "sample_size", "qa_subset", "bertscore"})) {
        reader.get(run, "run", "seed", config.seed);
        reader.get(run, "run", "concurrency", config.concurrency);
        reader.get(run, "run", "sample_size", config.sample_size);
        reader.get(run, "run", "bertscore", config.bertscore);
        if (run->get("qa_subset")) {
            std::vector<std::string> subset;
            reader.get(run, "run", "qa_subset", subset);
            config.qa_subset = std::move(subset);
        }
        if (config.concurrency == 0) {
            reader.fail("run.concurrency", "must be positive");
        }
    }
    return config;
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
    std::string content;
    try {
        content = read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_project_config(content, path.parent_path(), path.string());
}

void force_mock(ProjectConfig& config) {
    const EndpointConfig mock;
    config.judge = mock;
    for (auto& model : config.models) {
        model.endpoint = mock;
    }
    config.embedder = EmbedderConfig{};
}

std::vector<QaExemplar> select_exemplars(std::span<const QaExemplar> pool, std::uint64_t seed) {
    if (pool.size() < kIclShots) {
        throw ConfigError("need at least " + std::to_string(kIclShots) + " ICL exemplars, got " +
                          std::to_string(pool.size()));
    }
    if (pool.size() == kIclShots) {
        return {pool.begin(), pool.end()};
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates; written out so the draw is identical on every standard library.
    for (std::size_t i = 0; i < kIclShots; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
        std::swap(order[i], order[j]);
    }
    std::sort(order.begin(), order.begin() + kIclShots);
    std::vector<QaExemplar> out;
    for (std::size_t i = 0; i < kIclShots; ++i) {
        out.push_back(pool[order[i]]);
    }
    return out;
}

ExperimentConfig make_experiment(const ProjectConfig& config, std::string_view name, Language language,
                                 const ModelConfig& model) {
    ExperimentConfig experiment;
    experiment.name = std::string(name);
    experiment.toggles = parse_config_name(name);
    experiment.retriever = config.retriever;
    experiment.retriever.use_multi_query = experiment.toggles.multi_query;
    experiment.retriever.use_child_parent = experiment.toggles.child_parent;
    experiment.retriever.use_ensemble = experiment.toggles.ensemble;
    experiment.retriever.validate();
    experiment.generation = config.generation;
    experiment.generation.use_icl = experiment.toggles.icl;
    experiment.generation.model_id = model.endpoint.model;
    experiment.generation.icl_exemplars =
        experiment.toggles.icl ? select_exemplars(config.generation.icl_exemplars, config.seed)
                               : std::vector<QaExemplar>{};
    experiment.generation.validate();
    experiment.language = language;
    experiment.generator = model;
    experiment.judge = config.judge;
    experiment.embedder = config.embedder;
    experiment.judge_enabled = config.judge_enabled;
    experiment.judge_features = config.judge_features;
    experiment.bertscore = config.bertscore;
    experiment.qa_subset = config.qa_subset;
    experiment.sample_size = config.sample_size;
    experiment.seed = config.seed;
    experiment.concurrency = config.concurrency;
    return experiment;
}

std::vector<ExperimentConfig> expand_grid(const ProjectConfig& config) {
    std::vector<std::pair<Toggles, std::string>> seen;
    for (const auto& name : config.configs) {
        const auto toggles = parse_config_name(name);
        for (const auto& [other, other_name] : seen) {
            if (other == toggles) {
                throw ConfigError("config names '" + other_name + "' and '" + name +
                                  "' select the same module combination");
            }
        }
        seen.emplace_back(toggles, name);
    }
    std::vector<ExperimentConfig> out;
    for (const auto& model : config.models) {
        for (const auto language : config.languages) {
            for (const auto& name : config.configs) {
                out.push_back(make_experiment(config, name, language, model));
            }
        }
    }
    return out;
}

}  // namespace ragforge
