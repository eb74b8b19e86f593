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

// ragforge command line: ingest, index, ask, eval, grid, report.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ragforge/config.hpp"
#include "ragforge/corpus.hpp"
#include "ragforge/error.hpp"
#include "ragforge/report.hpp"
#include "ragforge/runner.hpp"

namespace fs = std::filesystem;
using namespace ragforge;

namespace {

struct CommonArgs {
    std::string config;
    std::string corpus;
    std::string qa;
    std::string out;
    std::string experiment;
    std::string lang;
    bool mock = false;
};

void add_common(CLI::App& cmd, CommonArgs& args, bool with_experiment) {
    cmd.add_option("--config", args.config, "TOML configuration file");
    cmd.add_option("--corpus", args.corpus, "Corpus JSON (overrides the config)");
    cmd.add_option("--qa", args.qa, "QA set JSON (overrides the config)");
    cmd.add_option("--out", args.out, "Output directory for results (overrides the config)");
    cmd.add_option("--lang", args.lang, "Language: en or de");
    cmd.add_flag("--mock", args.mock, "Use the deterministic mock for every endpoint and the fallback embedder");
    if (with_experiment) {
        cmd.add_option("--experiment", args.experiment, "Config name such as mq-er");
    }
}

ProjectConfig resolve_config(const CommonArgs& args) {
    ProjectConfig config = args.config.empty() ? parse_project_config("", fs::current_path(), "defaults")
                                               : load_project_config(args.config);
    if (!args.corpus.empty()) {
        config.corpus = args.corpus;
    }
    if (!args.qa.empty()) {
        config.qa = args.qa;
    }
    if (!args.out.empty()) {
        config.out_dir = args.out;
    }
    if (!args.lang.empty()) {
        config.languages = {parse_language(args.lang)};
    }
    if (args.mock) {
        force_mock(config);
    }
    return config;
}

Corpus require_corpus(const ProjectConfig& config) {
    if (config.corpus.empty()) {
        throw ConfigError("no corpus given; pass --corpus or set paths.corpus");
    }
    return load_corpus(config.corpus);
}

std::vector<QAItem> require_qa(const ProjectConfig& config, const Corpus& corpus) {
    if (config.qa.empty()) {
        throw ConfigError("no QA set given; pass --qa or set paths.qa");
    }
    return load_qa_set(config.qa, corpus);
}

int cmd_ingest(const CommonArgs& args) {
    const auto config = resolve_config(args);
    const auto corpus = require_corpus(config);
    std::size_t sections = 0;
    for (const auto& program : corpus.programs()) {
        sections += program.sections.size();
    }
    std::printf("corpus: %zu programs (%zu en, %zu de), %zu sections\n", corpus.size(),
                corpus.filter(Language::en).size(), corpus.filter(Language::de).size(), sections);
    if (!config.qa.empty()) {
        const auto qa = load_qa_set(config.qa, corpus);
        std::printf("qa set: %zu items\n", qa.size());
    }
    return 0;
}

int cmd_index(const CommonArgs& args) {
    const auto config = resolve_config(args);
    const auto corpus = require_corpus(config);
    const auto provider = make_embedder(config.embedder);
    build_indices(config, corpus, *provider);
    for (const auto language : config.languages) {
        const auto dir = index_path(config, language);
        if (fs::exists(dir / "meta.json")) {
            std::printf("%s index: %s\n", std::string(to_string(language)).c_str(), dir.string().c_str());
        }
    }
    return 0;
}

const ModelConfig& pick_model(const ProjectConfig& config, const std::string& name) {
    if (config.models.empty()) {
        throw ConfigError("no models configured");
    }
    if (name.empty()) {
        return config.models.front();
    }
    for (const auto& model : config.models) {
        if (model.name == name) {
            return model;
        }
    }
    throw ConfigError("no model named '" + name + "' in the config");
}

int cmd_ask(const CommonArgs& args, const std::string& question, const std::string& model_name) {
    const auto config = resolve_config(args);
    const Language language = args.lang.empty() ? config.languages.front() : parse_language(args.lang);
    const auto experiment = make_experiment(config, args.experiment.empty() ? config.configs.front() : args.experiment,
                                            language, pick_model(config, model_name));
    const auto provider = make_embedder(config.embedder);
    const auto index = load_language_index(config, language);
    index.require_provider(provider->id());
    MockOptions mock;
    for (const auto& program : index.programs()) {
        mock.program_names.push_back(program.name);
    }
    if (!config.mock_rephrasings.empty()) {
        mock.rephrasings = load_mock_rephrasings(config.mock_rephrasings);
    }
    std::optional<PrefilterCatalog> catalog;
    if (experiment.retriever.prefilter != PrefilterMode::off) {
        catalog.emplace(index, *provider);
    }
    const auto generator = make_endpoint(experiment.generator.endpoint, mock);
    const CompletionOptions completion{experiment.generation.model_id, experiment.generation.temperature};
    const PipelineContext ctx{index, *provider, *generator, catalog ? &*catalog : nullptr, completion, {}};
    const auto result = retrieve_pipeline(question, experiment.retriever, ctx);

    std::printf("experiment: %s\n", experiment.id().c_str());
    for (const auto& line : result.trace) {
        std::printf("trace: %s\n", line.c_str());
    }
    for (std::size_t i = 1; i < result.queries.size(); ++i) {
        std::printf("query %zu: %s\n", i, result.queries[i].c_str());
    }
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        const auto& entry = result.ranked.entries[i];
        std::printf("rank %zu: %s %.6f\n", i + 1, entry.chunk_id.c_str(), entry.score);
    }
    auto context = context_for(result.ranked, index);
    if (context.size() > experiment.generation.max_context_chunks) {
        context.resize(experiment.generation.max_context_chunks);
    }
    const auto messages = build_prompt(question, context, experiment.generation);
    std::printf("answer: %s\n", complete(*generator, messages, completion).c_str());
    return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& model_name) {
    auto config = resolve_config(args);
    if (args.experiment.empty()) {
        throw ConfigError("eval needs --experiment <config name>");
    }
    const Language language = args.lang.empty() ? config.languages.front() : parse_language(args.lang);
    const auto corpus = require_corpus(config);
    const auto qa = require_qa(config, corpus);
    const std::vector<ExperimentConfig> experiments{
        make_experiment(config, args.experiment, language, pick_model(config, model_name))};
    const auto summary = run_grid(config, experiments, qa, RunOptions{args.mock});
    std::printf("%zu records -> %s\n", summary.records, summary.results.string().c_str());
    return 0;
}

int cmd_grid(const CommonArgs& args, bool deterministic) {
    const auto config = resolve_config(args);
    const auto corpus = require_corpus(config);
    const auto qa = require_qa(config, corpus);
    const auto experiments = expand_grid(config);
    const auto summary = run_grid(config, experiments, qa, RunOptions{args.mock || deterministic});
    std::printf("%zu experiments, %zu records -> %s\n", summary.experiments, summary.records,
                summary.results.string().c_str());
    return 0;
}

struct ReportArgs {
    std::string results;
    std::string table = "hit-rate";
    std::string format = "markdown";
    std::string feature = "faithfulness";
    int threshold = 5;
    std::vector<std::string> experiments;
    std::string human;
};

int cmd_report(const CommonArgs& args, const ReportArgs& report) {
    ReportOptions options;
    options.table = parse_report_table(report.table);
    options.format = parse_report_format(report.format);
    options.feature = parse_feature(report.feature);
    options.threshold = report.threshold;
    fs::path results = report.results;
    fs::path human = report.human;
    if (results.empty() || (human.empty() && !args.config.empty())) {
        const auto config = resolve_config(args);
        if (results.empty()) {
            results = config.out_dir / "results.jsonl";
        }
        if (human.empty()) {
            human = config.human_ratings;
        }
    }
    if (!fs::exists(results)) {
        throw ConfigError("no results at " + results.string() + "; run `ragforge eval` or `ragforge grid` first");
    }
    options.experiments = report.experiments;
    if (!args.experiment.empty()) {
        options.experiments.push_back(args.experiment);
    }
    if (!human.empty()) {
        options.human = load_human_ratings(human);
    }
    const auto records = load_results(results);
    std::fputs(render_report(records, options).c_str(), stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("ragforge"));
    spdlog::set_pattern("[%l] %v");

    CLI::App app{"ragforge: retrieval-augmented generation engine and benchmark harness"};
    app.require_subcommand(1);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    CommonArgs ingest_args, index_args, ask_args, eval_args, grid_args, report_args;
    std::string question, ask_model, eval_model;
    bool deterministic = false;
    ReportArgs report;

    auto* ingest = app.add_subcommand("ingest", "Validate the corpus and QA set");
    add_common(*ingest, ingest_args, false);
    auto* index = app.add_subcommand("index", "Build and save per-language indices");
    add_common(*index, index_args, false);
    auto* ask = app.add_subcommand("ask", "Answer one question and print the stage trace");
    add_common(*ask, ask_args, true);
    ask->add_option("question", question, "Question text")->required();
    ask->add_option("--model", ask_model, "Model name from the config");
    auto* eval = app.add_subcommand("eval", "Run one experiment over the QA set");
    add_common(*eval, eval_args, true);
    eval->add_option("--model", eval_model, "Model name from the config");
    auto* grid = app.add_subcommand("grid", "Run every configured model x language x config");
    add_common(*grid, grid_args, false);
    grid->add_flag("--deterministic", deterministic, "Fixed timestamps and zero latency in results");
    auto* rep = app.add_subcommand("report", "Render tables from a results file");
    add_common(*rep, report_args, true);
    rep->add_option("--results", report.results, "Results JSONL (default <out_dir>/results.jsonl)");
    rep->add_option("--table", report.table, "hit-rate | feature | confusion | scores");
    rep->add_option("--format", report.format, "markdown | csv");
    rep->add_option("--feature", report.feature, "Feature for --table feature");
    rep->add_option("--threshold", report.threshold, "Acceptance threshold for --table confusion")
        ->check(CLI::Range(1, 5));
    rep->add_option("--select", report.experiments, "Experiment ids or config names to include");
    rep->add_option("--human", report.human, "Human ratings JSONL");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);

    const char* stage = "ragforge";
    try {
        if (*ingest) {
            stage = "ingest";
            return cmd_ingest(ingest_args);
        }
        if (*index) {
            stage = "index";
            return cmd_index(index_args);
        }
        if (*ask) {
            stage = "ask";
            return cmd_ask(ask_args, question, ask_model);
        }
        if (*eval) {
            stage = "eval";
            return cmd_eval(eval_args, eval_model);
        }
        if (*grid) {
            stage = "grid";
            return cmd_grid(grid_args, deterministic);
        }
        if (*rep) {
            stage = "report";
            return cmd_report(report_args, report);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "ragforge %s: configuration error: %s\n", stage, e.what());
        return 2;
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "ragforge %s: invalid argument: %s\n", stage, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ragforge %s: error: %s\n", stage, e.what());
        return 1;
    }
    return 0;
}
