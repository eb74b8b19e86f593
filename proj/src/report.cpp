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

#include "ragforge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "ragforge/error.hpp"

namespace ragforge {

ReportTable parse_report_table(std::string_view value) {
    if (value == "hit-rate") {
        return ReportTable::hit_rate;
    }
    if (value == "feature") {
        return ReportTable::feature;
    }
    if (value == "confusion") {
        return ReportTable::confusion;
    }
    if (value == "scores") {
        return ReportTable::scores;
    }
    throw ArgumentError("unknown report table '" + std::string(value) +
                        "' (expected hit-rate, feature, confusion or scores)");
}

ReportFormat parse_report_format(std::string_view value) {
    if (value == "markdown" || value == "md") {
        return ReportFormat::markdown;
    }
    if (value == "csv") {
        return ReportFormat::csv;
    }
    throw ArgumentError("unknown report format '" + std::string(value) + "' (expected markdown or csv)");
}

std::vector<ScoreRecord> score_records(std::span<const ResultRecord> records) {
    std::vector<ScoreRecord> out;
    for (const auto& record : records) {
        for (const auto& item : record.judge) {
            if (item.score) {
                out.push_back({record.model, record.language, record.config,
                               JudgeScore{record.qa_id, item.feature, *item.score, Rater::llm, record.answer.match}});
            }
        }
    }
    return out;
}

namespace {

std::string format(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, pattern, value);
    return buffer;
}

std::string title_case(std::string_view word) {
    std::string out(word);
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    }
    return out;
}

template <typename Key>
void remember(std::vector<Key>& order, const Key& key) {
    if (std::find(order.begin(), order.end(), key) == order.end()) {
        order.push_back(key);
    }
}

std::vector<ResultRecord> selected(std::span<const ResultRecord> records, const ReportOptions& options) {
    auto latest = latest_runs(records);
    if (!options.experiments.empty()) {
        std::erase_if(latest, [&](const ResultRecord& record) {
            return std::none_of(options.experiments.begin(), options.experiments.end(), [&](const std::string& name) {
                return name == record.experiment || name == record.config;
            });
        });
    }
    return latest;
}

Table hit_rate_table(std::span<const ResultRecord> records) {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::string> configs;
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::size_t, std::size_t>> cells;
    for (const auto& record : records) {
        remember(rows, std::pair{record.model, record.language});
        remember(configs, record.config);
        auto& [hits, total] = cells[{record.model, record.language, record.config}];
        hits += record.hit ? 1 : 0;
        ++total;
    }
    Table table;
    table.header = {"Model", "Language"};
    table.header.insert(table.header.end(), configs.begin(), configs.end());
    for (const auto& [model, language] : rows) {
        std::vector<std::string> row{model, language};
        for (const auto& config : configs) {
            const auto it = cells.find({model, language, config});
            row.push_back(it == cells.end() || it->second.second == 0
                              ? "-"
                              : format("%.2f", 100.0 * static_cast<double>(it->second.first) /
                                                   static_cast<double>(it->second.second)));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table feature_table(std::span<const ResultRecord> records, Feature feature) {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::string> configs;
    for (const auto& record : records) {
        remember(rows, std::pair{record.model, record.language});
        remember(configs, record.config);
    }
    auto scores = score_records(records);
    std::erase_if(scores, [&](const ScoreRecord& s) { return s.score.feature != feature; });
    const GroupKey keys[] = {GroupKey::model, GroupKey::language, GroupKey::match, GroupKey::config};
    const auto cells = aggregate_scores(scores, keys);

    Table table;
    table.header = {"Model", "Language", "Match"};
    table.header.insert(table.header.end(), configs.begin(), configs.end());
    for (const auto& [model, language] : rows) {
        for (const char* match : {"Match", "No Match"}) {
            std::vector<std::string> row{model, language, match};
            for (const auto& config : configs) {
                const auto it = cells.find({model, language, match, config});
                row.push_back(it == cells.end() ? "-" : format("%.1f", it->second.rounded));
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::vector<Feature> features_present(std::span<const ResultRecord> records) {
    std::vector<Feature> out;
    for (const auto feature : kAllFeatures) {
        for (const auto& record : records) {
            if (std::any_of(record.judge.begin(), record.judge.end(),
                            [&](const FeatureScore& s) { return s.feature == feature; })) {
                out.push_back(feature);
                break;
            }
        }
    }
    return out;
}

Table confusion_table(std::span<const ResultRecord> records, int threshold) {
    std::vector<std::string> experiments;
    for (const auto& record : records) {
        remember(experiments, record.experiment);
    }
    Table table;
    table.header = {"Feature", "Match"};
    for (const auto& experiment : experiments) {
        table.header.push_back(experiment + " Correct");
        table.header.push_back(experiment + " Incorrect");
    }
    for (const auto feature : features_present(records)) {
        std::vector<std::string> matched{title_case(to_string(feature)), "1"};
        std::vector<std::string> unmatched{title_case(to_string(feature)), "0"};
        for (const auto& experiment : experiments) {
            std::vector<JudgeScore> scores;
            for (const auto& record : records) {
                if (record.experiment != experiment) {
                    continue;
                }
                for (const auto& item : record.judge) {
                    if (item.feature == feature && item.score) {
                        scores.push_back({record.qa_id, feature, *item.score, Rater::llm, record.answer.match});
                    }
                }
            }
            const auto cm = confusion_matrix(scores, threshold);
            matched.push_back(std::to_string(cm.tp) + " (TP)");
            matched.push_back(std::to_string(cm.fn) + " (FN)");
            unmatched.push_back(std::to_string(cm.fp) + " (FP)");
            unmatched.push_back(std::to_string(cm.tn) + " (TN)");
        }
        table.rows.push_back(std::move(matched));
        table.rows.push_back(std::move(unmatched));
    }
    return table;
}

bool rating_applies(const HumanRating& rating, const ResultRecord& record) {
    return rating.qa_id == record.qa_id &&
           (rating.experiment.empty() || rating.experiment == record.experiment || rating.experiment == record.config) &&
           (rating.model.empty() || rating.model == record.model) &&
           (rating.language.empty() || rating.language == record.language);
}

Table scores_table(std::span<const ResultRecord> records, std::span<const HumanRating> human) {
    std::vector<std::string> experiments;
    for (const auto& record : records) {
        remember(experiments, record.experiment);
    }
    // (experiment, feature, match, rater) -> cell
    std::vector<ScoreRecord> judged;
    for (const auto& record : records) {
        for (const auto& item : record.judge) {
            if (item.score) {
                judged.push_back({record.experiment, "", "",
                                  JudgeScore{record.qa_id, item.feature, *item.score, Rater::llm, record.answer.match}});
            }
        }
        for (const auto& rating : human) {
            if (rating_applies(rating, record)) {
                judged.push_back({record.experiment, "", "",
                                  JudgeScore{record.qa_id, rating.feature, rating.score, Rater::human,
                                             record.answer.match}});
            }
        }
    }
    const GroupKey keys[] = {GroupKey::model, GroupKey::feature, GroupKey::match, GroupKey::rater};
    const auto cells = aggregate_scores(judged, keys);

    Table table;
    table.header = {"Metric", "Match"};
    table.header.insert(table.header.end(), experiments.begin(), experiments.end());
    for (const auto feature : features_present(records)) {
        for (const char* match : {"Match", "No Match"}) {
            std::vector<std::string> row{title_case(to_string(feature)), match};
            for (const auto& experiment : experiments) {
                const std::string name(to_string(feature));
                const auto llm = cells.find({experiment, name, match, "llm"});
                const auto person = cells.find({experiment, name, match, "human"});
                std::string cell = llm == cells.end() ? "-" : format("%.1f", llm->second.rounded);
                if (person != cells.end()) {
                    cell += "/" + format("%.1f", person->second.rounded);
                }
                row.push_back(std::move(cell));
            }
            table.rows.push_back(std::move(row));
        }
    }
    const auto metric_rows = [&](const char* label, auto value_of) {
        for (const bool match : {true, false}) {
            std::vector<std::string> row{label, match ? "Match" : "No Match"};
            for (const auto& experiment : experiments) {
                double sum = 0.0;
                std::size_t count = 0;
                for (const auto& record : records) {
                    if (record.experiment == experiment && record.answer.match == match) {
                        if (const auto value = value_of(record)) {
                            sum += *value;
                            ++count;
                        }
                    }
                }
                row.push_back(count == 0 ? "-" : format("%.3f", sum / static_cast<double>(count)));
            }
            table.rows.push_back(std::move(row));
        }
    };
    metric_rows("ROUGE-L", [](const ResultRecord& r) { return std::optional<double>(r.rouge.f1); });
    metric_rows("BERTScore", [](const ResultRecord& r) {
        return r.bertscore ? std::optional<double>(r.bertscore->f1) : std::nullopt;
    });
    return table;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) {
        return value;
    }
    std::string out = "\"";
    for (const char c : value) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

std::string md_field(const std::string& value) {
    std::string out;
    for (const char c : value) {
        if (c == '|') {
            out += '\\';
        }
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

}  // namespace

Table build_table(std::span<const ResultRecord> records, const ReportOptions& options) {
    const auto chosen = selected(records, options);
    switch (options.table) {
        case ReportTable::hit_rate:
            return hit_rate_table(chosen);
        case ReportTable::feature:
            return feature_table(chosen, options.feature);
        case ReportTable::confusion:
            return confusion_table(chosen, options.threshold);
        case ReportTable::scores:
            return scores_table(chosen, options.human);
    }
    return {};
}

std::string render_markdown(const Table& table) {
    const auto line = [](const std::vector<std::string>& cells) {
        std::string out = "|";
        for (const auto& cell : cells) {
            out += " " + md_field(cell) + " |";
        }
        return out + "\n";
    };
    std::string out = line(table.header);
    out += "|";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out += " --- |";
    }
    out += "\n";
    for (const auto& row : table.rows) {
        out += line(row);
    }
    return out;
}

std::string render_csv(const Table& table) {
    const auto line = [](const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += (i ? "," : "") + csv_field(cells[i]);
        }
        return out + "\n";
    };
    std::string out = line(table.header);
    for (const auto& row : table.rows) {
        out += line(row);
    }
    return out;
}

std::string render_report(std::span<const ResultRecord> records, const ReportOptions& options) {
    const auto table = build_table(records, options);
    return options.format == ReportFormat::csv ? render_csv(table) : render_markdown(table);
}

}  // namespace ragforge
