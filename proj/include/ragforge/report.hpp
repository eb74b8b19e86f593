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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragforge/evaluate.hpp"
#include "ragforge/runner.hpp"

namespace ragforge {

enum class ReportTable {
    hit_rate,   // model x language rows, config columns, percent with two decimals
    feature,    // mean judge score per Match / No Match, one decimal
    confusion,  // TP/FN/FP/TN per feature and experiment
    scores,     // per-feature means (llm or llm/human), ROUGE-L and BERTScore per experiment
};
enum class ReportFormat { markdown, csv };

ReportTable parse_report_table(std::string_view value);
ReportFormat parse_report_format(std::string_view value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct ReportOptions {
    ReportTable table = ReportTable::hit_rate;
    ReportFormat format = ReportFormat::markdown;
    Feature feature = Feature::faithfulness;  // for ReportTable::feature
    int threshold = 5;                        // for ReportTable::confusion
    std::vector<std::string> experiments;     // ids or config names; empty keeps all
    std::vector<HumanRating> human;           // merged into ReportTable::scores
};

/// Builds the table from the latest run of every experiment.
Table build_table(std::span<const ResultRecord> records, const ReportOptions& options);

std::string render_markdown(const Table& table);
std::string render_csv(const Table& table);

std::string render_report(std::span<const ResultRecord> records, const ReportOptions& options);

/// Judge scores of the records as aggregation input (unavailable scores skipped).
std::vector<ScoreRecord> score_records(std::span<const ResultRecord> records);

}  // namespace ragforge
