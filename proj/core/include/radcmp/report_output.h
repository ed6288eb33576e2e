// Copyright 2026 The radcmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RADCMP_REPORT_OUTPUT_H_
#define RADCMP_REPORT_OUTPUT_H_

#include <optional>
#include <string>
#include <string_view>

#include "radcmp/core_model.h"
#include "radcmp/extraction.h"
#include "radcmp/scoring.h"

namespace radcmp {

enum class EntityCategory { kMatched, kMismatched, kMissing, kSurplus };

std::string_view CategoryName(EntityCategory c);
// Legend colour names: green, yellow, red, blue.
std::string_view CategoryColorName(EntityCategory c);
// Background shades used for each legend colour.
std::string_view CategoryColor(EntityCategory c);

inline constexpr std::string_view kMatchedColor = "#8fd694";
inline constexpr std::string_view kMismatchedColor = "#ffe066";
inline constexpr std::string_view kMissingColor = "#ff8080";
inline constexpr std::string_view kSurplusColor = "#80b3ff";

struct VisualizationDoc {
  std::string pair_id;
  std::string html;  // complete XHTML document
  std::string body;  // panels and legend, for embedding
};

std::string HtmlEscape(std::string_view s);

// Side-by-side preliminary/final panels; every entity occurrence becomes one
// <mark> coloured by its category. Throws InputError for spans outside the
// text, overlapping spans, or entities the classification does not cover.
VisualizationDoc RenderEntityHtml(
    const ReportPair& pair, const EntitySet& final_entities,
    const EntitySet& prelim_entities, const Classification& cls,
    SectionSelector section = SectionSelector::kBoth);

// Scores on both scales, category counts, weights, the visualization, and
// the explanation when one is given (falling back to result.explanation).
// Throws InputError unless result.method is kLlamaEntScore.
std::string RenderComparisonReport(
    const ScoreResult& result, const VisualizationDoc& doc,
    const std::optional<std::string>& explanation = std::nullopt);

// Machine-readable form of a score, one JSON object.
std::string ScoreResultJson(const ScoreResult& result,
                            std::string_view pair_id);

}  // namespace radcmp

#endif  // RADCMP_REPORT_OUTPUT_H_
