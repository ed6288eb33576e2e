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

#ifndef RADCMP_CORE_MODEL_H_
#define RADCMP_CORE_MODEL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radcmp {

enum class Modality { kMri, kCt, kUltrasound, kUnknown };

std::string_view ModalityName(Modality m);
// Accepts "MRI", "CT", "Ultrasound", "Unknown" (case-insensitive).
std::optional<Modality> ParseModality(std::string_view name);

// One radiology report. A section is either absent or holds text; at least
// one section is non-blank, and neither contains control characters other
// than newline and tab.
class Report {
 public:
  // Throws InputError when the invariants do not hold. Empty strings are
  // treated as absent sections.
  static Report Make(std::optional<std::string> findings,
                     std::optional<std::string> impression);

  const std::optional<std::string>& findings() const { return findings_; }
  const std::optional<std::string>& impression() const { return impression_; }

  bool operator==(const Report&) const = default;

 private:
  Report() = default;
  std::optional<std::string> findings_;
  std::optional<std::string> impression_;
};

struct ReportPair {
  std::string id;
  Modality modality = Modality::kUnknown;
  Report preliminary;
  Report final_report;
  std::optional<double> ground_truth_score;  // in [0, 10]

  bool operator==(const ReportPair&) const = default;
};

enum class SectionSelector { kFindingsOnly, kImpressionOnly, kBoth };
enum class Side { kPreliminary, kFinal };

std::optional<SectionSelector> ParseSectionSelector(std::string_view name);
std::string_view SectionSelectorName(SectionSelector s);

// Parses newline-delimited corpus records. Blank lines are skipped but still
// counted for line numbers. Throws InputError naming the first offending line.
std::vector<ReportPair> ParseCorpus(std::string_view content);

// One record per line, nested "preliminary"/"final" objects, trailing newline.
std::string SerializeCorpus(const std::vector<ReportPair>& pairs);
std::string SerializePair(const ReportPair& pair);

// Comparison text for one side. kBoth joins findings and impression with a
// blank line; when only one section exists it is returned alone. Throws
// InputError when the selected section is absent.
std::string PairText(const ReportPair& pair, Side side,
                     SectionSelector selector = SectionSelector::kBoth);
std::string ReportText(const Report& report,
                       SectionSelector selector = SectionSelector::kBoth);

// Linear lookup by id; nullptr when absent.
const ReportPair* FindPair(const std::vector<ReportPair>& pairs,
                           std::string_view id);

}  // namespace radcmp

#endif  // RADCMP_CORE_MODEL_H_
