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

#include "radcmp/core_model.h"

#include <cmath>
#include <unordered_set>

#include "json.hpp"
#include "radcmp/error.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

using nlohmann::json;

void CheckSectionText(const std::string& s, std::string_view section) {
  if (!text::IsValidUtf8(s)) {
    throw InputError(std::string(section) + ": invalid UTF-8");
  }
  for (unsigned char c : s) {
    if ((c < 0x20 && c != '\n' && c != '\t') || c == 0x7f) {
      throw InputError(std::string(section) + ": control character");
    }
  }
}

class LineError : public InputError {
 public:
  LineError(const std::string& what) : InputError(what) {}
};

// Looks up `outer.inner`, either nested or as a literal dotted key.
const json* Lookup(const json& record, const std::string& outer,
                   const std::string& inner) {
  if (auto it = record.find(outer); it != record.end() && it->is_object()) {
    if (auto jt = it->find(inner); jt != it->end()) return &*jt;
    return nullptr;
  }
  if (auto it = record.find(outer + "." + inner); it != record.end()) {
    return &*it;
  }
  return nullptr;
}

std::optional<std::string> OptionalString(const json& record,
                                          const std::string& outer,
                                          const std::string& inner) {
  const json* v = Lookup(record, outer, inner);
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (!v->is_string()) {
    throw LineError("field " + outer + "." + inner + " is not a string");
  }
  return v->get<std::string>();
}

Report ReportFrom(const json& record, const std::string& side) {
  auto findings = OptionalString(record, side, "findings");
  auto impression = OptionalString(record, side, "impression");
  try {
    return Report::Make(std::move(findings), std::move(impression));
  } catch (const InputError& e) {
    throw LineError("field " + side + ": " + e.what());
  }
}

json ReportJson(const Report& r) {
  json out = json::object();
  out["findings"] = r.findings() ? json(*r.findings()) : json(nullptr);
  out["impression"] = r.impression() ? json(*r.impression()) : json(nullptr);
  return out;
}

}  // namespace

std::string_view ModalityName(Modality m) {
  switch (m) {
    case Modality::kMri:
      return "MRI";
    case Modality::kCt:
      return "CT";
    case Modality::kUltrasound:
      return "Ultrasound";
    case Modality::kUnknown:
      break;
  }
  return "Unknown";
}

std::optional<Modality> ParseModality(std::string_view name) {
  const std::string n = text::Casefold(name);
  if (n == "mri") return Modality::kMri;
  if (n == "ct") return Modality::kCt;
  if (n == "ultrasound") return Modality::kUltrasound;
  if (n == "unknown") return Modality::kUnknown;
  return std::nullopt;
}

Report Report::Make(std::optional<std::string> findings,
                    std::optional<std::string> impression) {
  if (findings && findings->empty()) findings.reset();
  if (impression && impression->empty()) impression.reset();
  if (findings) CheckSectionText(*findings, "findings");
  if (impression) CheckSectionText(*impression, "impression");
  const bool has_findings = findings && !text::Trim(*findings).empty();
  const bool has_impression = impression && !text::Trim(*impression).empty();
  if (!has_findings && !has_impression) {
    throw InputError("report has no non-blank section");
  }
  Report r;
  r.findings_ = std::move(findings);
  r.impression_ = std::move(impression);
  return r;
}

std::optional<SectionSelector> ParseSectionSelector(std::string_view name) {
  const std::string n = text::Casefold(name);
  if (n == "findings" || n == "findings-only") {
    return SectionSelector::kFindingsOnly;
  }
  if (n == "impression" || n == "impression-only") {
    return SectionSelector::kImpressionOnly;
  }
  if (n == "both") return SectionSelector::kBoth;
  return std::nullopt;
}

std::string_view SectionSelectorName(SectionSelector s) {
  switch (s) {
    case SectionSelector::kFindingsOnly:
      return "findings";
    case SectionSelector::kImpressionOnly:
      return "impression";
    case SectionSelector::kBoth:
      break;
  }
  return "both";
}

std::vector<ReportPair> ParseCorpus(std::string_view content) {
  std::vector<ReportPair> pairs;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (text::Trim(line).empty()) continue;

    const std::string where = ", line " + std::to_string(line_no);
    if (!text::IsValidUtf8(line)) {
      throw InputError("malformed record" + where + ": invalid UTF-8");
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      throw InputError("malformed record" + where + ": not a JSON object");
    }
    if (!record.is_object()) {
      throw InputError("malformed record" + where + ": not a JSON object");
    }

    std::string id;
    Modality modality = Modality::kUnknown;
    std::optional<Report> preliminary;
    std::optional<Report> final_report;
    std::optional<double> score;
    try {
      auto it = record.find("id");
      if (it == record.end() || !it->is_string() ||
          it->get<std::string>().empty()) {
        throw LineError("field id missing or not a non-empty string");
      }
      id = it->get<std::string>();

      if (auto m = record.find("modality"); m != record.end() && !m->is_null()) {
        if (!m->is_string()) throw LineError("field modality is not a string");
        auto parsed = ParseModality(m->get<std::string>());
        if (!parsed) {
          throw LineError("field modality has unknown value \"" +
                          m->get<std::string>() + "\"");
        }
        modality = *parsed;
      }

      preliminary = ReportFrom(record, "preliminary");
      final_report = ReportFrom(record, "final");

      if (auto s = record.find("ground_truth_score");
          s != record.end() && !s->is_null()) {
        if (!s->is_number()) {
          throw LineError("field ground_truth_score is not a number");
        }
        const double v = s->get<double>();
        if (!std::isfinite(v) || v < 0.0 || v > 10.0) {
          throw InputError("score out of range" + where);
        }
        score = v;
      }
    } catch (const LineError& e) {
      throw InputError("malformed record" + where + ": " + e.what());
    }
    ReportPair pair{std::move(id), modality, std::move(*preliminary),
                    std::move(*final_report), score};

    if (!seen.insert(pair.id).second) {
      throw InputError("duplicate id \"" + pair.id + "\"" + where);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::string SerializePair(const ReportPair& pair) {
  json out = json::object();
  out["id"] = pair.id;
  out["modality"] = std::string(ModalityName(pair.modality));
  out["preliminary"] = ReportJson(pair.preliminary);
  out["final"] = ReportJson(pair.final_report);
  if (pair.ground_truth_score) {
    out["ground_truth_score"] = *pair.ground_truth_score;
  }
  return out.dump();
}

std::string SerializeCorpus(const std::vector<ReportPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += SerializePair(p);
    out += '\n';
  }
  return out;
}

std::string ReportText(const Report& report, SectionSelector selector) {
  switch (selector) {
    case SectionSelector::kFindingsOnly:
      if (!report.findings()) throw InputError("findings section is absent");
      return *report.findings();
    case SectionSelector::kImpressionOnly:
      if (!report.impression()) {
        throw InputError("impression section is absent");
      }
      return *report.impression();
    case SectionSelector::kBoth:
      break;
  }
  if (report.findings() && report.impression()) {
    return *report.findings() + "\n\n" + *report.impression();
  }
  return report.findings() ? *report.findings() : *report.impression();
}

std::string PairText(const ReportPair& pair, Side side,
                     SectionSelector selector) {
  const Report& r =
      side == Side::kFinal ? pair.final_report : pair.preliminary;
  try {
    return ReportText(r, selector);
  } catch (const InputError& e) {
    throw InputError("pair " + pair.id + " (" +
                     (side == Side::kFinal ? "final" : "preliminary") +
                     "): " + e.what());
  }
}

const ReportPair* FindPair(const std::vector<ReportPair>& pairs,
                           std::string_view id) {
  for (const auto& p : pairs) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

}  // namespace radcmp
