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

#include "radcmp/report_output.h"

#include "json.hpp"
#include "radcmp/error.h"
#include "radcmp/text.h"

namespace radcmp {
namespace {

using nlohmann::json;

constexpr EntityCategory kAllCategories[] = {
    EntityCategory::kMatched, EntityCategory::kMismatched,
    EntityCategory::kMissing, EntityCategory::kSurplus};

EntityCategory Categorize(const Classification& cls, const std::string& term,
                          Side side) {
  if (cls.matched.count(term)) return EntityCategory::kMatched;
  if (cls.mismatched.count(term)) return EntityCategory::kMismatched;
  if (side == Side::kFinal && cls.missing.count(term)) {
    return EntityCategory::kMissing;
  }
  if (side == Side::kPreliminary && cls.surplus.count(term)) {
    return EntityCategory::kSurplus;
  }
  throw InputError("entity \"" + term + "\" is not in the classification");
}

std::string Panel(std::string_view title, std::string_view side_name,
                  std::string_view text, const EntitySet& entities,
                  const Classification& cls, Side side) {
  std::string out;
  out += "<section class=\"panel\" data-side=\"";
  out += side_name;
  out += "\" style=\"flex:1;min-width:0\">\n<h2>";
  out += title;
  out += "</h2>\n<pre style=\"white-space:pre-wrap;font-family:inherit\">";
  std::size_t cursor = 0;
  for (const Entity& e : entities.entities()) {
    if (e.span.start >= e.span.end || e.span.end > text.size()) {
      throw InputError("entity span outside " + std::string(side_name) +
                       " text");
    }
    if (e.span.start < cursor) {
      throw InputError("overlapping entity spans in " +
                       std::string(side_name) + " text");
    }
    const EntityCategory c = Categorize(cls, e.normalized, side);
    out += HtmlEscape(text.substr(cursor, e.span.start - cursor));
    out += "<mark class=\"entity entity-";
    out += CategoryName(c);
    out += "\" data-category=\"";
    out += CategoryName(c);
    out += "\" style=\"background-color:";
    out += CategoryColor(c);
    out += "\">";
    out += HtmlEscape(text.substr(e.span.start, e.span.end - e.span.start));
    out += "</mark>";
    cursor = e.span.end;
  }
  out += HtmlEscape(text.substr(cursor));
  out += "</pre>\n</section>\n";
  return out;
}

std::string Legend() {
  std::string out = "<ul class=\"legend\" style=\"list-style:none;padding:0\">\n";
  for (EntityCategory c : kAllCategories) {
    out += "<li><span class=\"swatch\" style=\"background-color:";
    out += CategoryColor(c);
    out += ";padding:0 6px\">";
    out += CategoryColorName(c);
    out += "</span> = ";
    out += CategoryName(c);
    out += "</li>\n";
  }
  out += "</ul>\n";
  return out;
}

std::string DocumentHead(const std::string& title) {
  return "<!DOCTYPE html>\n"
         "<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n"
         "<head>\n<meta charset=\"utf-8\"/>\n<title>" +
         title +
         "</title>\n</head>\n"
         "<body style=\"font-family:sans-serif;margin:24px\">\n<h1>" +
         title + "</h1>\n";
}

constexpr std::string_view kDocumentTail = "</body>\n</html>\n";

std::string Row(std::string_view key, std::string_view value) {
  return "<tr><th style=\"text-align:left\">" + std::string(key) +
         "</th><td>" + std::string(value) + "</td></tr>\n";
}

json TermArray(const TermSet& terms) {
  json a = json::array();
  for (const auto& t : terms) a.push_back(t);
  return a;
}

}  // namespace

std::string_view CategoryName(EntityCategory c) {
  switch (c) {
    case EntityCategory::kMatched:
      return "matched";
    case EntityCategory::kMismatched:
      return "mismatched";
    case EntityCategory::kMissing:
      return "missing";
    case EntityCategory::kSurplus:
      break;
  }
  return "surplus";
}

std::string_view CategoryColorName(EntityCategory c) {
  switch (c) {
    case EntityCategory::kMatched:
      return "green";
    case EntityCategory::kMismatched:
      return "yellow";
    case EntityCategory::kMissing:
      return "red";
    case EntityCategory::kSurplus:
      break;
  }
  return "blue";
}

std::string_view CategoryColor(EntityCategory c) {
  switch (c) {
    case EntityCategory::kMatched:
      return kMatchedColor;
    case EntityCategory::kMismatched:
      return kMismatchedColor;
    case EntityCategory::kMissing:
      return kMissingColor;
    case EntityCategory::kSurplus:
      break;
  }
  return kSurplusColor;
}

std::string HtmlEscape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

VisualizationDoc RenderEntityHtml(const ReportPair& pair,
                                  const EntitySet& final_entities,
                                  const EntitySet& prelim_entities,
                                  const Classification& cls,
                                  SectionSelector section) {
  const std::string final_text = PairText(pair, Side::kFinal, section);
  const std::string prelim_text = PairText(pair, Side::kPreliminary, section);

  VisualizationDoc doc;
  doc.pair_id = pair.id;
  doc.body =
      "<div class=\"entity-comparison\" "
      "style=\"display:flex;gap:16px;align-items:flex-start\">\n";
  doc.body += Panel("Preliminary report", "preliminary", prelim_text,
                    prelim_entities, cls, Side::kPreliminary);
  doc.body += Panel("Final report", "final", final_text, final_entities, cls,
                    Side::kFinal);
  doc.body += "</div>\n";
  doc.body += Legend();
  doc.html = DocumentHead("Entity comparison: " + HtmlEscape(pair.id)) +
             doc.body + std::string(kDocumentTail);
  return doc;
}

std::string RenderComparisonReport(const ScoreResult& result,
                                   const VisualizationDoc& doc,
                                   const std::optional<std::string>& explanation) {
  if (result.method != Method::kLlamaEntScore || !result.score01) {
    throw InputError("comparison report needs an entscore result");
  }
  std::string out =
      DocumentHead("Report comparison: " + HtmlEscape(doc.pair_id));
  out += "<table class=\"scores\">\n";
  out += Row("Score (0-1)", text::FormatFixed(*result.score01, 2));
  out += Row("Score (0-10)", text::FormatFixed(result.score10, 1) + "/10");
  if (result.flags & kFlagEmptyReports) {
    out += Row("Note", "no entities recognised in either report");
  }
  out += "</table>\n";

  if (result.classification) {
    const CategoryCounts n = Counts(*result.classification);
    out += "<h2>Entity categories</h2>\n<table class=\"counts\">\n";
    out += Row("matched", std::to_string(n.matched));
    out += Row("mismatched", std::to_string(n.mismatched));
    out += Row("missing", std::to_string(n.missing));
    out += Row("surplus", std::to_string(n.surplus));
    out += "</table>\n";
  }
  if (result.weights) {
    out += "<h2>Weights</h2>\n<p class=\"weights\">" +
           HtmlEscape(result.weights->ToString()) + "</p>\n";
  }
  out += "<h2>Entities</h2>\n";
  out += doc.body;

  const std::optional<std::string>& text =
      explanation ? explanation : result.explanation;
  if (text) {
    out += "<h2>Explanation</h2>\n<p class=\"explanation\" "
           "style=\"white-space:pre-wrap\">" +
           HtmlEscape(*text) + "</p>\n";
  }
  out += kDocumentTail;
  return out;
}

std::string ScoreResultJson(const ScoreResult& result,
                            std::string_view pair_id) {
  json out = json::object();
  out["pair_id"] = pair_id;
  out["method"] = std::string(MethodName(result.method));
  out["score01"] = result.score01 ? json(*result.score01) : json(nullptr);
  out["score10"] = result.score10;
  json flags = json::array();
  if (result.flags & kFlagEmptyFinal) flags.push_back("EmptyFinal");
  if (result.flags & kFlagEmptyReports) flags.push_back("EmptyReports");
  out["flags"] = flags;
  if (result.classification) {
    const auto& c = *result.classification;
    out["classification"] = {{"matched", TermArray(c.matched)},
                             {"mismatched", TermArray(c.mismatched)},
                             {"missing", TermArray(c.missing)},
                             {"surplus", TermArray(c.surplus)}};
  }
  if (result.weights) {
    out["weights"] = {{"missing", result.weights->missing},
                      {"mismatch", result.weights->mismatch},
                      {"surplus", result.weights->surplus}};
  }
  if (result.explanation) out["explanation"] = *result.explanation;
  return out.dump();
}

}  // namespace radcmp
