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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "json.hpp"
#include "oracles.h"
#include "radcmp/error.h"
#include "test_support.h"

namespace radcmp {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

std::size_t Count(const std::string& haystack, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t at = haystack.find(needle); at != std::string::npos;
       at = haystack.find(needle, at + needle.size())) {
    ++n;
  }
  return n;
}

EntScoreRun RunSyn07(bool explain = false) {
  const LlmGateway gw = testing::MockGateway();
  const LexiconExtractor ex(testing::BundledLexicon());
  const Explainer explainer = gw.AsExplainer();
  EntScoreOptions opt;
  opt.explainer = explain ? &explainer : nullptr;
  return LlamaEntScore(*FindPair(testing::SyntheticCorpus(), "syn-07"), ex,
                       gw.AsJudge(), opt);
}

VisualizationDoc RenderSyn07(const EntScoreRun& run) {
  return RenderEntityHtml(*FindPair(testing::SyntheticCorpus(), "syn-07"),
                          run.final_entities, run.prelim_entities,
                          *run.result.classification);
}

TEST(HtmlEscapeTest, EscapesMarkup) {
  EXPECT_EQ(HtmlEscape(R"(<a href="x">'&'</a>)"),
            "&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;");
}

TEST(CategoryTest, LegendColours) {
  EXPECT_EQ(CategoryColorName(EntityCategory::kMatched), "green");
  EXPECT_EQ(CategoryColorName(EntityCategory::kMismatched), "yellow");
  EXPECT_EQ(CategoryColorName(EntityCategory::kMissing), "red");
  EXPECT_EQ(CategoryColorName(EntityCategory::kSurplus), "blue");
  EXPECT_EQ(CategoryColor(EntityCategory::kMatched), kMatchedColor);
  EXPECT_EQ(CategoryColor(EntityCategory::kSurplus), kSurplusColor);
}

TEST(VisualizationTest, Syn07MarksEveryOccurrence) {
  const EntScoreRun run = RunSyn07();
  const VisualizationDoc doc = RenderSyn07(run);
  std::string why;
  EXPECT_TRUE(testing::IsWellFormedXml(doc.html, &why)) << why;
  EXPECT_EQ(Count(doc.html, "<mark "),
            run.final_entities.size() + run.prelim_entities.size());
  const Classification& c = *run.result.classification;
  auto occurrences = [&](const TermSet& terms, const EntitySet& side) {
    std::size_t n = 0;
    for (const auto& e : side.entities()) n += terms.count(e.normalized);
    return n;
  };
  EXPECT_EQ(Count(doc.html, "data-category=\"matched\""),
            occurrences(c.matched, run.final_entities) +
                occurrences(c.matched, run.prelim_entities));
  EXPECT_EQ(Count(doc.html, "data-category=\"missing\""),
            occurrences(c.missing, run.final_entities));
  EXPECT_EQ(Count(doc.html, "data-category=\"surplus\""),
            occurrences(c.surplus, run.prelim_entities));
  EXPECT_THAT(doc.html, HasSubstr("data-side=\"preliminary\""));
  EXPECT_THAT(doc.html, HasSubstr("data-side=\"final\""));
  EXPECT_EQ(doc.pair_id, "syn-07");
  EXPECT_THAT(doc.html, HasSubstr(doc.body));
}

TEST(VisualizationTest, Syn07MatchesGolden) {
  const EntScoreRun run = RunSyn07();
  EXPECT_EQ(RenderSyn07(run).html,
            testing::ReadFile(testing::GoldenPath("syn07_entities.html")));
  EXPECT_EQ(ScoreResultJson(run.result, "syn-07") + "\n",
            testing::ReadFile(testing::GoldenPath("syn07_score.json")));
}

TEST(VisualizationTest, EscapesReportText) {
  const ReportPair pair{"a<b", Modality::kCt,
                        Report::Make("x < y & effusion", std::nullopt),
                        Report::Make("effusion \"quoted\"", std::nullopt),
                        std::nullopt};
  const LexiconExtractor ex(Lexicon({"effusion"}));
  const EntScoreRun run = LlamaEntScore(
      pair, ex,
      [](const std::string&, std::string_view, std::string_view) {
        return ContextValue::kSame;
      },
      {});
  const VisualizationDoc doc =
      RenderEntityHtml(pair, run.final_entities, run.prelim_entities,
                       *run.result.classification);
  std::string why;
  EXPECT_TRUE(testing::IsWellFormedXml(doc.html, &why)) << why;
  EXPECT_THAT(doc.html, HasSubstr("x &lt; y &amp; "));
  EXPECT_THAT(doc.html, HasSubstr("a&lt;b"));
}

TEST(VisualizationTest, RejectsBadSpans) {
  const ReportPair pair{"p", Modality::kCt, Report::Make("effusion", std::nullopt),
                        Report::Make("effusion", std::nullopt), std::nullopt};
  Classification cls;
  cls.matched = {"effusion"};
  const EntitySet ok({testing::MakeEntity("effusion", 0)});
  EXPECT_NO_THROW(RenderEntityHtml(pair, ok, ok, cls));
  const EntitySet beyond({Entity{"effusion", "effusion", {4, 12}, {}}});
  EXPECT_THROW(RenderEntityHtml(pair, beyond, ok, cls), InputError);
  const EntitySet overlap({Entity{"effusion", "effusion", {0, 8}, {}},
                           Entity{"fusion", "fusion", {2, 8}, {}}});
  cls.surplus = {"fusion"};
  EXPECT_THROW(RenderEntityHtml(pair, ok, overlap, cls), InputError);
  EXPECT_THROW(RenderEntityHtml(pair, ok, ok, Classification{}), InputError);
}

TEST(ComparisonReportTest, ContainsScoresCountsAndExplanation) {
  const EntScoreRun run = RunSyn07(/*explain=*/true);
  const std::string html = RenderComparisonReport(run.result, RenderSyn07(run));
  std::string why;
  EXPECT_TRUE(testing::IsWellFormedXml(html, &why)) << why;
  EXPECT_THAT(html, HasSubstr("<td>0.27</td>"));
  EXPECT_THAT(html, HasSubstr("<td>2.7/10</td>"));
  EXPECT_THAT(html, HasSubstr("missing=2,mismatch=1.5,surplus=1"));
  EXPECT_THAT(html, HasSubstr("Reports share"));
  EXPECT_THAT(html, HasSubstr("<h2>Explanation</h2>"));
  const std::string custom =
      RenderComparisonReport(run.result, RenderSyn07(run), "Custom & note");
  EXPECT_THAT(custom, HasSubstr("Custom &amp; note"));

  EntScoreRun plain = RunSyn07();
  EXPECT_THAT(RenderComparisonReport(plain.result, RenderSyn07(plain)),
              Not(HasSubstr("Explanation")));
  plain.result.method = Method::kNerCosine;
  EXPECT_THROW(RenderComparisonReport(plain.result, RenderSyn07(plain)),
               InputError);
}

TEST(ScoreJsonTest, Fields) {
  const nlohmann::json j =
      nlohmann::json::parse(ScoreResultJson(RunSyn07().result, "syn-07"));
  EXPECT_EQ(j["pair_id"], "syn-07");
  EXPECT_EQ(j["method"], "entscore");
  EXPECT_NEAR(j["score01"].get<double>(), 2.0 / 7.5, 1e-15);
  EXPECT_EQ(j["classification"]["missing"][0], "disc herniation");
  EXPECT_EQ(j["weights"]["missing"], 2.0);

  ScoreResult direct;
  direct.method = Method::kDirectLlm;
  direct.score10 = 7.5;
  direct.flags = kFlagEmptyFinal;
  const nlohmann::json d = nlohmann::json::parse(ScoreResultJson(direct, "x"));
  EXPECT_TRUE(d["score01"].is_null());
  EXPECT_EQ(d["score10"], 7.5);
  EXPECT_EQ(d["flags"][0], "EmptyFinal");
}

TEST(WellFormednessOracleTest, CatchesErrors) {
  EXPECT_TRUE(testing::IsWellFormedXml("<a x=\"1\"><b/>t &amp; u</a>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a><b></a></b>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a>x & y</a>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a x=1></a>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a x=\"1\" x=\"2\"></a>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a></a><b></b>"));
  EXPECT_FALSE(testing::IsWellFormedXml("<a>"));
}

}  // namespace
}  // namespace radcmp
