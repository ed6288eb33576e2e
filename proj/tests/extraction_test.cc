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

#include "radcmp/extraction.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <random>

#include "radcmp/error.h"
#include "test_support.h"

namespace radcmp {
namespace {

using ::testing::ElementsAre;

std::vector<std::string> Surfaces(const EntitySet& s) {
  std::vector<std::string> out;
  for (const auto& e : s.entities()) out.push_back(e.surface);
  return out;
}

TEST(NormalizeEntityTest, CasefoldsCollapsesAndStrips) {
  EXPECT_EQ(NormalizeEntity("  Pleural\n  Effusion. "), "pleural effusion");
  EXPECT_EQ(NormalizeEntity("(L4-L5)"), "l4-l5");
  EXPECT_THROW(NormalizeEntity(" .,; "), InputError);
  EXPECT_THROW(NormalizeEntity(""), InputError);
}

TEST(EntitySetTest, SortsByStartAndDeduplicates) {
  const EntitySet s({testing::MakeEntity("effusion", 20),
                     testing::MakeEntity("Effusion", 0),
                     testing::MakeEntity("atelectasis", 9)});
  EXPECT_THAT(Surfaces(s), ElementsAre("Effusion", "atelectasis", "effusion"));
  EXPECT_THAT(s.distinct(), ElementsAre("atelectasis", "effusion"));
}

TEST(LexiconTest, ParseSkipsCommentsAndBlankLines) {
  const Lexicon lex = ParseLexicon("# comment\n\nDisc Bulge\n  effusion  \n");
  EXPECT_THAT(lex.terms(), ElementsAre("disc bulge", "effusion"));
  EXPECT_THROW(ParseLexicon("# only comments\n"), InputError);
  EXPECT_THROW(LoadLexicon("/nonexistent/lexicon.txt"), InputError);
}

TEST(LexiconExtractTest, LongestMatchWins) {
  const Lexicon lex({"effusion", "pleural effusion", "small"});
  const std::string text = "Small pleural effusion, no effusion elsewhere.";
  const EntitySet s = LexiconExtract(lex, text);
  EXPECT_THAT(Surfaces(s), ElementsAre("Small", "pleural effusion", "effusion"));
  EXPECT_EQ(s.entities()[1].span, (Span{6, 22}));
  EXPECT_EQ(s.entities()[1].normalized, "pleural effusion");
}

TEST(LexiconExtractTest, MatchesRespectWordBoundaries) {
  const Lexicon lex({"edema", "stenosis"});
  EXPECT_TRUE(LexiconExtract(lex, "oedema and restenosis").empty());
  EXPECT_EQ(LexiconExtract(lex, "edema-like stenosis.").size(), 2u);
}

TEST(LexiconExtractTest, MatchesAcrossLineBreaks) {
  const Lexicon lex({"back muscle spasm"});
  const std::string text = "Back  muscle\nspasm noted";
  const EntitySet s = LexiconExtract(lex, text);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.entities()[0].surface, "Back  muscle\nspasm");
  EXPECT_EQ(s.entities()[0].normalized, "back muscle spasm");
  EXPECT_EQ(s.entities()[0].span, (Span{0, 18}));
}

TEST(LexiconExtractTest, SpansPointIntoMultibyteText) {
  const Lexicon lex({"effusion"});
  const std::string text = "Caf\xC3\xA9 effusion";
  const EntitySet s = LexiconExtract(lex, text);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.entities()[0].span, (Span{6, 14}));
}

TEST(LexiconExtractTest, BundledLexiconOnSyntheticPair) {
  const auto* pair = FindPair(testing::SyntheticCorpus(), "syn-07");
  ASSERT_NE(pair, nullptr);
  const EntitySet s = LexiconExtract(testing::BundledLexicon(),
                                     PairText(*pair, Side::kFinal));
  EXPECT_THAT(s.distinct(),
              ElementsAre("back muscle spasm", "disc herniation",
                          "nerve root compression", "spinal canal stenosis"));
}

// Spans are in bounds, ordered, non-overlapping, and reproduce the surface.
TEST(LexiconExtractTest, RandomTextInvariants) {
  const Lexicon lex({"disc", "disc bulge", "bulge", "no", "edema",
                     "marrow edema", "bone marrow edema"});
  const std::vector<std::string> words = {
      "disc", "bulge", "Disc", "BULGE", "bone", "marrow", "edema", "no",
      "x",    ",",     ".",    "\n",    "  ",   "disco", "\xC3\xA9"};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 20)(rng);
    for (int i = 0; i < n; ++i) {
      text += words[std::uniform_int_distribution<std::size_t>(
          0, words.size() - 1)(rng)];
      text += ' ';
    }
    const EntitySet s = LexiconExtract(lex, text);
    std::size_t prev_end = 0;
    for (const auto& e : s.entities()) {
      ASSERT_LT(e.span.start, e.span.end);
      ASSERT_LE(e.span.end, text.size());
      ASSERT_GE(e.span.start, prev_end);
      ASSERT_EQ(e.surface,
                text.substr(e.span.start, e.span.end - e.span.start));
      ASSERT_TRUE(lex.terms().count(e.normalized)) << e.normalized;
      prev_end = e.span.end;
    }
  }
}

TEST(LexiconExtractorTest, ImplementsExtractor) {
  const LexiconExtractor ex(Lexicon({"atelectasis"}));
  const Extractor& base = ex;
  EXPECT_EQ(base.Extract("Basal atelectasis.").size(), 1u);
}

}  // namespace
}  // namespace radcmp
