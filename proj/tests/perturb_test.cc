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

#include "radcmp/perturb.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <random>

#include "radcmp/error.h"
#include "radcmp/llm_gateway.h"
#include "test_support.h"

namespace radcmp {
namespace {

using ::testing::HasSubstr;

PerturbationRecord Negate(std::string_view report, std::size_t index = 0) {
  return InjectNegationRule(
      report, LexiconExtract(testing::BundledLexicon(), report), index);
}

TEST(VerifyTest, AcceptsSingleCueInsertionOrRemoval) {
  ChangeCheck c = VerifySingleChange("Back muscle spasm.", "No back muscle spasm.");
  EXPECT_TRUE(c.ok);
  EXPECT_EQ(c.kind, PerturbationKind::kNegationAdded);
  EXPECT_EQ(c.site, (Span{0, 2}));

  c = VerifySingleChange("Disc bulge without stenosis.", "Disc bulge stenosis.");
  EXPECT_TRUE(c.ok);
  EXPECT_EQ(c.kind, PerturbationKind::kNegationRemoved);
  EXPECT_EQ(c.site, (Span{11, 18}));
}

TEST(VerifyTest, RejectsOtherEdits) {
  EXPECT_EQ(VerifySingleChange("a b c", "a b c").reason, "no change");
  EXPECT_EQ(VerifySingleChange("a b c", "A, b.  c").reason, "no change");
  EXPECT_EQ(VerifySingleChange("a b c", "a x c").reason, "extra edit");
  EXPECT_EQ(VerifySingleChange("a b c", "no a b d").reason, "extra edit");
  EXPECT_EQ(VerifySingleChange("a b c", "no a not b c").reason,
            "multiple changes");
  EXPECT_EQ(VerifySingleChange("a b c", "a big b c").reason,
            "non-negation edit");
}

TEST(InjectTest, InsertsAtSentenceStart) {
  const PerturbationRecord r = Negate("Back muscle spasm. Mild disc bulge.");
  EXPECT_EQ(r.perturbed, "No back muscle spasm. Mild disc bulge.");
  EXPECT_EQ(r.site, (Span{0, 2}));
  EXPECT_EQ(r.kind, PerturbationKind::kNegationAdded);
  EXPECT_EQ(r.original, "Back muscle spasm. Mild disc bulge.");
}

TEST(InjectTest, InsertsMidSentence) {
  const PerturbationRecord r = Negate("There is pleural effusion.");
  EXPECT_EQ(r.perturbed, "There is no pleural effusion.");
  EXPECT_EQ(r.site, (Span{9, 11}));
}

TEST(InjectTest, SecondSentenceAndLineStart) {
  EXPECT_EQ(Negate("Normal heart. Pleural effusion.", 0).perturbed,
            "Normal heart. No pleural effusion.");
  EXPECT_EQ(Negate("IMPRESSION:\nInfarct.").perturbed,
            "IMPRESSION:\nNo infarct.");
}

TEST(InjectTest, KeepsAcronymCase) {
  const Lexicon lex({"DVT"});
  const std::string report = "DVT in the left leg.";
  EXPECT_EQ(InjectNegationRule(report, LexiconExtract(lex, report), 0).perturbed,
            "No DVT in the left leg.");
}

TEST(InjectTest, RemovesExistingNegation) {
  PerturbationRecord r = Negate("No pleural effusion.");
  EXPECT_EQ(r.perturbed, "Pleural effusion.");
  EXPECT_EQ(r.kind, PerturbationKind::kNegationRemoved);
  EXPECT_EQ(r.site, (Span{0, 2}));
  r = Negate("There is no pleural effusion.");
  EXPECT_EQ(r.perturbed, "There is pleural effusion.");
  EXPECT_EQ(r.site, (Span{9, 11}));
}

TEST(InjectTest, IndexOutOfRange) {
  EXPECT_THROW(Negate("Pleural effusion.", 1), InputError);
  EXPECT_THROW(InjectNegationRule("text", EntitySet{}, 0), InputError);
}

// Every rule edit on the synthetic corpus passes the verifier, and toggling
// twice restores the original text.
TEST(InjectTest, RuleEditsVerifyAndInvert) {
  for (const auto& pair : testing::SyntheticCorpus()) {
    const std::string text = PairText(pair, Side::kFinal);
    const EntitySet es = LexiconExtract(testing::BundledLexicon(), text);
    for (std::size_t i = 0; i < es.size(); ++i) {
      const PerturbationRecord r = InjectNegationRule(text, es, i);
      const ChangeCheck c = VerifySingleChange(r.original, r.perturbed);
      ASSERT_TRUE(c.ok) << pair.id << " #" << i << ": " << c.reason;
      ASSERT_EQ(c.kind, r.kind);
      ASSERT_EQ(c.site, r.site) << pair.id << " #" << i;
      const EntitySet again =
          LexiconExtract(testing::BundledLexicon(), r.perturbed);
      // Locate the same occurrence: same normalized form, same ordinal.
      std::size_t ordinal = 0;
      for (std::size_t k = 0; k < i; ++k) {
        if (es.entities()[k].normalized == es.entities()[i].normalized) {
          ++ordinal;
        }
      }
      std::size_t seen = 0;
      std::size_t j = 0;
      for (; j < again.size(); ++j) {
        if (again.entities()[j].normalized != es.entities()[i].normalized) {
          continue;
        }
        if (seen++ == ordinal) break;
      }
      ASSERT_LT(j, again.size());
      ASSERT_EQ(InjectNegationRule(r.perturbed, again, j).perturbed, text)
          << pair.id << " #" << i;
    }
  }
}

TEST(LlmNegationTest, MockProducesVerifiedEdit) {
  const LlmGateway gw = testing::MockGateway();
  const PerturbationRecord r =
      GenerateNegationLlm(gw, "Back muscle spasm. Mild disc bulge at L5-S1.");
  EXPECT_EQ(r.perturbed, "No back muscle spasm. Mild disc bulge at L5-S1.");
  EXPECT_EQ(r.kind, PerturbationKind::kNegationAdded);
}

TEST(LlmNegationTest, RejectsUntilValid) {
  auto backend = std::make_shared<testing::ScriptedBackend>(
      std::vector<std::string>{"Here you go: No effusion.", "  No effusion.\n"});
  const PerturbationRecord r =
      GenerateNegationLlm(testing::ScriptedGateway(backend), "Effusion.");
  EXPECT_EQ(r.perturbed, "No effusion.");
  EXPECT_EQ(backend->calls(), 2);
}

TEST(LlmNegationTest, GivesUpWithReason) {
  auto backend = std::make_shared<testing::ScriptedBackend>(
      std::vector<std::string>{"Effusion."});
  try {
    GenerateNegationLlm(testing::ScriptedGateway(backend, 2), "Effusion.");
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_STREQ(e.what(), "negation generation failed after 3 attempts: no change");
  }
  EXPECT_EQ(backend->calls(), 3);
  EXPECT_THROW(GenerateNegationLlm(testing::MockGateway(), "  "), InputError);
}

TEST(KindTest, Names) {
  EXPECT_EQ(PerturbationKindName(PerturbationKind::kNegationAdded),
            "negation_added");
  EXPECT_EQ(PerturbationKindName(PerturbationKind::kNegationRemoved),
            "negation_removed");
}

}  // namespace
}  // namespace radcmp
