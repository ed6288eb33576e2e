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

#ifndef RADCMP_EVAL_H_
#define RADCMP_EVAL_H_

#include <array>
#include <span>
#include <string>

namespace radcmp {

inline constexpr int kNumClasses = 11;  // integer scores 0..10

enum class ScoreScale { kUnit, kTen };

struct ScaledScore {
  double value = 0.0;
  ScoreScale scale = ScoreScale::kTen;
};

using ClassCounts = std::array<int, kNumClasses>;
// confusion[truth][predicted]
using ConfusionMatrix = std::array<ClassCounts, kNumClasses>;

struct MacroMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalSummary {
  int n = 0;
  double accuracy = 0.0;
  double accuracy_pm1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionMatrix confusion{};
  ClassCounts predicted_histogram{};
  ClassCounts truth_histogram{};
};

// Unit scores are scaled by 10 first, then rounded half-up. Throws
// InputError when the score lies outside [0, 1] or [0, 10] respectively.
int RoundToClass(double score, ScoreScale scale);

// Per-class precision, recall and F1 averaged over the classes that occur in
// the truth labels. A class that is never predicted contributes precision 0,
// and F1 is 0 whenever precision + recall is 0.
MacroMetrics MacroAverage(const ConfusionMatrix& confusion);

// Throws InputError on empty input or a length mismatch.
EvalSummary Evaluate(std::span<const ScaledScore> predictions,
                     std::span<const double> truths);

ClassCounts ScoreDistribution(std::span<const ScaledScore> scores);

// "truth\predicted,0,...,10" header followed by one row per truth class.
std::string ConfusionCsv(const ConfusionMatrix& confusion);
// "class,predicted,truth" rows.
std::string HistogramCsv(const EvalSummary& summary);

}  // namespace radcmp

#endif  // RADCMP_EVAL_H_
