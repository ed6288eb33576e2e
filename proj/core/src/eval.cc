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

#include "radcmp/eval.h"

#include <cmath>
#include <algorithm>
#include <cstdlib>

#include "radcmp/error.h"
#include "radcmp/text.h"

namespace radcmp {

int RoundToClass(double score, ScoreScale scale) {
  const double hi = scale == ScoreScale::kUnit ? 1.0 : 10.0;
  if (!std::isfinite(score) || score < 0.0 || score > hi) {
    throw InputError("score " + text::FormatFixed(score, 4) +
                     " outside [0, " + text::FormatFixed(hi, 0) + "]");
  }
  const double x = scale == ScoreScale::kUnit ? score * 10.0 : score;
  // The epsilon keeps exact halves such as 0.95 * 10 rounding up.
  const int cls = static_cast<int>(std::floor(x + 0.5 + 1e-9));
  return std::clamp(cls, 0, kNumClasses - 1);
}

MacroMetrics MacroAverage(const ConfusionMatrix& confusion) {
  ClassCounts truth{};
  ClassCounts predicted{};
  for (int t = 0; t < kNumClasses; ++t) {
    for (int p = 0; p < kNumClasses; ++p) {
      truth[t] += confusion[t][p];
      predicted[p] += confusion[t][p];
    }
  }
  MacroMetrics m;
  int classes = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (truth[c] == 0) continue;
    ++classes;
    const double tp = confusion[c][c];
    const double precision = predicted[c] == 0 ? 0.0 : tp / predicted[c];
    const double recall = tp / truth[c];
    const double f1 = precision + recall == 0.0
                          ? 0.0
                          : 2.0 * precision * recall / (precision + recall);
    m.precision += precision;
    m.recall += recall;
    m.f1 += f1;
  }
  if (classes > 0) {
    m.precision /= classes;
    m.recall /= classes;
    m.f1 /= classes;
  }
  return m;
}

EvalSummary Evaluate(std::span<const ScaledScore> predictions,
                     std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw InputError("evaluate: " + std::to_string(predictions.size()) +
                     " predictions vs " + std::to_string(truths.size()) +
                     " truths");
  }
  if (predictions.empty()) throw InputError("evaluate: empty input");

  EvalSummary s;
  s.n = static_cast<int>(predictions.size());
  int exact = 0;
  int near = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = RoundToClass(predictions[i].value, predictions[i].scale);
    const int t = RoundToClass(truths[i], ScoreScale::kTen);
    ++s.confusion[t][p];
    ++s.predicted_histogram[p];
    ++s.truth_histogram[t];
    exact += p == t;
    near += std::abs(p - t) <= 1;
  }
  s.accuracy = static_cast<double>(exact) / s.n;
  s.accuracy_pm1 = static_cast<double>(near) / s.n;
  const MacroMetrics m = MacroAverage(s.confusion);
  s.precision = m.precision;
  s.recall = m.recall;
  s.f1 = m.f1;
  return s;
}

ClassCounts ScoreDistribution(std::span<const ScaledScore> scores) {
  if (scores.empty()) throw InputError("score distribution: empty input");
  ClassCounts h{};
  for (const auto& s : scores) ++h[RoundToClass(s.value, s.scale)];
  return h;
}

std::string ConfusionCsv(const ConfusionMatrix& confusion) {
  std::string out = "truth\\predicted";
  for (int c = 0; c < kNumClasses; ++c) out += "," + std::to_string(c);
  out += '\n';
  for (int t = 0; t < kNumClasses; ++t) {
    out += std::to_string(t);
    for (int p = 0; p < kNumClasses; ++p) {
      out += "," + std::to_string(confusion[t][p]);
    }
    out += '\n';
  }
  return out;
}

std::string HistogramCsv(const EvalSummary& summary) {
  std::string out = "class,predicted,truth\n";
  for (int c = 0; c < kNumClasses; ++c) {
    out += std::to_string(c) + "," +
           std::to_string(summary.predicted_histogram[c]) + "," +
           std::to_string(summary.truth_histogram[c]) + "\n";
  }
  return out;
}

}  // namespace radcmp
