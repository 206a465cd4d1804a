// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FORGE_METRICS_H_
#define FORGE_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/labels.h"

namespace forge {

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;  // reference count of the class
};

struct EvalReport {
  // Positive class first ("job" / "business").
  std::vector<ClassMetrics> classes;
  ClassMetrics weighted;  // support-weighted means, named "avg / total"

  const ClassMetrics& positive() const { return classes.at(0); }
  const ClassMetrics& negative() const { return classes.at(1); }
};

// Binary report over booleans (true = positive class). Zero denominators give
// 0. Throws InvalidArgument on empty or mismatched inputs.
EvalReport eval_binary(const std::vector<bool>& preds, const std::vector<bool>& refs,
                       const std::string& positive_name, const std::string& negative_name);

EvalReport eval_report(std::span<const Label> preds, std::span<const Label> refs);
EvalReport eval_sources(std::span<const Source> preds, std::span<const Source> refs);

// Half-up rounding to two decimals, used only for presentation.
std::string format2(double v);

// Table with rows for each class and the weighted average.
std::string format_report(const EvalReport& r, const std::string& title = {});

struct EffectiveRecallInputs {
  double corpus_job = 0;      // classifier-labeled job tweets in the full corpus
  double corpus_notjob = 0;   // classifier-labeled notjob tweets in the full corpus
  double test_job = 0;        // classifier-labeled job tweets in the test set
  double test_notjob = 0;     // test-set size minus test_job
  double test_recall = 0;     // job-class recall on the test set
};

// Recall re-weighted from the test-set class ratio to the corpus ratio:
//   Y*Nt*R / (Y*Nt*R + N*Yt*(1-R)).
// Throws UndefinedStatistic when the denominator is zero and InvalidArgument
// for negative counts or a recall outside [0,1].
double effective_recall(const EffectiveRecallInputs& in);

}  // namespace forge

#endif  // FORGE_METRICS_H_
