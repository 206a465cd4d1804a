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

// N-gram bag-of-words features and the linear labelers built on train_svm.

#ifndef FORGE_MODEL_H_
#define FORGE_MODEL_H_

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "forge/labels.h"
#include "forge/normalize.h"
#include "forge/svm.h"

namespace forge {

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms must be distinct; ids follow lexicographic order.
  explicit Vocabulary(std::vector<std::string> terms);

  std::size_t size() const { return terms_.size(); }
  std::optional<std::uint32_t> id(std::string_view term) const;
  const std::string& term(std::uint32_t id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }

  bool operator==(const Vocabulary& o) const { return terms_ == o.terms_; }

 private:
  std::vector<std::string> terms_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
};

// N-grams (n <= max_n) present in at least min_df distinct documents.
// Throws InvalidArgument for empty docs or min_df < 1.
Vocabulary build_vocab(std::span<const NormalizedDoc> docs, int max_n, int min_df = 1);

// Raw counts of in-vocabulary n-grams.
FeatureVector vectorize(const NormalizedDoc& doc, const Vocabulary& vocab, int max_n);
std::vector<FeatureVector> vectorize_all(std::span<const NormalizedDoc> docs,
                                         const Vocabulary& vocab, int max_n);

struct Prediction {
  Label label = Label::kNotJob;
  double confidence = 0.0;  // w.x + b
};

struct LinearModel {
  Vocabulary vocab;
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;
  int max_n = 3;
  int min_df = 1;

  double decision(const FeatureVector& x) const { return dot(weights, x) + bias; }
  bool operator==(const LinearModel&) const;
};

inline Label label_for(double confidence) {
  return confidence > 0 ? Label::kJob : Label::kNotJob;
}

// Builds the vocabulary from `docs`, vectorizes and trains.
LinearModel fit(std::span<const NormalizedDoc> docs, std::span<const Label> labels,
                const TrainConfig& cfg, int max_n = 3, int min_df = 1);

Prediction predict(const LinearModel& model, const NormalizedDoc& doc);

struct ScoredId {
  std::string tweet_id;
  double confidence = 0.0;
  bool operator==(const ScoredId&) const = default;
};

struct RankedPredictions {
  std::vector<ScoredId> positive;  // predicted job, |confidence| descending
  std::vector<ScoredId> negative;  // predicted notjob, |confidence| descending
};

// Ties in |confidence| are broken by tweet_id ascending.
RankedPredictions decision_rank(std::vector<ScoredId> scored);
RankedPredictions decision_rank(const LinearModel& model, std::span<const NormalizedDoc> docs);

struct GridCell {
  double c = 1.0;
  double class_weight_pos = 1.0;
  double class_weight_neg = 1.0;
};

// pos weight {1,2,3,5,8} x neg weight 1 x C {0.1,1,10}, C varying slowest.
std::vector<GridCell> default_grid();

// Fold index per sample: each class is shuffled with `seed`, then dealt
// round-robin. Throws InvalidArgument if either class has fewer than k
// samples or k < 2.
std::vector<int> stratified_folds(std::span<const Label> y, int k, std::uint64_t seed);

struct CvCell {
  GridCell cell;
  std::vector<double> fold_f1;  // job-class F1 per fold
  double mean_f1 = 0.0;
};

struct CvReport {
  std::vector<CvCell> cells;
  std::size_t best_index = 0;
  TrainConfig best;
};

// Stratified k-fold CV of job-class F1 for each cell. The best cell has the
// highest mean; ties go to the earlier cell.
CvReport grid_search_cv(std::span<const FeatureVector> x, std::span<const Label> y, std::size_t dim,
                        const std::vector<GridCell>& grid, int k, const TrainConfig& base);

// Mean job-class F1 of a single configuration under the given folds.
CvCell cross_validate(std::span<const FeatureVector> x, std::span<const Label> y, std::size_t dim,
                      const std::vector<int>& folds, int k, const TrainConfig& cfg);

// Text format with hexadecimal floats, so save(load(s)) reproduces s.
void save_model(const LinearModel& model, std::ostream& out);
LinearModel load_model(std::istream& in);
void save_model_file(const LinearModel& model, const std::string& path);
LinearModel load_model_file(const std::string& path);

}  // namespace forge

#endif  // FORGE_MODEL_H_
