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

// Class-weighted L1-loss linear SVM with an unregularized bias:
//
//   P(w, b) = 1/2 |w|^2 + C * sum_i wt_i * max(0, 1 - y_i (w.x_i + b))
//
// Each epoch runs a pass of pairwise dual coordinate steps (the pair keeps
// sum_i y_i alpha_i = 0, which is what leaves the bias unregularized), then
// moves the primal iterate by an exact line search toward w(alpha) and
// re-fits the bias exactly. The primal objective therefore never increases
// between epochs. Training stops once the duality gap falls below
// tolerance * max(1, P).

#ifndef FORGE_SVM_H_
#define FORGE_SVM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "forge/labels.h"

namespace forge {

struct FeatureEntry {
  std::uint32_t id = 0;
  double value = 0.0;
  bool operator==(const FeatureEntry&) const = default;
};

// Sparse vector with strictly increasing ids.
struct FeatureVector {
  std::vector<FeatureEntry> entries;
  bool operator==(const FeatureVector&) const = default;
};

double dot(const std::vector<double>& dense, const FeatureVector& x);
double dot(const FeatureVector& a, const FeatureVector& b);

struct TrainConfig {
  double c = 1.0;
  double class_weight_pos = 1.0;  // job
  double class_weight_neg = 1.0;  // notjob
  int epochs = 2000;
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& cfg);

struct SvmSolution {
  std::vector<double> weights;
  double bias = 0.0;
  // Primal objective after initialization (index 0) and after each epoch.
  std::vector<double> objective_trace;
  double duality_gap = 0.0;
  int epochs_run = 0;
  bool converged = false;
};

// Throws InvalidArgument for mismatched sizes, fewer than two samples, a
// single class, ids >= dim or an invalid config.
SvmSolution train_svm(std::span<const FeatureVector> x, std::span<const Label> y,
                      const TrainConfig& cfg, std::size_t dim);

double primal_objective(std::span<const FeatureVector> x, std::span<const Label> y,
                        const TrainConfig& cfg, const std::vector<double>& w, double b);

// A term c * max(0, a - d*t) of a one-dimensional convex objective.
struct HingeTerm {
  double a = 0.0;
  double d = 0.0;
  double c = 0.0;
};

// Exact minimizer over [lo, hi] of 1/2 quad t^2 + lin t + sum of hinge terms
// (quad >= 0, c >= 0). Infinite bounds are allowed when the objective is
// bounded below in that direction. On a flat minimum the midpoint is chosen.
double minimize_hinge_sum(double quad, double lin, std::vector<HingeTerm> terms, double lo,
                          double hi);

}  // namespace forge

#endif  // FORGE_SVM_H_
