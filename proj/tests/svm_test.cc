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

#include "forge/svm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "forge/errors.h"
#include "forge/metrics.h"
#include "forge/random.h"

namespace forge {
namespace {

struct Dataset {
  std::vector<FeatureVector> x;
  std::vector<Label> y;
};

FeatureVector Dense2(double a, double b) { return {{{0, a}, {1, b}}}; }

// Three job points and three notjob points in the plane; not separable.
Dataset SixPoints() {
  Dataset d;
  d.x = {Dense2(1, 1), Dense2(-1, 2), Dense2(1, -2), Dense2(2, 2), Dense2(-1, -2), Dense2(1, -1)};
  d.y = {Label::kJob, Label::kJob, Label::kJob, Label::kNotJob, Label::kNotJob, Label::kNotJob};
  return d;
}

double Objective(const Dataset& d, const TrainConfig& cfg, double w0, double w1, double b) {
  double loss = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double y = d.y[i] == Label::kJob ? 1.0 : -1.0;
    const double wt = d.y[i] == Label::kJob ? cfg.class_weight_pos : cfg.class_weight_neg;
    const double m = w0 * d.x[i].entries[0].value + w1 * d.x[i].entries[1].value + b;
    loss += wt * std::max(0.0, 1.0 - y * m);
  }
  return 0.5 * (w0 * w0 + w1 * w1) + cfg.c * loss;
}

// Exhaustive search over [-3,3]^3 in steps of 0.01.
double GridMinimum(const Dataset& d, const TrainConfig& cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -300; i <= 300; ++i) {
    for (int j = -300; j <= 300; ++j) {
      for (int k = -300; k <= 300; ++k) {
        best = std::min(best, Objective(d, cfg, i * 0.01, j * 0.01, k * 0.01));
      }
    }
  }
  return best;
}

double Decision(const SvmSolution& s, const FeatureVector& x) { return dot(s.weights, x) + s.bias; }

// Sparse points labeled by a random hyperplane, keeping a margin of 0.5.
Dataset Separable(std::uint64_t seed, std::size_t n, std::uint32_t dim) {
  Rng rng(seed);
  std::vector<double> w(dim);
  for (double& v : w) v = rng.uniform() * 2 - 1;
  Dataset d;
  while (d.x.size() < n) {
    FeatureVector x;
    for (std::uint32_t f = 0; f < dim; ++f) {
      if (rng.bernoulli(0.4)) x.entries.push_back({f, static_cast<double>(1 + rng.below(3))});
    }
    const double m = dot(w, x) - 0.3;
    if (std::abs(m) < 0.5) continue;
    d.x.push_back(x);
    d.y.push_back(m > 0 ? Label::kJob : Label::kNotJob);
  }
  return d;
}

//===----------------------------------------------------------------------===//
// Optimality
//===----------------------------------------------------------------------===//

TEST(TrainSvm, MatchesBruteForceMinimum) {
  const Dataset d = SixPoints();
  TrainConfig cfg;
  const SvmSolution s = train_svm(d.x, d.y, cfg, 2);
  const double trained = primal_objective(d.x, d.y, cfg, s.weights, s.bias);
  EXPECT_NEAR(trained, Objective(d, cfg, s.weights[0], s.weights[1], s.bias), 1e-12);
  const double grid = GridMinimum(d, cfg);
  EXPECT_NEAR(trained, grid, 1e-3);
  EXPECT_TRUE(s.converged);
  // Driven to a tight gap, the solver reaches the grid-aligned optimum.
  TrainConfig tight = cfg;
  tight.tolerance = 1e-10;
  tight.epochs = 100000;
  const SvmSolution t = train_svm(d.x, d.y, tight, 2);
  EXPECT_LE(primal_objective(d.x, d.y, tight, t.weights, t.bias), grid + 1e-9);
}

TEST(TrainSvm, ClassWeightedBruteForce) {
  const Dataset d = SixPoints();
  TrainConfig cfg;
  cfg.class_weight_pos = 2.0;
  cfg.c = 0.5;
  const SvmSolution s = train_svm(d.x, d.y, cfg, 2);
  const double trained = primal_objective(d.x, d.y, cfg, s.weights, s.bias);
  // The grid only bounds the optimum from above here.
  EXPECT_LE(trained, GridMinimum(d, cfg) + 1e-9);
}

TEST(TrainSvm, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Dataset d = Separable(seed, 200, 30);
    // Flip a few labels so the hinge terms stay active.
    for (std::size_t i = 0; i < d.y.size(); i += 17) {
      d.y[i] = d.y[i] == Label::kJob ? Label::kNotJob : Label::kJob;
    }
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.class_weight_pos = 1.0 + static_cast<double>(seed % 3);
    cfg.tolerance = 1e-8;
    const SvmSolution s = train_svm(d.x, d.y, cfg, 30);
    ASSERT_GE(s.objective_trace.size(), 2u);
    for (std::size_t e = 1; e < s.objective_trace.size(); ++e) {
      ASSERT_LE(s.objective_trace[e], s.objective_trace[e - 1] + 1e-9) << "seed " << seed;
    }
  }
}

TEST(TrainSvm, SeparableDataFitsPerfectly) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = Separable(seed + 100, 150, 20);
    TrainConfig cfg;
    cfg.c = 10;
    cfg.seed = seed;
    const SvmSolution s = train_svm(d.x, d.y, cfg, 20);
    std::vector<Label> pred;
    for (const auto& x : d.x) pred.push_back(Decision(s, x) > 0 ? Label::kJob : Label::kNotJob);
    ASSERT_EQ(eval_report(pred, d.y).positive().f1, 1.0) << "seed " << seed;
  }
}

TEST(TrainSvm, TwoPointExample) {
  const std::vector<FeatureVector> x = {{{{0, 1.0}}}, {{{1, 1.0}}}};
  const std::vector<Label> y = {Label::kJob, Label::kNotJob};
  const SvmSolution s = train_svm(x, y, TrainConfig{}, 2);
  EXPECT_GT(Decision(s, x[0]), 0);
  EXPECT_LT(Decision(s, x[1]), 0);
}

TEST(TrainSvm, DuplicatedSetWithHalfC) {
  Dataset d = Separable(7, 120, 15);
  for (std::size_t i = 0; i < d.y.size(); i += 9) {
    d.y[i] = d.y[i] == Label::kJob ? Label::kNotJob : Label::kJob;
  }
  Dataset twice = d;
  twice.x.insert(twice.x.end(), d.x.begin(), d.x.end());
  twice.y.insert(twice.y.end(), d.y.begin(), d.y.end());
  TrainConfig cfg;
  cfg.tolerance = 1e-9;
  TrainConfig half = cfg;
  half.c = cfg.c / 2;
  const SvmSolution a = train_svm(d.x, d.y, cfg, 15);
  const SvmSolution b = train_svm(twice.x, twice.y, half, 15);
  const Dataset held_out = Separable(8, 200, 15);
  int compared = 0;
  for (const auto& x : held_out.x) {
    const double da = Decision(a, x), db = Decision(b, x);
    if (std::abs(da) < 1e-3) continue;
    ASSERT_EQ(da > 0, db > 0);
    ++compared;
  }
  EXPECT_GT(compared, 150);
}

TEST(TrainSvm, FeatureScalingWithInverseC) {
  // Scaling x by s and C by 1/s^2 maps the optimum w to w/s, leaving every
  // decision value in place; so the ranking of held-out points is the same.
  Dataset d = Separable(9, 120, 12);
  for (std::size_t i = 0; i < d.y.size(); i += 7) {
    d.y[i] = d.y[i] == Label::kJob ? Label::kNotJob : Label::kJob;
  }
  const double scale = 3.0;
  Dataset scaled = d;
  for (auto& x : scaled.x) {
    for (auto& e : x.entries) e.value *= scale;
  }
  TrainConfig cfg;
  cfg.tolerance = 1e-10;
  TrainConfig inv = cfg;
  inv.c = cfg.c / (scale * scale);
  const SvmSolution a = train_svm(d.x, d.y, cfg, 12);
  const SvmSolution b = train_svm(scaled.x, scaled.y, inv, 12);
  const Dataset held_out = Separable(10, 60, 12);
  std::vector<std::pair<double, int>> ra, rb;
  for (std::size_t i = 0; i < held_out.x.size(); ++i) {
    FeatureVector xs = held_out.x[i];
    for (auto& e : xs.entries) e.value *= scale;
    ra.push_back({Decision(a, held_out.x[i]), static_cast<int>(i)});
    rb.push_back({Decision(b, xs), static_cast<int>(i)});
  }
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ASSERT_NEAR(ra[i].first, rb[i].first, 1e-3);
    if (i > 0 && ra[i].first - ra[i - 1].first < 1e-3) continue;  // near-ties may swap
    ASSERT_EQ(ra[i].second, rb[i].second);
  }
}

TEST(TrainSvm, Deterministic) {
  const Dataset d = Separable(11, 80, 10);
  TrainConfig cfg;
  cfg.seed = 42;
  const SvmSolution a = train_svm(d.x, d.y, cfg, 10);
  const SvmSolution b = train_svm(d.x, d.y, cfg, 10);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(TrainSvm, RejectsBadInput) {
  const std::vector<FeatureVector> x = {{{{0, 1.0}}}, {{{1, 1.0}}}};
  const std::vector<Label> same = {Label::kJob, Label::kJob};
  EXPECT_THROW(train_svm(x, same, TrainConfig{}, 2), InvalidArgument);
  const std::vector<Label> y = {Label::kJob, Label::kNotJob};
  EXPECT_THROW(train_svm(x, y, TrainConfig{}, 1), InvalidArgument);
  TrainConfig bad;
  bad.c = 0;
  EXPECT_THROW(train_svm(x, y, bad, 2), InvalidArgument);
  EXPECT_THROW(train_svm(std::span<const FeatureVector>(x.data(), 1),
                         std::span<const Label>(y.data(), 1), TrainConfig{}, 2),
               InvalidArgument);
}

//===----------------------------------------------------------------------===//
// One-dimensional line search
//===----------------------------------------------------------------------===//

TEST(MinimizeHingeSum, MatchesScan) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const double quad = rng.bernoulli(0.2) ? 0.0 : rng.uniform() * 3;
    const double lin = rng.uniform() * 4 - 2;
    std::vector<HingeTerm> terms;
    const int m = 1 + static_cast<int>(rng.below(6));
    for (int i = 0; i < m; ++i) {
      terms.push_back({rng.uniform() * 4 - 2, rng.uniform() * 4 - 2, rng.uniform() * 2});
    }
    const double lo = -5, hi = 5;
    auto f = [&](double t) {
      double v = 0.5 * quad * t * t + lin * t;
      for (const auto& h : terms) v += h.c * std::max(0.0, h.a - h.d * t);
      return v;
    };
    const double t = minimize_hinge_sum(quad, lin, terms, lo, hi);
    ASSERT_GE(t, lo);
    ASSERT_LE(t, hi);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i) best = std::min(best, f(lo + (hi - lo) * i / 20000.0));
    ASSERT_LE(f(t), best + 1e-9);
  }
}

}  // namespace
}  // namespace forge
