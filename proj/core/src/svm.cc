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
#include <numeric>
#include <string>

#include "forge/errors.h"
#include "forge/random.h"

namespace forge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double t, const FeatureVector& x, std::vector<double>& w) {
  for (const auto& e : x.entries) w[e.id] += t * e.value;
}

double loss_sum(const std::vector<double>& margins, std::span<const double> ys,
                std::span<const double> upper, double b) {
  double s = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    s += upper[i] * std::max(0.0, 1.0 - ys[i] * (margins[i] + b));
  }
  return s;
}

// argmin_b sum_i U_i * max(0, 1 - y_i (m_i + b)).
double best_bias(const std::vector<double>& margins, std::span<const double> ys,
                 std::span<const double> upper) {
  std::vector<HingeTerm> terms(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    terms[i] = {1.0 - ys[i] * margins[i], ys[i], upper[i]};
  }
  return minimize_hinge_sum(0.0, 0.0, std::move(terms), -kInf, kInf);
}

}  // namespace

double dot(const std::vector<double>& dense, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += dense[e.id] * e.value;
  return s;
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->id < j->id) {
      ++i;
    } else if (j->id < i->id) {
      ++j;
    } else {
      s += i->value * j->value;
      ++i;
      ++j;
    }
  }
  return s;
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.c > 0) || !(cfg.class_weight_pos > 0) || !(cfg.class_weight_neg > 0)) {
    throw InvalidArgument("C and class weights must be positive");
  }
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be positive");
  if (!(cfg.tolerance > 0)) throw InvalidArgument("tolerance must be positive");
}

double minimize_hinge_sum(double quad, double lin, std::vector<HingeTerm> terms, double lo,
                          double hi) {
  struct Event {
    double t;
    double delta;  // change of S = sum_active c*d when crossing t left to right
  };
  // S collects c*d over terms with a - d*t > 0 just right of `lo`.
  double s = 0.0;
  std::vector<Event> events;
  events.reserve(terms.size());
  for (const auto& h : terms) {
    if (h.c == 0.0) continue;
    bool active;
    if (std::isinf(lo)) {
      active = h.d > 0 || (h.d == 0 && h.a > 0);
    } else {
      const double r = h.a - h.d * lo;
      active = r > 0 || (r == 0 && h.d < 0);
    }
    if (active) s += h.c * h.d;
    if (h.d != 0) {
      const double t = h.a / h.d;
      if (t > lo && t < hi) events.push_back({t, -h.c * std::fabs(h.d)});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.t < y.t; });

  double left = lo;
  std::size_t k = 0;
  for (;;) {
    const double right = k < events.size() ? events[k].t : hi;
    // Derivative on (left, right): quad*t + lin - s.
    if (quad > 0) {
      const double root = (s - lin) / quad;
      if (root <= left) return left;
      if (root < right) return root;
    } else {
      const double g = lin - s;
      if (g > 0) {
        if (std::isinf(left)) throw InvalidArgument("objective unbounded below");
        return left;
      }
      if (g == 0) {
        if (std::isinf(left) && std::isinf(right)) return 0.0;
        if (std::isinf(left)) return right;
        if (std::isinf(right)) return left;
        return 0.5 * (left + right);
      }
    }
    if (k >= events.size()) {
      if (std::isinf(hi)) throw InvalidArgument("objective unbounded below");
      return hi;
    }
    left = right;
    while (k < events.size() && events[k].t == right) s += events[k++].delta;
  }
}

double primal_objective(std::span<const FeatureVector> x, std::span<const Label> y,
                        const TrainConfig& cfg, const std::vector<double>& w, double b) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool pos = y[i] == Label::kJob;
    const double yi = pos ? 1.0 : -1.0;
    const double wt = pos ? cfg.class_weight_pos : cfg.class_weight_neg;
    loss += wt * std::max(0.0, 1.0 - yi * (dot(w, x[i]) + b));
  }
  return 0.5 * sq_norm(w) + cfg.c * loss;
}

SvmSolution train_svm(std::span<const FeatureVector> x, std::span<const Label> y,
                      const TrainConfig& cfg, std::size_t dim) {
  validate(cfg);
  if (x.size() != y.size()) throw InvalidArgument("feature and label counts differ");
  if (x.size() < 2) throw InvalidArgument("training needs at least two samples");
  const std::size_t n = x.size();
  std::vector<double> ys(n), upper(n), self(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = y[i] == Label::kJob;
    positives += pos;
    ys[i] = pos ? 1.0 : -1.0;
    upper[i] = cfg.c * (pos ? cfg.class_weight_pos : cfg.class_weight_neg);
    std::uint32_t last = 0;
    for (std::size_t e = 0; e < x[i].entries.size(); ++e) {
      const auto& fe = x[i].entries[e];
      if (fe.id >= dim) throw InvalidArgument("feature id out of range");
      if (e > 0 && fe.id <= last) throw InvalidArgument("feature ids must strictly increase");
      last = fe.id;
    }
    self[i] = dot(x[i], x[i]);
  }
  if (positives == 0 || positives == n) {
    throw InvalidArgument("training data must contain both classes");
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> w_dual(dim, 0.0);
  std::vector<double> w(dim, 0.0);
  std::vector<double> margins(n, 0.0);
  std::vector<double> cand_margins(n, 0.0);
  double b = best_bias(margins, ys, upper);

  SvmSolution sol;
  double objective = 0.5 * sq_norm(w) + loss_sum(margins, ys, upper, b);
  sol.objective_trace.push_back(objective);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> rank(n);
  std::vector<double> v(n);
  std::vector<std::size_t> up, low;
  up.reserve(n);
  low.reserve(n);

  // alpha_i may move so that y_i alpha_i grows (up) or shrinks (low).
  auto in_up = [&](std::size_t i) { return ys[i] > 0 ? alpha[i] < upper[i] : alpha[i] > 0; };
  auto in_low = [&](std::size_t i) { return ys[i] > 0 ? alpha[i] > 0 : alpha[i] < upper[i]; };
  auto up_room = [&](std::size_t i) { return ys[i] > 0 ? upper[i] - alpha[i] : alpha[i]; };
  auto low_room = [&](std::size_t i) { return ys[i] > 0 ? alpha[i] : upper[i] - alpha[i]; };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

    // v_i = -y_i * grad_i of the dual; a pair (i in up, j in low) violates
    // optimality when v_i > v_j.
    up.clear();
    low.clear();
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = ys[i] - dot(w_dual, x[i]);
      if (in_up(i)) up.push_back(i);
      if (in_low(i)) low.push_back(i);
    }
    std::sort(up.begin(), up.end(), [&](std::size_t a, std::size_t c) {
      return v[a] != v[c] ? v[a] > v[c] : rank[a] < rank[c];
    });
    std::sort(low.begin(), low.end(), [&](std::size_t a, std::size_t c) {
      return v[a] != v[c] ? v[a] < v[c] : rank[a] < rank[c];
    });

    const std::size_t pairs = std::min(up.size(), low.size());
    for (std::size_t r = 0; r < pairs; ++r) {
      const std::size_t i = up[r];
      const std::size_t j = low[r];
      if (i == j || !in_up(i) || !in_low(j)) continue;
      const double vi = ys[i] - dot(w_dual, x[i]);
      const double vj = ys[j] - dot(w_dual, x[j]);
      const double diff = vi - vj;
      if (!(diff > 1e-12)) continue;
      const double curvature = self[i] + self[j] - 2.0 * dot(x[i], x[j]);
      const double room = std::min(up_room(i), low_room(j));
      double t = curvature > 0 ? std::min(diff / curvature, room) : room;
      if (!(t > 0)) continue;
      alpha[i] = std::clamp(alpha[i] + ys[i] * t, 0.0, upper[i]);
      alpha[j] = std::clamp(alpha[j] - ys[j] * t, 0.0, upper[j]);
      axpy(t, x[i], w_dual);
      axpy(-t, x[j], w_dual);
    }

    // Primal step toward (w_dual, best bias for w_dual).
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] = dot(w, x[i]);
      cand_margins[i] = dot(w_dual, x[i]);
    }
    const double cand_b = best_bias(cand_margins, ys, upper);
    std::vector<double> dw(dim);
    for (std::size_t f = 0; f < dim; ++f) dw[f] = w_dual[f] - w[f];
    const double db = cand_b - b;
    std::vector<HingeTerm> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
      terms[i] = {1.0 - ys[i] * (margins[i] + b),
                  ys[i] * (cand_margins[i] - margins[i] + db), upper[i]};
    }
    const double step = minimize_hinge_sum(sq_norm(dw), dense_dot(w, dw), std::move(terms), 0.0, 1.0);

    std::vector<double> next_w = w;
    std::vector<double> next_margins(n);
    for (std::size_t f = 0; f < dim; ++f) next_w[f] += step * dw[f];
    for (std::size_t i = 0; i < n; ++i) next_margins[i] = dot(next_w, x[i]);
    double next_b = b + step * db;
    const double refit_b = best_bias(next_margins, ys, upper);
    const double norm_half = 0.5 * sq_norm(next_w);
    const double with_step = norm_half + loss_sum(next_margins, ys, upper, next_b);
    const double with_refit = norm_half + loss_sum(next_margins, ys, upper, refit_b);
    double next_objective = with_step;
    if (with_refit <= with_step) {
      next_b = refit_b;
      next_objective = with_refit;
    }
    if (next_objective <= objective) {
      w = std::move(next_w);
      b = next_b;
      objective = next_objective;
    }
    sol.objective_trace.push_back(objective);
    sol.epochs_run = epoch;

    const double dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * sq_norm(w_dual);
    sol.duality_gap = objective - dual;
    if (sol.duality_gap <= cfg.tolerance * std::max(1.0, std::fabs(objective))) {
      sol.converged = true;
      break;
    }
  }
  sol.weights = std::move(w);
  sol.bias = b;
  return sol;
}

}  // namespace forge
