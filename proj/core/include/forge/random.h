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

// Portable seeded randomness. std::mt19937_64 has a standardized output
// sequence, but the standard distributions do not, so every draw that feeds
// a golden file goes through the helpers below.

#ifndef FORGE_RANDOM_H_
#define FORGE_RANDOM_H_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 bits of randomness.
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First min(k, v.size()) elements of a uniform random permutation.
  template <typename T>
  std::vector<T> sample(std::vector<T> v, std::size_t k) {
    k = std::min(k, v.size());
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
      std::swap(v[i], v[j]);
    }
    v.resize(k);
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Stateless uniform in [0,1) keyed by a seed and two strings.
double keyed_uniform(std::uint64_t seed, std::string_view a, std::string_view b);

// Derives an independent stream seed from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace forge

#endif  // FORGE_RANDOM_H_
