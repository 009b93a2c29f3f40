// Copyright 2026 The kmedkit Authors.
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

// Seeded generator with platform-independent draws. std::mt19937_64 output
// is fixed by the standard; the distributions in <random> are not, so the
// bounded draws are done here.

#ifndef KMEDKIT_RANDOM_H_
#define KMEDKIT_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "kmedkit/rational.h"

namespace kmedkit {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, bound).
  uint64_t Below(uint64_t bound);
  // Uniform in [lo, hi].
  int64_t Between(int64_t lo, int64_t hi);
  bool Coin() { return (Next() >> 63) != 0; }
  // Index drawn with probability weights[i] / sum(weights). Weights are
  // non-negative with a positive sum.
  int Weighted(const std::vector<Rational>& weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace kmedkit

#endif  // KMEDKIT_RANDOM_H_
