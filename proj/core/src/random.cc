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

#include "kmedkit/random.h"

#include <stdexcept>

namespace kmedkit {

uint64_t Rng::Below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::Below(0)");
  // Rejection keeps the draw unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % bound;
}

int64_t Rng::Between(int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(Below(static_cast<uint64_t>(hi - lo) + 1));
}

int Rng::Weighted(const std::vector<Rational>& weights) {
  Integer lcm = 1;
  for (const Rational& w : weights) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), w.get_den_mpz_t());
  }
  std::vector<Integer> scaled;
  Integer total = 0;
  for (const Rational& w : weights) {
    if (sgn(w) < 0) throw std::invalid_argument("negative weight");
    Integer s = w.get_num() * (lcm / w.get_den());
    total += s;
    scaled.push_back(s);
  }
  if (total == 0) throw std::invalid_argument("all weights are zero");
  const size_t bits = mpz_sizeinbase(total.get_mpz_t(), 2);
  Integer r;
  do {
    r = 0;
    size_t have = 0;
    while (have < bits) {
      r <<= 64;
      r += Integer(std::to_string(Next()));
      have += 64;
    }
    r >>= static_cast<mp_bitcnt_t>(have - bits);
  } while (r >= total);
  for (size_t i = 0; i < scaled.size(); ++i) {
    if (r < scaled[i]) return static_cast<int>(i);
    r -= scaled[i];
  }
  return static_cast<int>(scaled.size()) - 1;
}

}  // namespace kmedkit
