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

// Brute-force optima and certificate checks used as ground truth.

#ifndef KMEDKIT_ORACLE_H_
#define KMEDKIT_ORACLE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmedkit/metric.h"
#include "kmedkit/rational.h"

namespace kmedkit {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr uint64_t kKMedianCap = 200000;
inline constexpr uint64_t kUflCap = uint64_t{1} << 20;

struct OracleResult {
  Rational value;
  std::vector<int> witness;
  uint64_t enumerated = 0;
};

// Sum over clients of the distance to the nearest member of S. Throws
// std::invalid_argument on an empty S.
Rational cost(const MetricInstance& inst, const std::vector<FacilityRef>& S,
              const ParamSet& params);
Rational cost(const MetricInstance& inst, const std::vector<int>& S);

// Per-client nearest distance; the empty set maps every client to infinity.
std::vector<ExtRational> nearest_distances(const MetricInstance& inst,
                                           const std::vector<int>& S);

// Number of k-subsets of m elements, saturating at UINT64_MAX.
uint64_t binomial(int m, int k);

// Minimum over all k-subsets. The witness is the lexicographically first
// optimal set.
OracleResult brute_force_kmedian(const MetricInstance& inst, int k,
                                 uint64_t cap = kKMedianCap);

// Minimum over nonempty subsets of cost(S) + f|S|.
OracleResult brute_force_ufl(const MetricInstance& inst, const Rational& f,
                             uint64_t cap = kUflCap);

struct LmpReport {
  bool dual_feasible = true;
  bool payment = true;
  bool payment_exact = true;
  // Unset when the oracle refused the instance.
  std::optional<bool> lmp_bound;
  std::vector<std::string> failures;

  bool ok() const {
    return dual_feasible && payment && lmp_bound.value_or(true);
  }
};

// Checks (a) sum_j [alpha_j/2 - d(i,j)]+ <= f for every facility i,
// (b) sum alpha >= (2/factor) cost(S) + |S| (2f - n eta), with
// payment_exact recording equality at eta = 0 and factor 2, and
// (c) cost(S) <= factor (opt_ufl(f) - f|S|).
LmpReport verify_lmp_certificate(const MetricInstance& inst,
                                 const Rational& f, const std::vector<int>& S,
                                 const std::vector<Rational>& alpha,
                                 const Rational& factor,
                                 const Rational& eta = Rational(0));

}  // namespace kmedkit

#endif  // KMEDKIT_ORACLE_H_
