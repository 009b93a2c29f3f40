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

#include <stdexcept>
#include <string>

#include "kmedkit/metric.h"
#include "kmedkit/oracle.h"
#include "kmedkit/random.h"

namespace kmedkit {

MetricInstance generate_random_instance(uint64_t seed, int n, int m,
                                        int coord_range) {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
  if (coord_range < 1) throw std::invalid_argument("coord_range must be >= 1");
  Rng rng(seed);
  MetricInstance inst = MetricInstance::Zero(n, m);
  inst.label = "random-s" + std::to_string(seed) + "-n" + std::to_string(n) +
               "-m" + std::to_string(m);
  for (int a = 0; a < inst.points(); ++a) {
    for (int b = a + 1; b < inst.points(); ++b) {
      inst.Set(a, b, Rational(rng.Between(1, coord_range)));
    }
  }
  metric_closure(&inst);
  return inst;
}

StableInstance generate_stable_instance(uint64_t seed, int k, int cluster_size,
                                        int separation) {
  if (k < 1 || cluster_size < 1) {
    throw std::invalid_argument("k and cluster_size must be >= 1");
  }
  if (separation < 4) throw std::invalid_argument("separation must be >= 4");
  Rng rng(seed);
  const int n = k * cluster_size;
  const int m = 2 * k;
  StableInstance out;
  MetricInstance& inst = out.instance;
  inst = MetricInstance::Zero(n, m);
  inst.label = "stable-s" + std::to_string(seed) + "-k" + std::to_string(k) +
               "-c" + std::to_string(cluster_size);
  // Point layout per cluster c: planted facility 2c, decoy facility 2c+1.
  std::vector<int> cluster(inst.points());
  std::vector<int> offset(inst.points());
  std::vector<int> near_decoy(k);
  for (int c = 0; c < k; ++c) {
    near_decoy[c] =
        c * cluster_size + static_cast<int>(rng.Below(cluster_size));
    for (int t = 0; t < cluster_size; ++t) {
      cluster[c * cluster_size + t] = c;
      offset[c * cluster_size + t] = 1;
    }
    cluster[inst.facility_point(2 * c)] = c;
    offset[inst.facility_point(2 * c)] = 0;
    cluster[inst.facility_point(2 * c + 1)] = c;
    offset[inst.facility_point(2 * c + 1)] = 2;
    out.planted.push_back(2 * c);
  }
  std::vector<std::vector<int>> gap(k, std::vector<int>(k, 0));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      gap[a][b] = gap[b][a] =
          static_cast<int>(rng.Between(separation, 2 * separation));
    }
  }
  for (int a = 0; a < inst.points(); ++a) {
    for (int b = a + 1; b < inst.points(); ++b) {
      const int ca = cluster[a];
      const int cb = cluster[b];
      int value = offset[a] + offset[b] + gap[ca][cb];
      if (ca == cb) {
        const int decoy = inst.facility_point(2 * ca + 1);
        if ((a == decoy && b == near_decoy[ca]) ||
            (b == decoy && a == near_decoy[ca])) {
          value = 1;
        } else if (a < n && b < n) {
          value = 2;
        }
      }
      inst.Set(a, b, Rational(value));
    }
  }
  metric_closure(&inst);
  const Rational planted_cost = cost(inst, out.planted);
  out.opt_k = brute_force_kmedian(inst, k).value;
  if (out.opt_k != planted_cost) {
    throw std::invalid_argument(
        "separation too small: planted set not optimal");
  }
  if (k >= 2) {
    out.opt_k_minus_1 = brute_force_kmedian(inst, k - 1).value;
    out.beta = out.opt_k_minus_1 / out.opt_k - 1;
  }
  return out;
}

}  // namespace kmedkit
