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

// Metric instances over clients and facilities, parameter sets, free
// facility copies, normalization and instance generators.

#ifndef KMEDKIT_METRIC_H_
#define KMEDKIT_METRIC_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kmedkit/rational.h"

namespace kmedkit {

// Dense symmetric table over points: clients 0..n-1, then facilities
// n..n+m-1.
struct MetricInstance {
  int n = 0;
  int m = 0;
  std::vector<Rational> dist;
  std::string label;

  static MetricInstance Zero(int n, int m);

  int points() const { return n + m; }
  int facility_point(int i) const { return n + i; }
  const Rational& d(int a, int b) const { return dist[a * (n + m) + b]; }
  // Client j to facility i.
  const Rational& cf(int j, int i) const { return dist[j * (n + m) + n + i]; }
  // Facility to facility.
  const Rational& ff(int a, int b) const {
    return dist[(n + a) * (n + m) + n + b];
  }
  void Set(int a, int b, const Rational& value);
};

// A regular facility or a free copy of one.
struct FacilityRef {
  enum class Kind { kRegular, kFree };
  Kind kind = Kind::kRegular;
  int base = 0;
  int copy = -1;

  static FacilityRef Regular(int facility) {
    return FacilityRef{Kind::kRegular, facility, -1};
  }
  static FacilityRef Free(int copy_id, int base_facility) {
    return FacilityRef{Kind::kFree, base_facility, copy_id};
  }
  bool is_free() const { return kind == Kind::kFree; }
  bool operator==(const FacilityRef& o) const {
    return kind == o.kind && base == o.base && copy == o.copy;
  }
  bool operator!=(const FacilityRef& o) const { return !(*this == o); }
  bool operator<(const FacilityRef& o) const;
};

std::string ToString(const FacilityRef& ref);

class MissingParameter : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamSet {
  Rational f;
  Rational fhat;
  Rational epsilon;
  Rational delta;
  Rational eta;
  std::map<int, Rational> u;

  // fhat = 2f and delta = 3 epsilon.
  static ParamSet Make(const Rational& f, const Rational& epsilon,
                       const Rational& eta);
  void SetFacilityCost(const Rational& cost);
  const Rational& offset(int copy) const;
  std::vector<std::string> Validate(int n) const;
  bool operator==(const ParamSet& o) const;
};

// Either a client or a (regular or free) facility.
struct Endpoint {
  bool is_client = true;
  int client = 0;
  FacilityRef facility;

  static Endpoint Client(int j) { return Endpoint{true, j, FacilityRef()}; }
  static Endpoint Facility(const FacilityRef& ref) {
    return Endpoint{false, -1, ref};
  }
};

Rational extended_distance(const MetricInstance& inst, const ParamSet& params,
                           const Endpoint& a, const Endpoint& b);

// d(j, h) for client j and facility h under the free offsets in params.
Rational client_distance(const MetricInstance& inst, const ParamSet& params,
                         int j, const FacilityRef& h);

// Empty iff the table is complete, symmetric, zero on the diagonal,
// non-negative and satisfies every triangle inequality.
std::vector<std::string> validate_metric(const MetricInstance& inst);

// All-pairs shortest path closure in place.
void metric_closure(MetricInstance* inst);

Rational max_cross_distance(const MetricInstance& inst);
Rational max_pairwise_distance(const MetricInstance& inst);
// Sum over clients of the distance to the nearest facility.
Rational nearest_facility_sum(const MetricInstance& inst);

class DegenerateGuess : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rescales client-facility distances up to mguess into integers in
// [1, n/epsilon], sets every other pair to ceil(n^3/epsilon) and takes the
// metric closure.
MetricInstance normalize_with_guess(const MetricInstance& inst,
                                    const Rational& epsilon,
                                    const Rational& mguess);

// One normalization per distinct client-facility distance, ascending.
std::vector<std::pair<Rational, MetricInstance>> enumerate_normalizations(
    const MetricInstance& inst, const Rational& epsilon);

// Instances up to this many clients are solved by enumeration instead of
// normalization.
inline constexpr int kBruteForceCrossover = 10;

// Random symmetric integer table in [1, coord_range] closed under shortest
// paths.
MetricInstance generate_random_instance(uint64_t seed, int n, int m,
                                        int coord_range);

struct StableInstance {
  MetricInstance instance;
  std::vector<int> planted;
  Rational opt_k;
  Rational opt_k_minus_1;
  // opt_{k-1} / opt_k - 1; zero when k = 1.
  Rational beta;
};

// k planted clusters of cluster_size clients, each client at distance 1 from
// its planted facility, one decoy facility per cluster and the given
// separation between clusters.
StableInstance generate_stable_instance(uint64_t seed, int k, int cluster_size,
                                        int separation);

}  // namespace kmedkit

#endif  // KMEDKIT_METRIC_H_
