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


// Partition matroid over ball-constrained centers and the closed-cost
// objective g with f(X) = g({}) - g(X). Centers are facility ids of an
// extended instance whose trailing facilities are dummy centers.

#ifndef KMEDKIT_SUBMODULAR_H_
#define KMEDKIT_SUBMODULAR_H_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmedkit/metric.h"
#include "kmedkit/rational.h"

namespace kmedkit {

struct Ball {
  int leader = 0;
  Rational radius;

  bool operator==(const Ball& o) const {
    return leader == o.leader && radius == o.radius;
  }
};

// One copy of a facility per ball containing it; part t belongs to ball t.
struct PartitionMatroid {
  struct Element {
    int facility = 0;
    int part = 0;
  };
  std::vector<Element> ground;
  int parts = 0;

  // X holds ground indices.
  bool Independent(const std::vector<int>& X) const;
  std::vector<int> Part(int part) const;
};

// Facilities i < real_m with d(leader, i) <= radius, one part per ball.
PartitionMatroid make_ball_matroid(const MetricInstance& inst, int real_m,
                                   const std::vector<Ball>& balls);

struct ClusterView {
  int center = 0;
  std::vector<int> members;
  // Members within eps cost(S) / (|R| |C_c|) of the center.
  std::vector<int> core;
  bool concentrated = false;
  Rational cost;
};

class InfeasibleContext : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SubmodularContext {
  const MetricInstance* inst = nullptr;
  std::vector<int> lambda;
  // Client to working center.
  std::vector<int> assignment;
  std::vector<int> R0;
  // Concentrated candidates for the remaining closures.
  std::vector<int> P1;
  int r1 = 0;
  std::map<int, ClusterView> clusters;
};

// Builds the clusters of the assignment, their cores for |R| = |R0| + r1,
// and P1 = concentrated members of P outside R0. Throws InfeasibleContext
// when |P1| < r1 or when closures are requested without dummy centers.
SubmodularContext make_submodular_context(const MetricInstance& inst,
                                          const std::vector<int>& lambda,
                                          const std::vector<int>& assignment,
                                          const std::vector<int>& P,
                                          const std::vector<int>& R0, int r1,
                                          const Rational& cost_S,
                                          const Rational& epsilon);

// Distance from client p to the nearest facility in X; infinite for empty X.
ExtRational distance_to_set(const MetricInstance& inst, int p,
                            const std::vector<int>& X);

// Some core client of C_c is strictly closer to X than to c.
bool is_hit(const SubmodularContext& ctx, int c, const std::vector<int>& X);

// Cost of C_c when c closes, with X given as facility ids.
Rational closedcost(const SubmodularContext& ctx, int c,
                    const std::vector<int>& X);

// closedcost_c(X) - sum_{p in C_c} d(p, c + X + Lambda); never negative.
Rational cost_inc(const SubmodularContext& ctx, int c,
                  const std::vector<int>& X);

struct GValue {
  Rational value;
  // The r1 candidates of smallest cost_inc, ties by center id.
  std::vector<int> R1;
};

GValue eval_g(const SubmodularContext& ctx, const std::vector<int>& X);
Rational eval_f(const SubmodularContext& ctx, const std::vector<int>& X);

// Facility ids of ground indices.
std::vector<int> facilities_of(const PartitionMatroid& matroid,
                               const std::vector<int>& X);

struct MaximizeResult {
  // Ground indices.
  std::vector<int> X;
  Rational value;
  int evaluations = 0;
};

// Exchange greedy: adds the independent element of largest positive marginal
// gain, ties by (part, ground index), until none remains.
MaximizeResult maximize_f(const SubmodularContext& ctx,
                          const PartitionMatroid& matroid);

class CardinalityMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Closes R0 and R1 in the working solution, then replaces the dummy of each
// ball by the member of X in that ball, or by the lowest-index facility in
// the ball. Duplicates are filled with the lowest-index unused facilities.
// Returns exactly k sorted facility ids below real_m.
std::vector<int> extract_k_centers(const SubmodularContext& ctx,
                                   const PartitionMatroid& matroid,
                                   const std::vector<int>& X,
                                   const std::vector<int>& R1,
                                   const std::vector<int>& working, int k,
                                   int real_m);

}  // namespace kmedkit

#endif  // KMEDKIT_SUBMODULAR_H_
