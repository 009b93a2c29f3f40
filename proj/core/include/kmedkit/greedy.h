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

// The primal-dual greedy LMP algorithm with exact event times.

#ifndef KMEDKIT_GREEDY_H_
#define KMEDKIT_GREEDY_H_

#include <string>
#include <vector>

#include "kmedkit/metric.h"
#include "kmedkit/rational.h"

namespace kmedkit {

// Snapshot (alpha, S, A, theta) of a primal-dual execution. Clients not in A
// are connected.
struct DualState {
  std::vector<Rational> alpha;
  std::vector<FacilityRef> S;
  std::vector<bool> active;
  Rational theta;

  static DualState Initial(int n, const Rational& start);
  bool any_active() const;
};

// Per-client distance to the open set; infinite while S is empty.
std::vector<ExtRational> distances_to_open(const MetricInstance& inst,
                                           const ParamSet& params,
                                           const std::vector<FacilityRef>& S);

struct GreedyEvent {
  enum class Kind { kOpen, kConnect };
  Rational theta;
  Kind kind = Kind::kOpen;
  // Facility id for kOpen, client id for kConnect.
  int subject = 0;

  bool operator==(const GreedyEvent& o) const {
    return theta == o.theta && kind == o.kind && subject == o.subject;
  }
};

struct GreedyOutcome {
  std::vector<int> S_star;
  std::vector<Rational> alpha_star;
  std::vector<GreedyEvent> events;
};

// Payment of active and connected clients towards regular facility i at
// time theta, with active bids at theta.
Rational greedy_payment(const MetricInstance& inst, const DualState& state,
                        const std::vector<ExtRational>& dS, int i,
                        const Rational& theta);

// Earliest theta' >= state.theta at which an unopened facility becomes paid
// for or an active client reaches its open distance. Facilities win ties,
// then the lowest index. Requires an active client.
GreedyEvent next_event(const DualState& state, const MetricInstance& inst,
                       const ParamSet& params);

GreedyOutcome run_greedy(const MetricInstance& inst, const Rational& f);

struct AuditReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Replays the event log and checks the no-overbid inequality for every
// facility and alpha_j <= d(j, S) for active clients at every checkpoint.
AuditReport audit_no_overbid(const std::vector<GreedyEvent>& events,
                             const MetricInstance& inst,
                             const ParamSet& params);

// sum_j alpha*_j - sum_j d(j, S*) - fhat |S*|; zero for every greedy run.
Rational payment_gap(const MetricInstance& inst, const Rational& fhat,
                     const std::vector<int>& S,
                     const std::vector<Rational>& alpha);

// Largest sum_j [alpha*_j - 2 d(i,j)]+ over facilities i.
Rational max_dual_load(const MetricInstance& inst,
                       const std::vector<Rational>& alpha);

// Largest left side of the per-client ordered inequality over all (k, i),
// with clients ordered by (alpha*, index).
Rational max_ordered_load(const MetricInstance& inst,
                          const std::vector<Rational>& alpha);

}  // namespace kmedkit

#endif  // KMEDKIT_GREEDY_H_
