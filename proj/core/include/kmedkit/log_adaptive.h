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

// Phased primal-dual algorithm with openability tests, execution traces
// with free facilities, completion routines and the invariant auditor.
//
// Phase p runs at theta_p = (1 + eps^2)^(p-1). At a stage-1 point the state
// is a function of (theta, S): a client is active iff
// theta < (1 - delta) d(j, S), and active clients have alpha = theta.

#ifndef KMEDKIT_LOG_ADAPTIVE_H_
#define KMEDKIT_LOG_ADAPTIVE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmedkit/greedy.h"
#include "kmedkit/metric.h"
#include "kmedkit/rational.h"

namespace kmedkit {

// Raised bids of active clients inside the ball; every other active client
// bids theta.
using Bids = std::map<int, Rational>;

struct Opening {
  FacilityRef facility;
  Bids tau;
  // Open set the opening was validated against.
  std::vector<FacilityRef> superset;
};

struct PhaseSequence {
  int phase = 1;
  std::vector<Opening> openings;

  int free_count() const;
  bool SameFacilities(const PhaseSequence& o) const;
};

// Nonempty phases in ascending order; phases up to L without an entry are
// empty.
struct ExecutionTrace {
  ParamSet params;
  std::vector<PhaseSequence> phases;
  int L = 0;

  std::vector<FacilityRef> opened() const;
  // Facilities opened in phases <= p.
  std::vector<FacilityRef> opened_through(int p) const;
  const PhaseSequence* find(int p) const;
  PhaseSequence sequence(int p) const;
  int regular_count() const;
  int free_count() const;
  // Phases <= p with L = p.
  ExecutionTrace Prefix(int p) const;
  void SetSequence(const PhaseSequence& seq);
};

Rational phase_theta(const Rational& epsilon, int p);

// [1, 1 + eps^2, ...] up to the first value >= 6 Mmax.
std::vector<Rational> phase_schedule(const Rational& Mmax,
                                     const Rational& epsilon);

// Itemized violations of the openability conditions for regular facility i
// with the given bids at (theta, S). Empty iff i is eta-openable with them.
std::vector<std::string> check_bids(const MetricInstance& inst,
                                    const ParamSet& params,
                                    const Rational& theta,
                                    const std::vector<FacilityRef>& S, int i,
                                    const Bids& tau, const Rational& eta);

// Witness bids if regular facility i is eta-openable at (theta, S).
std::optional<Bids> is_openable(const MetricInstance& inst,
                                const ParamSet& params, const Rational& theta,
                                const std::vector<FacilityRef>& S, int i,
                                const Rational& eta);
std::optional<Bids> is_openable(const DualState& state,
                                const MetricInstance& inst, int i,
                                const ParamSet& params, const Rational& eta);

// Largest payment towards i over all admissible bids. Nondecreasing in
// theta for fixed S.
Rational max_payment(const MetricInstance& inst, const ParamSet& params,
                     const Rational& theta, const std::vector<FacilityRef>& S,
                     int i);

// Extends hp, validated against the phases of prefix before hp.phase, with
// 0-openable regular facilities in lowest-index order until none remains.
PhaseSequence complete_sequence(const MetricInstance& inst,
                                const ParamSet& params,
                                const ExecutionTrace& prefix,
                                const PhaseSequence& hp);

// Completes phase partial.L, then runs later phases until no client is
// active. Empty phases are skipped exactly.
ExecutionTrace complete_solution(const MetricInstance& inst,
                                 const ParamSet& params,
                                 const ExecutionTrace& partial);

struct LogAdaptiveResult {
  ExecutionTrace trace;
  std::vector<int> S_star;
  std::vector<Rational> alpha_star;
};

LogAdaptiveResult run_log_adaptive(const MetricInstance& inst,
                                   const Rational& f, const Rational& epsilon);

struct Replay {
  std::vector<Rational> alpha;
  std::vector<FacilityRef> S;
  // All clients inactive at theta_{L+1}.
  bool solution = false;
};

// Final alpha and open set of a trace. Recorded bids are used when they
// certify the opening under params; otherwise bids are re-derived.
Replay replay_trace(const MetricInstance& inst, const ParamSet& params,
                    const ExecutionTrace& trace, const Rational& eta);

struct TraceAuditOptions {
  bool require_solution = true;
  bool check_maximality = true;
  // Upper bound on the UFL optimum at params.f; enables the final LMP check.
  std::optional<Rational> ufl_value;
  // Maximum admissible L; zero disables the check.
  int phase_budget = 0;
};

// Replays the trace and itemizes violations of: openability against the
// recorded superset, no overbidding, per-phase maximality, the free count per
// phase, the inactive payment invariant, final dual feasibility and, when
// enabled, the LMP bound and the phase budget.
AuditReport audit_trace(const MetricInstance& inst, const ParamSet& params,
                        const ExecutionTrace& trace, const Rational& eta,
                        const TraceAuditOptions& options = {});

}  // namespace kmedkit

#endif  // KMEDKIT_LOG_ADAPTIVE_H_
