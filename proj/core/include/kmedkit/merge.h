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


// Walk between two completed solutions whose regular facility counts
// sandwich k until one opens exactly k regular facilities, using free copies
// of facilities whose offsets are tuned by binary search.

#ifndef KMEDKIT_MERGE_H_
#define KMEDKIT_MERGE_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kmedkit/greedy.h"
#include "kmedkit/log_adaptive.h"
#include "kmedkit/metric.h"
#include "kmedkit/rational.h"

namespace kmedkit {

class AuditFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A completed trace (params inside) and its number of regular facilities.
struct Solution {
  ExecutionTrace trace;
  int regular = 0;
};

struct DiffParam {
  enum class Kind { kFacilityCost, kFreeOffset };
  Kind kind = Kind::kFacilityCost;
  // Free copy id for kFreeOffset.
  int copy = -1;
};

// Two solutions that agree on phases < phase and differ in one parameter.
struct SolutionPair {
  Solution left;
  Solution right;
  int phase = 1;
  DiffParam diff;
};

// Two versions of phase `phase` under the same parameters whose completions
// sandwich k.
struct HandOff {
  ExecutionTrace prefix;  // phases < phase
  ParamSet params;
  int phase = 1;
  PhaseSequence before;
  PhaseSequence after;
};

struct MergeStep {
  enum class Kind { kExactK, kAdvance, kSamePhase, kHandOff };
  Kind kind = Kind::kExactK;
  std::optional<Solution> exact;
  std::optional<SolutionPair> pair;
  std::optional<HandOff> handoff;
};

// Default slack: 2^-max(24, n), never below 2^-64.
Rational default_eta(int n);

struct MergeContext {
  const MetricInstance* inst = nullptr;
  int k = 0;
  Rational epsilon;
  Rational eta;
  // Largest pairwise distance.
  Rational M;
  int next_copy = 0;
  // Number of complete_solution calls so far.
  long completions = 0;
};

MergeContext make_merge_context(const MetricInstance& inst, int k,
                                const Rational& epsilon,
                                std::optional<Rational> eta = std::nullopt);

// Completes prefix phases (< phase) followed by seq at phase.
Solution complete_with(MergeContext& ctx, const ParamSet& params,
                       const ExecutionTrace& prefix, const PhaseSequence& seq);

// a and b sandwich k: a < k < b or b < k < a.
bool sandwiches(int a, int b, int k);

// Binary search on f over [1/n^2, 4 n M]. Returns kExactK (including the
// small-f early exit, which may open fewer than k) or kAdvance at phase 1.
MergeStep initialize_sandwich(MergeContext& ctx);

// Recompletes the solution with the smaller difference parameter under the
// other's parameters. Returns kExactK, kAdvance (phase + 1) or kSamePhase,
// whose pair has equal parameters with left = the unchanged solution.
MergeStep equalize_parameters(MergeContext& ctx, const SolutionPair& pair);

// Edits the right phase sequence towards the left one. Returns kExactK,
// kAdvance or kHandOff.
MergeStep grow_common_prefix(MergeContext& ctx, const SolutionPair& pair);

// Walks from handoff.after back to handoff.before. Returns kExactK or
// kAdvance.
MergeStep remove_extra_facilities(MergeContext& ctx, const HandOff& handoff);

// Violations of the pair invariants: audits of both traces, the sandwich,
// the difference parameter, the common prefix and regular-only suffixes.
std::vector<std::string> check_promises(const MergeContext& ctx,
                                        const SolutionPair& pair);

struct PseudoSolution {
  std::vector<FacilityRef> open_set;
  int k_regular = 0;
  int free_count = 0;
  Rational cost;
  std::vector<Rational> alpha;
  ExecutionTrace trace;
  // Regular facilities added to reach k after the small-f early exit.
  std::vector<int> padding;
  int merge_steps = 0;
  // One line per merge step naming the subroutines that ran.
  std::vector<std::string> walk_log;
  long completions = 0;
  Rational eta;
};

struct MergeOptions {
  std::optional<Rational> eta;
  bool check_promises = true;
  // Upper bound on the UFL optimum at the final f; enables the LMP audit.
  std::optional<Rational> ufl_value;
};

// Exactly k regular facilities plus free copies. Throws AuditFailure when an
// invariant audit fails and std::logic_error when the walk breaks down.
PseudoSolution run_pseudo_approx(const MetricInstance& inst, int k,
                                 const Rational& epsilon,
                                 const MergeOptions& options = {});

// Phase budget of the walk: the schedule up to 9M, which covers the first
// opening for every f <= 4 n M.
int merge_phase_budget(const Rational& M, const Rational& epsilon);

}  // namespace kmedkit

#endif  // KMEDKIT_MERGE_H_
