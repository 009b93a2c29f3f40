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


#include "kmedkit/merge.h"

#include <algorithm>
#include <set>

#include "kmedkit/oracle.h"

namespace kmedkit {

Rational default_eta(int n) {
  const int exponent = std::min(std::max(24, n), 64);
  return 1 / Pow(Rational(2), static_cast<unsigned long>(exponent));
}

MergeContext make_merge_context(const MetricInstance& inst, int k,
                                const Rational& epsilon,
                                std::optional<Rational> eta) {
  if (k < 1 || k > inst.m) throw std::invalid_argument("k must be in [1, m]");
  if (sgn(epsilon) <= 0 || epsilon >= Rational(1, 6)) {
    throw std::invalid_argument("epsilon must be in (0, 1/6)");
  }
  MergeContext ctx;
  ctx.inst = &inst;
  ctx.k = k;
  ctx.epsilon = epsilon;
  ctx.eta = eta ? *eta : default_eta(inst.n);
  if (sgn(ctx.eta) <= 0) throw std::invalid_argument("eta must be > 0");
  ctx.M = std::max(max_pairwise_distance(inst), Rational(1));
  return ctx;
}

bool sandwiches(int a, int b, int k) {
  return (a < k && k < b) || (b < k && k < a);
}

Solution complete_with(MergeContext& ctx, const ParamSet& params,
                       const ExecutionTrace& prefix,
                       const PhaseSequence& seq) {
  ExecutionTrace partial;
  partial.params = params;
  for (const PhaseSequence& s : prefix.phases) {
    if (s.phase < seq.phase) partial.phases.push_back(s);
  }
  if (!seq.openings.empty()) partial.phases.push_back(seq);
  partial.L = seq.phase;
  ++ctx.completions;
  Solution out;
  out.trace = complete_solution(*ctx.inst, params, partial);
  out.regular = out.trace.regular_count();
  return out;
}

namespace {

MergeStep Exact(Solution s) {
  MergeStep step;
  step.kind = MergeStep::Kind::kExactK;
  step.exact = std::move(s);
  return step;
}

MergeStep Advance(Solution a, Solution b, int phase, DiffParam diff) {
  MergeStep step;
  step.kind = MergeStep::Kind::kAdvance;
  step.pair = SolutionPair{std::move(a), std::move(b), phase, diff};
  return step;
}

Solution Fresh(MergeContext& ctx, const Rational& f) {
  const ParamSet params = ParamSet::Make(f, ctx.epsilon, ctx.eta);
  ExecutionTrace empty;
  empty.params = params;
  ++ctx.completions;
  Solution out;
  out.trace = complete_solution(*ctx.inst, params, empty);
  out.regular = out.trace.regular_count();
  return out;
}

// Open set after the prefix and the openings of seq.
std::vector<FacilityRef> OpenAfter(const ExecutionTrace& prefix,
                                   const PhaseSequence& seq) {
  std::vector<FacilityRef> S = prefix.opened_through(seq.phase - 1);
  for (const Opening& o : seq.openings) S.push_back(o.facility);
  return S;
}

void AppendFree(MergeContext& ctx, ParamSet* params,
                const ExecutionTrace& prefix, PhaseSequence* seq, int base,
                int* copy) {
  *copy = ctx.next_copy++;
  params->u[*copy] = 0;
  const std::vector<FacilityRef> S = OpenAfter(prefix, *seq);
  seq->openings.push_back(Opening{FacilityRef::Free(*copy, base), Bids(), S});
}

// Binary search on the offset of the free copy `copy` in seq between 0 and
// the disabling sentinel 10 M.
MergeStep SearchOffset(MergeContext& ctx, ParamSet params,
                       const ExecutionTrace& prefix, const PhaseSequence& seq,
                       int copy) {
  const int k = ctx.k;
  Rational lo = 0;
  Rational hi = 10 * ctx.M;
  params.u[copy] = lo;
  Solution low = complete_with(ctx, params, prefix, seq);
  if (low.regular == k) return Exact(std::move(low));
  params.u[copy] = hi;
  Solution high = complete_with(ctx, params, prefix, seq);
  if (high.regular == k) return Exact(std::move(high));
  for (int doubling = 0; !sandwiches(low.regular, high.regular, k);
       ++doubling) {
    if (doubling == 8) {
      throw std::logic_error("offset search endpoints do not sandwich k");
    }
    hi *= 2;
    params.u[copy] = hi;
    high = complete_with(ctx, params, prefix, seq);
    if (high.regular == k) return Exact(std::move(high));
  }
  while (hi - lo > ctx.eta) {
    const Rational mid = (lo + hi) / 2;
    params.u[copy] = mid;
    Solution s = complete_with(ctx, params, prefix, seq);
    if (s.regular == k) return Exact(std::move(s));
    if (sandwiches(low.regular, s.regular, k)) {
      hi = mid;
      high = std::move(s);
    } else {
      lo = mid;
      low = std::move(s);
    }
  }
  return Advance(std::move(low), std::move(high), seq.phase + 1,
                 DiffParam{DiffParam::Kind::kFreeOffset, copy});
}

size_t CommonPrefix(const PhaseSequence& a, const PhaseSequence& b) {
  size_t q = 0;
  while (q < a.openings.size() && q < b.openings.size() &&
         a.openings[q].facility == b.openings[q].facility) {
    ++q;
  }
  return q;
}

bool SameFacilities(const std::vector<FacilityRef>& a,
                    const std::vector<FacilityRef>& b) {
  return a == b;
}

std::vector<FacilityRef> Facilities(const PhaseSequence& seq) {
  std::vector<FacilityRef> out;
  for (const Opening& o : seq.openings) out.push_back(o.facility);
  return out;
}

// First phase >= from where the two traces open different sequences.
int FirstDifference(const ExecutionTrace& a, const ExecutionTrace& b,
                    int from) {
  std::set<int> phases;
  for (const PhaseSequence& s : a.phases) phases.insert(s.phase);
  for (const PhaseSequence& s : b.phases) phases.insert(s.phase);
  for (int q : phases) {
    if (q < from) continue;
    if (!a.sequence(q).SameFacilities(b.sequence(q))) return q;
  }
  throw std::logic_error("the two solutions open the same sequences");
}

}  // namespace

MergeStep initialize_sandwich(MergeContext& ctx) {
  const MetricInstance& inst = *ctx.inst;
  const int k = ctx.k;
  Rational lo(1, static_cast<long>(inst.n) * inst.n);
  Solution many = Fresh(ctx, lo);
  if (many.regular <= k) return Exact(std::move(many));
  Rational hi = 4 * inst.n * ctx.M;
  Solution few = Fresh(ctx, hi);
  if (few.regular == k) return Exact(std::move(few));
  if (few.regular > k) {
    throw std::logic_error("largest facility cost opens more than k");
  }
  while (hi - lo > ctx.eta) {
    const Rational mid = (lo + hi) / 2;
    Solution s = Fresh(ctx, mid);
    if (s.regular == k) return Exact(std::move(s));
    if (s.regular > k) {
      lo = mid;
      many = std::move(s);
    } else {
      hi = mid;
      few = std::move(s);
    }
  }
  return Advance(std::move(few), std::move(many), 1,
                 DiffParam{DiffParam::Kind::kFacilityCost, -1});
}

MergeStep equalize_parameters(MergeContext& ctx, const SolutionPair& pair) {
  const int p = pair.phase;
  bool left_is_target;
  if (pair.diff.kind == DiffParam::Kind::kFacilityCost) {
    left_is_target = pair.left.trace.params.f > pair.right.trace.params.f;
  } else {
    left_is_target = pair.left.trace.params.offset(pair.diff.copy) <
                     pair.right.trace.params.offset(pair.diff.copy);
  }
  const Solution& target = left_is_target ? pair.left : pair.right;
  const Solution& other = left_is_target ? pair.right : pair.left;
  const ParamSet& params = target.trace.params;
  Solution redone = complete_with(ctx, params, other.trace.Prefix(p - 1),
                                  other.trace.sequence(p));
  if (redone.regular == ctx.k) return Exact(std::move(redone));
  if (sandwiches(redone.regular, other.regular, ctx.k)) {
    return Advance(std::move(redone), other, p + 1, pair.diff);
  }
  if (!sandwiches(target.regular, redone.regular, ctx.k)) {
    throw std::logic_error("recompleted solution breaks the sandwich");
  }
  MergeStep step;
  step.kind = MergeStep::Kind::kSamePhase;
  step.pair = SolutionPair{target, std::move(redone), p, pair.diff};
  return step;
}

MergeStep grow_common_prefix(MergeContext& ctx, const SolutionPair& pair) {
  const int p = pair.phase;
  const int k = ctx.k;
  ParamSet params = pair.left.trace.params;
  if (!(params == pair.right.trace.params)) {
    throw std::invalid_argument("prefix growth needs equal parameters");
  }
  const ExecutionTrace prefix = pair.left.trace.Prefix(p - 1);
  const PhaseSequence target = pair.left.trace.sequence(p);
  PhaseSequence current = pair.right.trace.sequence(p);
  int previous = pair.right.regular;
  auto handoff = [&](PhaseSequence before, PhaseSequence after) {
    MergeStep step;
    step.kind = MergeStep::Kind::kHandOff;
    step.handoff = HandOff{prefix, params, p, std::move(before),
                           std::move(after)};
    return step;
  };
  while (true) {
    const size_t q = CommonPrefix(target, current);
    if (q == target.openings.size()) break;
    const int base = target.openings[q].facility.base;

    // Insert a free copy of the next target facility at offset 0.
    const PhaseSequence before_insert = current;
    int copy = -1;
    AppendFree(ctx, &params, prefix, &current, base, &copy);
    Solution s = complete_with(ctx, params, prefix, current);
    if (s.regular == k) return Exact(std::move(s));
    if (sandwiches(previous, s.regular, k)) {
      return SearchOffset(ctx, params, prefix, current, copy);
    }
    previous = s.regular;

    // Delete the conflicting entries one at a time.
    const size_t conflicting = before_insert.openings.size() - q;
    for (size_t t = 0; t < conflicting; ++t) {
      PhaseSequence before = current;
      current.openings.erase(current.openings.begin() +
                             static_cast<long>(q));
      current = complete_sequence(*ctx.inst, params, prefix, current);
      s = complete_with(ctx, params, prefix, current);
      if (s.regular == k) return Exact(std::move(s));
      if (sandwiches(previous, s.regular, k)) {
        return handoff(std::move(before), current);
      }
      previous = s.regular;
    }

    // Materialize the regular facility in place of its free copy.
    const FacilityRef free = current.openings[q].facility;
    if (!free.is_free() || free.copy != copy) {
      throw std::logic_error("free copy not adjacent to the common prefix");
    }
    current.openings[q] = target.openings[q];
    for (size_t t = q + 1; t < current.openings.size(); ++t) {
      for (FacilityRef& h : current.openings[t].superset) {
        if (h == free) h = FacilityRef::Regular(base);
      }
    }
    params.u.erase(copy);
    s = complete_with(ctx, params, prefix, current);
    if (s.regular == k) return Exact(std::move(s));
    if (sandwiches(previous, s.regular, k)) {
      throw std::logic_error("materializing a free copy changed the side");
    }
    previous = s.regular;
  }
  return handoff(target, current);
}

MergeStep remove_extra_facilities(MergeContext& ctx, const HandOff& handoff) {
  const int k = ctx.k;
  const int p = handoff.phase;
  ParamSet params = handoff.params;
  const std::vector<FacilityRef> after = Facilities(handoff.after);
  std::vector<FacilityRef> kept = Facilities(handoff.before);
  // The regular facility of `before` missing from `after`, if any.
  std::optional<int> missing;
  for (size_t t = 0; t < kept.size(); ++t) {
    if (!kept[t].is_free() &&
        std::find(after.begin(), after.end(), kept[t]) == after.end()) {
      missing = kept[t].base;
      kept.erase(kept.begin() + static_cast<long>(t));
      break;
    }
  }
  if (kept.size() > after.size() ||
      !SameFacilities(
          kept,
          std::vector<FacilityRef>(
              after.begin(), after.begin() + static_cast<long>(kept.size())))) {
    throw std::logic_error("handoff sequences have an unexpected shape");
  }
  const size_t cut = kept.size();
  const size_t suffix = after.size() - cut;
  if (!missing && suffix == 0) {
    throw std::logic_error("handoff sequences coincide");
  }
  const int after_count =
      complete_with(ctx, params, handoff.prefix, handoff.after).regular;

  std::vector<PhaseSequence> chain;
  PhaseSequence h0 = handoff.after;
  int missing_copy = -1;
  if (missing) {
    AppendFree(ctx, &params, handoff.prefix, &h0, *missing, &missing_copy);
  }
  chain.push_back(h0);
  for (size_t r = 0; r < suffix; ++r) {
    PhaseSequence next = chain.back();
    next.openings.erase(next.openings.begin() + static_cast<long>(cut));
    chain.push_back(std::move(next));
  }
  std::vector<int> counts;
  for (const PhaseSequence& seq : chain) {
    Solution s = complete_with(ctx, params, handoff.prefix, seq);
    if (s.regular == k) return Exact(std::move(s));
    counts.push_back(s.regular);
  }
  if (missing && sandwiches(after_count, counts[0], k)) {
    return SearchOffset(ctx, params, handoff.prefix, chain[0], missing_copy);
  }
  for (size_t r = 0; r + 1 < chain.size(); ++r) {
    if (!sandwiches(counts[r], counts[r + 1], k)) continue;
    PhaseSequence seq = chain[r + 1];
    const int base = handoff.after.openings[cut + r].facility.base;
    int copy = -1;
    AppendFree(ctx, &params, handoff.prefix, &seq, base, &copy);
    return SearchOffset(ctx, params, handoff.prefix, seq, copy);
  }
  (void)p;
  throw std::logic_error("no consecutive pair sandwiches k in phase " +
                         std::to_string(p));
}

std::vector<std::string> check_promises(const MergeContext& ctx,
                                        const SolutionPair& pair) {
  std::vector<std::string> out;
  const Solution* sides[2] = {&pair.left, &pair.right};
  const char* names[2] = {"left", "right"};
  for (int s = 0; s < 2; ++s) {
    const ExecutionTrace& trace = sides[s]->trace;
    for (const std::string& failure :
         audit_trace(*ctx.inst, trace.params, trace, ctx.eta).failures) {
      out.push_back(std::string(names[s]) + ": " + failure);
    }
    if (trace.regular_count() != sides[s]->regular) {
      out.push_back(std::string(names[s]) + ": stale regular count");
    }
    for (const PhaseSequence& seq : trace.phases) {
      if (seq.phase >= pair.phase && seq.free_count() > 0) {
        out.push_back(std::string(names[s]) + ": free facility in phase " +
                      std::to_string(seq.phase));
      }
    }
  }
  if (!sandwiches(pair.left.regular, pair.right.regular, ctx.k)) {
    out.push_back("counts " + std::to_string(pair.left.regular) + " and " +
                  std::to_string(pair.right.regular) + " do not sandwich k");
  }
  const ParamSet& a = pair.left.trace.params;
  const ParamSet& b = pair.right.trace.params;
  if (a.epsilon != b.epsilon || a.delta != b.delta) {
    out.push_back("epsilon differs");
  }
  if (pair.diff.kind == DiffParam::Kind::kFacilityCost) {
    if (abs(a.f - b.f) > ctx.eta) out.push_back("facility costs too far apart");
    if (a.u != b.u) out.push_back("offsets differ with f as difference");
  } else {
    if (a.f != b.f) out.push_back("facility costs differ");
    std::map<int, Rational> ua = a.u;
    std::map<int, Rational> ub = b.u;
    if (ua.count(pair.diff.copy) == 0 || ub.count(pair.diff.copy) == 0) {
      out.push_back("difference offset missing");
    } else if (abs(ua[pair.diff.copy] - ub[pair.diff.copy]) > ctx.eta) {
      out.push_back("offsets too far apart");
    }
    ua.erase(pair.diff.copy);
    ub.erase(pair.diff.copy);
    if (ua != ub) out.push_back("other offsets differ");
  }
  for (int q = 1; q < pair.phase; ++q) {
    if (!pair.left.trace.sequence(q).SameFacilities(
            pair.right.trace.sequence(q))) {
      out.push_back("phase " + std::to_string(q) + " not shared");
    }
  }
  return out;
}

int merge_phase_budget(const Rational& M, const Rational& epsilon) {
  return static_cast<int>(
      phase_schedule(std::max(Rational(Rational(3, 2) * M), Rational(1)),
                     epsilon)
          .size());
}

PseudoSolution run_pseudo_approx(const MetricInstance& inst, int k,
                                 const Rational& epsilon,
                                 const MergeOptions& options) {
  MergeContext ctx = make_merge_context(inst, k, epsilon, options.eta);
  const int budget = merge_phase_budget(ctx.M, epsilon);
  MergeStep step = initialize_sandwich(ctx);
  int steps = 0;
  std::vector<std::string> walk_log;
  while (step.kind != MergeStep::Kind::kExactK) {
    SolutionPair pair = std::move(*step.pair);
    pair.phase = FirstDifference(pair.left.trace, pair.right.trace,
                                 pair.phase);
    if (pair.phase > budget) {
      throw std::logic_error("phase budget exhausted at phase " +
                             std::to_string(pair.phase));
    }
    if (options.check_promises) {
      const std::vector<std::string> problems = check_promises(ctx, pair);
      if (!problems.empty()) {
        throw AuditFailure("pair promise violated at phase " +
                           std::to_string(pair.phase) + ": " +
                           problems.front());
      }
    }
    std::string entry = "phase " + std::to_string(pair.phase) + ": equalize";
    step = equalize_parameters(ctx, pair);
    if (step.kind == MergeStep::Kind::kSamePhase) {
      entry += " grow";
      step = grow_common_prefix(ctx, *step.pair);
    }
    if (step.kind == MergeStep::Kind::kHandOff) {
      entry += " remove";
      step = remove_extra_facilities(ctx, *step.handoff);
    }
    entry +=
        step.kind == MergeStep::Kind::kExactK ? " -> exact" : " -> advance";
    walk_log.push_back(std::move(entry));
    ++steps;
  }

  PseudoSolution out;
  out.trace = std::move(step.exact->trace);
  out.eta = ctx.eta;
  out.merge_steps = steps;
  out.walk_log = std::move(walk_log);
  const ParamSet& params = out.trace.params;
  TraceAuditOptions audit_options;
  audit_options.phase_budget = budget;
  if (options.ufl_value) audit_options.ufl_value = options.ufl_value;
  const AuditReport report =
      audit_trace(inst, params, out.trace, ctx.eta, audit_options);
  if (!report.ok()) {
    throw AuditFailure("final trace fails its audit: " +
                       report.failures.front());
  }
  const Replay replay = replay_trace(inst, params, out.trace, ctx.eta);
  out.alpha = replay.alpha;
  out.open_set = replay.S;
  for (const FacilityRef& h : out.open_set) {
    (h.is_free() ? out.free_count : out.k_regular) += 1;
  }
  for (int i = 0; i < inst.m && out.k_regular < k; ++i) {
    const FacilityRef h = FacilityRef::Regular(i);
    if (std::find(out.open_set.begin(), out.open_set.end(), h) !=
        out.open_set.end()) {
      continue;
    }
    out.open_set.push_back(h);
    out.padding.push_back(i);
    ++out.k_regular;
  }
  const std::vector<ExtRational> dS =
      distances_to_open(inst, params, out.open_set);
  out.cost = 0;
  for (const ExtRational& d : dS) out.cost += d.value();
  out.completions = ctx.completions;
  return out;
}

}  // namespace kmedkit
