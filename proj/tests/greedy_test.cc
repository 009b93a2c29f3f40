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


#include "doctest.h"
#include "kmedkit/greedy.h"
#include "kmedkit/oracle.h"

namespace kmedkit {
namespace {

ParamSet CostOnly(const Rational& f) {
  ParamSet params;
  params.SetFacilityCost(f);
  return params;
}

TEST_CASE("single client pays for its facility at d + fhat") {
  MetricInstance inst = MetricInstance::Zero(1, 1);
  inst.Set(0, 1, Rational(2));
  const DualState start = DualState::Initial(1, Rational(0));
  const GreedyEvent e = next_event(start, inst, CostOnly(Rational(1)));
  CHECK(e.kind == GreedyEvent::Kind::kOpen);
  CHECK(e.theta == 4);
  const GreedyOutcome out = run_greedy(inst, Rational(1));
  CHECK(out.S_star == std::vector<int>{0});
  CHECK(out.alpha_star == std::vector<Rational>{Rational(4)});
  CHECK(payment_gap(inst, Rational(2), out.S_star, out.alpha_star) == 0);
}

TEST_CASE("two co-located clients share the payment") {
  MetricInstance inst = MetricInstance::Zero(2, 1);
  inst.Set(0, 2, Rational(1));
  inst.Set(1, 2, Rational(1));
  const GreedyEvent e = next_event(DualState::Initial(2, Rational(0)), inst,
                                   CostOnly(Rational(1)));
  CHECK(e.theta == 2);
}

TEST_CASE("event times agree with a dense sweep") {
  const Rational step(1, 1024);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    MetricInstance inst = generate_random_instance(seed, 6, 4, 10);
    const ParamSet params = CostOnly(Rational(3, 2));
    DualState state = DualState::Initial(inst.n, Rational(0));
    // Walk the first few events of the run and sweep for each.
    for (int round = 0; round < 3 && state.any_active(); ++round) {
      const GreedyEvent e = next_event(state, inst, params);
      const auto dS = distances_to_open(inst, params, state.S);
      Rational theta = state.theta;
      auto fires = [&](const Rational& t) {
        for (int i = 0; i < inst.m; ++i) {
          bool open = false;
          for (const FacilityRef& h : state.S) open = open || h.base == i;
          if (!open && greedy_payment(inst, state, dS, i, t) >= params.fhat) {
            return true;
          }
        }
        for (int j = 0; j < inst.n; ++j) {
          if (state.active[j] && t >= dS[j]) return true;
        }
        return false;
      };
      while (!fires(theta)) theta += step;
      CHECK(e.theta <= theta);
      CHECK(theta - step < e.theta);
      // Advance the state through this event the way the run does.
      state.theta = e.theta;
      for (int j = 0; j < inst.n; ++j) {
        if (state.active[j]) state.alpha[j] = e.theta;
      }
      if (e.kind == GreedyEvent::Kind::kOpen) {
        state.S.push_back(FacilityRef::Regular(e.subject));
        for (int j = 0; j < inst.n; ++j) {
          if (inst.cf(j, e.subject) <= e.theta) state.active[j] = false;
        }
      } else {
        state.active[e.subject] = false;
      }
    }
  }
}

TEST_CASE("zero facility cost opens everything at time zero") {
  MetricInstance inst = generate_random_instance(4, 5, 4, 20);
  const GreedyOutcome out = run_greedy(inst, Rational(0));
  CHECK(out.S_star.size() == 4);
  CHECK(cost(inst, out.S_star) == nearest_facility_sum(inst));
}

TEST_CASE("tiny facility cost connects every client to its nearest") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    MetricInstance inst = generate_random_instance(seed, 6, 5, 20);
    const GreedyOutcome out = run_greedy(inst, Rational(1, 36 * 2));
    CHECK(cost(inst, out.S_star) == nearest_facility_sum(inst));
  }
}

TEST_CASE("huge facility cost opens exactly one facility") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    MetricInstance inst = generate_random_instance(seed, 6, 5, 20);
    const Rational f = 4 * 6 * max_pairwise_distance(inst);
    CHECK(run_greedy(inst, f).S_star.size() == 1);
  }
}

TEST_CASE("greedy invariants on random instances") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    MetricInstance inst = generate_random_instance(seed, 1 + seed % 8,
                                                   1 + (seed * 5) % 8, 30);
    const Rational f(static_cast<long>(1 + seed % 13), 2);
    const GreedyOutcome out = run_greedy(inst, f);
    CHECK(payment_gap(inst, 2 * f, out.S_star, out.alpha_star) == 0);
    CHECK(max_dual_load(inst, out.alpha_star) <= 2 * f);
    CHECK(max_ordered_load(inst, out.alpha_star) <= 2 * f);
    const LmpReport lmp = verify_lmp_certificate(inst, f, out.S_star,
                                                 out.alpha_star, Rational(2));
    CHECK(lmp.ok());
    CHECK(lmp.payment_exact);
    CHECK(audit_no_overbid(out.events, inst, CostOnly(f)).ok());
  }
}

TEST_CASE("overbid audit") {
  MetricInstance inst = generate_random_instance(3, 5, 3, 20);
  const ParamSet params = CostOnly(Rational(2));
  CHECK(audit_no_overbid({}, inst, params).ok());
  GreedyOutcome out = run_greedy(inst, Rational(2));
  REQUIRE(audit_no_overbid(out.events, inst, params).ok());
  // Delaying the last connection inflates that client's bid.
  std::vector<GreedyEvent> bad = out.events;
  bad.back().theta += 1000;
  CHECK(!audit_no_overbid(bad, inst, params).ok());
}

}  // namespace
}  // namespace kmedkit
