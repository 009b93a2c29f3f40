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

#include "kmedkit/greedy.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace kmedkit {

DualState DualState::Initial(int n, const Rational& start) {
  DualState state;
  state.alpha.assign(n, start);
  state.active.assign(n, true);
  state.theta = start;
  return state;
}

bool DualState::any_active() const {
  return std::find(active.begin(), active.end(), true) != active.end();
}

std::vector<ExtRational> distances_to_open(const MetricInstance& inst,
                                           const ParamSet& params,
                                           const std::vector<FacilityRef>& S) {
  std::vector<ExtRational> out(inst.n);
  for (const FacilityRef& h : S) {
    for (int j = 0; j < inst.n; ++j) {
      out[j] = Min(out[j], ExtRational(client_distance(inst, params, j, h)));
    }
  }
  return out;
}

namespace {

bool IsOpen(const DualState& state, int i) {
  return std::find(state.S.begin(), state.S.end(), FacilityRef::Regular(i)) !=
         state.S.end();
}

// Sum over connected clients of [d(j,S) - d(j,i)]+.
Rational ConnectedBids(const MetricInstance& inst, const DualState& state,
                       const std::vector<ExtRational>& dS, int i) {
  Rational total = 0;
  for (int j = 0; j < inst.n; ++j) {
    if (state.active[j]) continue;
    total += PositivePart(dS[j].value() - inst.cf(j, i));
  }
  return total;
}

// Smallest theta' >= theta with greedy_payment(theta') >= fhat, or nullopt
// when no active client exists and the connected bids fall short.
std::optional<Rational> PaidTime(const MetricInstance& inst,
                                 const DualState& state,
                                 const std::vector<ExtRational>& dS, int i,
                                 const Rational& fhat) {
  const Rational need = fhat - ConnectedBids(inst, state, dS, i);
  if (sgn(need) <= 0) return state.theta;
  std::vector<Rational> near;
  for (int j = 0; j < inst.n; ++j) {
    if (state.active[j]) near.push_back(inst.cf(j, i));
  }
  if (near.empty()) return std::nullopt;
  std::sort(near.begin(), near.end());
  Rational prefix = 0;
  for (size_t t = 0; t < near.size(); ++t) {
    prefix += near[t];
    Rational root = (need + prefix) / static_cast<long>(t + 1);
    if (t + 1 == near.size() || root <= near[t + 1]) {
      return std::max(root, state.theta);
    }
  }
  return std::nullopt;
}

}  // namespace

Rational greedy_payment(const MetricInstance& inst, const DualState& state,
                        const std::vector<ExtRational>& dS, int i,
                        const Rational& theta) {
  Rational total = ConnectedBids(inst, state, dS, i);
  for (int j = 0; j < inst.n; ++j) {
    if (state.active[j]) total += PositivePart(theta - inst.cf(j, i));
  }
  return total;
}

GreedyEvent next_event(const DualState& state, const MetricInstance& inst,
                       const ParamSet& params) {
  if (!state.any_active()) throw std::logic_error("no active client");
  const std::vector<ExtRational> dS = distances_to_open(inst, params, state.S);
  std::optional<GreedyEvent> best;
  for (int i = 0; i < inst.m; ++i) {
    if (IsOpen(state, i)) continue;
    std::optional<Rational> t = PaidTime(inst, state, dS, i, params.fhat);
    if (t && (!best || *t < best->theta)) {
      best = GreedyEvent{*t, GreedyEvent::Kind::kOpen, i};
    }
  }
  for (int j = 0; j < inst.n; ++j) {
    if (!state.active[j] || dS[j].infinite()) continue;
    const Rational t = std::max(dS[j].value(), state.theta);
    if (!best || t < best->theta) {
      best = GreedyEvent{t, GreedyEvent::Kind::kConnect, j};
    }
  }
  if (!best) throw std::logic_error("no reachable event");
  return *best;
}

GreedyOutcome run_greedy(const MetricInstance& inst, const Rational& f) {
  if (inst.m < 1) throw std::invalid_argument("no facilities");
  ParamSet params;
  params.SetFacilityCost(f);
  DualState state = DualState::Initial(inst.n, Rational(0));
  GreedyOutcome out;
  while (state.any_active()) {
    const GreedyEvent event = next_event(state, inst, params);
    state.theta = event.theta;
    for (int j = 0; j < inst.n; ++j) {
      if (state.active[j]) state.alpha[j] = state.theta;
    }
    out.events.push_back(event);
    if (event.kind == GreedyEvent::Kind::kOpen) {
      state.S.push_back(FacilityRef::Regular(event.subject));
      out.S_star.push_back(event.subject);
      for (int j = 0; j < inst.n; ++j) {
        if (state.active[j] && inst.cf(j, event.subject) <= state.theta) {
          state.active[j] = false;
          out.events.push_back(
              GreedyEvent{state.theta, GreedyEvent::Kind::kConnect, j});
        }
      }
    } else {
      state.active[event.subject] = false;
    }
  }
  out.alpha_star = state.alpha;
  return out;
}

AuditReport audit_no_overbid(const std::vector<GreedyEvent>& events,
                             const MetricInstance& inst,
                             const ParamSet& params) {
  AuditReport report;
  DualState state = DualState::Initial(inst.n, Rational(0));
  auto check = [&](const char* where) {
    const std::vector<ExtRational> dS =
        distances_to_open(inst, params, state.S);
    for (int i = 0; i < inst.m; ++i) {
      Rational paid = 0;
      for (int j = 0; j < inst.n; ++j) {
        paid += state.active[j]
                    ? PositivePart(state.alpha[j] - inst.cf(j, i))
                    : PositivePart(dS[j].value() - inst.cf(j, i));
      }
      if (paid > params.fhat) {
        report.failures.push_back(std::string(where) + ": overbid on i" +
                                  std::to_string(i) + " at theta " +
                                  FormatRational(state.theta));
      }
    }
    for (int j = 0; j < inst.n; ++j) {
      if (state.active[j] && !(state.alpha[j] <= dS[j])) {
        report.failures.push_back(std::string(where) + ": active client " +
                                  std::to_string(j) + " beyond d(j,S) at " +
                                  FormatRational(state.theta));
      }
    }
  };
  bool first = true;
  for (const GreedyEvent& e : events) {
    if (e.theta < state.theta) {
      report.failures.push_back("time runs backwards at " +
                                FormatRational(e.theta));
      return report;
    }
    const bool advanced = first || e.theta > state.theta;
    first = false;
    state.theta = e.theta;
    for (int j = 0; j < inst.n; ++j) {
      if (state.active[j]) state.alpha[j] = state.theta;
    }
    if (advanced || e.kind == GreedyEvent::Kind::kOpen) check("checkpoint");
    if (e.kind == GreedyEvent::Kind::kOpen) {
      state.S.push_back(FacilityRef::Regular(e.subject));
    } else {
      if (!state.active[e.subject]) {
        report.failures.push_back("client " + std::to_string(e.subject) +
                                  " connected twice");
        continue;
      }
      state.active[e.subject] = false;
    }
  }
  check("final");
  return report;
}

Rational payment_gap(const MetricInstance& inst, const Rational& fhat,
                     const std::vector<int>& S,
                     const std::vector<Rational>& alpha) {
  Rational gap = std::accumulate(alpha.begin(), alpha.end(), Rational(0));
  for (int j = 0; j < inst.n; ++j) {
    Rational best = inst.cf(j, S.at(0));
    for (int i : S) best = std::min(best, inst.cf(j, i));
    gap -= best;
  }
  return gap - fhat * static_cast<long>(S.size());
}

Rational max_dual_load(const MetricInstance& inst,
                       const std::vector<Rational>& alpha) {
  Rational best = 0;
  for (int i = 0; i < inst.m; ++i) {
    Rational load = 0;
    for (int j = 0; j < inst.n; ++j) {
      load += PositivePart(alpha[j] - 2 * inst.cf(j, i));
    }
    best = std::max(best, load);
  }
  return best;
}

Rational max_ordered_load(const MetricInstance& inst,
                          const std::vector<Rational>& alpha) {
  std::vector<int> order(inst.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return alpha[a] != alpha[b] ? alpha[a] < alpha[b] : a < b;
  });
  Rational best = 0;
  for (size_t pk = 0; pk < order.size(); ++pk) {
    const int k = order[pk];
    for (int i = 0; i < inst.m; ++i) {
      Rational load = 0;
      for (size_t pj = 0; pj < order.size(); ++pj) {
        const int j = order[pj];
        load += pj >= pk ? PositivePart(alpha[k] - inst.cf(j, i))
                         : PositivePart(alpha[k] - 2 * inst.cf(j, i) -
                                        inst.cf(k, i));
      }
      best = std::max(best, load);
    }
  }
  return best;
}

}  // namespace kmedkit
