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


#include "kmedkit/submodular.h"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace kmedkit {

bool PartitionMatroid::Independent(const std::vector<int>& X) const {
  std::set<int> used;
  std::set<int> seen;
  for (int e : X) {
    if (e < 0 || e >= static_cast<int>(ground.size())) return false;
    if (!seen.insert(e).second) return false;
    if (!used.insert(ground[e].part).second) return false;
  }
  return true;
}

std::vector<int> PartitionMatroid::Part(int part) const {
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(ground.size()); ++e) {
    if (ground[e].part == part) out.push_back(e);
  }
  return out;
}

PartitionMatroid make_ball_matroid(const MetricInstance& inst, int real_m,
                                   const std::vector<Ball>& balls) {
  PartitionMatroid matroid;
  matroid.parts = static_cast<int>(balls.size());
  for (int t = 0; t < matroid.parts; ++t) {
    for (int i = 0; i < real_m; ++i) {
      if (inst.cf(balls[t].leader, i) <= balls[t].radius) {
        matroid.ground.push_back({i, t});
      }
    }
  }
  return matroid;
}

namespace {

bool Contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// d(p, {c} + X + Lambda) with c < 0 meaning no c.
// Null when the set is empty.
const Rational* Nearest(const SubmodularContext& ctx, int p, int c,
                        const std::vector<int>& X) {
  const Rational* best = c >= 0 ? &ctx.inst->cf(p, c) : nullptr;
  for (const std::vector<int>* set : {&X, &ctx.lambda}) {
    for (int f : *set) {
      const Rational& d = ctx.inst->cf(p, f);
      if (best == nullptr || d < *best) best = &d;
    }
  }
  return best;
}

const Rational& Finite(const Rational* value) {
  if (value == nullptr) {
    throw std::invalid_argument("client has no reachable center");
  }
  return *value;
}

const ClusterView& Cluster(const SubmodularContext& ctx, int c) {
  auto it = ctx.clusters.find(c);
  if (it == ctx.clusters.end()) {
    throw std::invalid_argument("no cluster for center " + std::to_string(c));
  }
  return it->second;
}

}  // namespace

SubmodularContext make_submodular_context(const MetricInstance& inst,
                                          const std::vector<int>& lambda,
                                          const std::vector<int>& assignment,
                                          const std::vector<int>& P,
                                          const std::vector<int>& R0, int r1,
                                          const Rational& cost_S,
                                          const Rational& epsilon) {
  if (static_cast<int>(assignment.size()) != inst.n) {
    throw std::invalid_argument("assignment size differs from client count");
  }
  if (r1 < 0) throw std::invalid_argument("negative r1");
  SubmodularContext ctx;
  ctx.inst = &inst;
  ctx.lambda = lambda;
  ctx.assignment = assignment;
  ctx.R0 = R0;
  ctx.r1 = r1;
  for (int p = 0; p < inst.n; ++p) {
    ClusterView& view = ctx.clusters[assignment[p]];
    view.center = assignment[p];
    view.members.push_back(p);
    view.cost += inst.cf(p, assignment[p]);
  }
  for (int c : P) {
    ClusterView& view = ctx.clusters[c];
    view.center = c;
  }
  const long closures = static_cast<long>(R0.size()) + r1;
  if (closures > 0 && lambda.empty()) {
    throw InfeasibleContext("closures requested without dummy centers");
  }
  for (auto& [c, view] : ctx.clusters) {
    if (closures == 0) continue;
    const long size = static_cast<long>(view.members.size());
    for (int p : view.members) {
      if (inst.cf(p, c) * closures * size <= epsilon * cost_S) {
        view.core.push_back(p);
      }
    }
    view.concentrated =
        static_cast<long>(view.core.size()) >= (1 - epsilon) * size;
  }
  std::vector<int> candidates = P;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (int c : candidates) {
    if (!Contains(R0, c) && ctx.clusters[c].concentrated) ctx.P1.push_back(c);
  }
  if (static_cast<int>(ctx.P1.size()) < r1) {
    throw InfeasibleContext("only " + std::to_string(ctx.P1.size()) +
                            " concentrated candidates for " +
                            std::to_string(r1) + " closures");
  }
  return ctx;
}

ExtRational distance_to_set(const MetricInstance& inst, int p,
                            const std::vector<int>& X) {
  ExtRational best;
  for (int i : X) best = Min(best, ExtRational(inst.cf(p, i)));
  return best;
}

bool is_hit(const SubmodularContext& ctx, int c, const std::vector<int>& X) {
  for (int p : Cluster(ctx, c).core) {
    const Rational& own = ctx.inst->cf(p, c);
    for (int x : X) {
      if (ctx.inst->cf(p, x) < own) return true;
    }
  }
  return false;
}

Rational closedcost(const SubmodularContext& ctx, int c,
                    const std::vector<int>& X) {
  const ClusterView& view = Cluster(ctx, c);
  Rational total = 0;
  if (is_hit(ctx, c, X)) {
    for (int p : view.members) total += Finite(Nearest(ctx, p, c, X));
    return total;
  }
  std::vector<int> options = X;
  options.insert(options.end(), ctx.lambda.begin(), ctx.lambda.end());
  if (options.empty()) {
    throw std::invalid_argument("closing a cluster with no other center");
  }
  std::optional<Rational> best;
  for (int other : options) {
    Rational sum = 0;
    for (int p : view.core) sum += ctx.inst->cf(p, other);
    if (!best || sum < *best) best = sum;
  }
  total = *best;
  for (int p : view.members) {
    if (!Contains(view.core, p)) total += Finite(Nearest(ctx, p, c, X));
  }
  return total;
}

Rational cost_inc(const SubmodularContext& ctx, int c,
                  const std::vector<int>& X) {
  Rational open = 0;
  for (int p : Cluster(ctx, c).members) open += Finite(Nearest(ctx, p, c, X));
  return closedcost(ctx, c, X) - open;
}

GValue eval_g(const SubmodularContext& ctx, const std::vector<int>& X) {
  GValue out;
  for (int p = 0; p < ctx.inst->n; ++p) {
    const int c = ctx.assignment[p];
    out.value += Finite(Nearest(ctx, p, Contains(ctx.R0, c) ? -1 : c, X));
  }
  std::vector<std::pair<Rational, int>> incs;
  for (int c : ctx.P1) incs.emplace_back(cost_inc(ctx, c, X), c);
  std::sort(incs.begin(), incs.end());
  for (int t = 0; t < ctx.r1; ++t) {
    out.value += incs[t].first;
    out.R1.push_back(incs[t].second);
  }
  std::sort(out.R1.begin(), out.R1.end());
  return out;
}

Rational eval_f(const SubmodularContext& ctx, const std::vector<int>& X) {
  return eval_g(ctx, {}).value - eval_g(ctx, X).value;
}

std::vector<int> facilities_of(const PartitionMatroid& matroid,
                               const std::vector<int>& X) {
  std::vector<int> out;
  for (int e : X) out.push_back(matroid.ground.at(e).facility);
  return out;
}

MaximizeResult maximize_f(const SubmodularContext& ctx,
                          const PartitionMatroid& matroid) {
  MaximizeResult out;
  const Rational base = eval_g(ctx, {}).value;
  Rational current = base;
  ++out.evaluations;
  std::set<int> used;
  while (true) {
    int best = -1;
    Rational best_g;
    for (int e = 0; e < static_cast<int>(matroid.ground.size()); ++e) {
      const auto& element = matroid.ground[e];
      if (used.count(element.part)) continue;
      std::vector<int> trial = out.X;
      trial.push_back(e);
      const Rational g = eval_g(ctx, facilities_of(matroid, trial)).value;
      ++out.evaluations;
      if (g >= current) continue;
      if (best < 0 || g < best_g ||
          (g == best_g &&
           std::make_pair(element.part, e) <
               std::make_pair(matroid.ground[best].part, best))) {
        best = e;
        best_g = g;
      }
    }
    if (best < 0) break;
    out.X.push_back(best);
    used.insert(matroid.ground[best].part);
    current = best_g;
  }
  std::sort(out.X.begin(), out.X.end());
  out.value = base - current;
  return out;
}

std::vector<int> extract_k_centers(const SubmodularContext& ctx,
                                   const PartitionMatroid& matroid,
                                   const std::vector<int>& X,
                                   const std::vector<int>& R1,
                                   const std::vector<int>& working, int k,
                                   int real_m) {
  if (!matroid.Independent(X)) {
    throw std::invalid_argument("X is not independent");
  }
  std::vector<int> kept;
  for (int c : working) {
    if (!Contains(ctx.R0, c) && !Contains(R1, c)) kept.push_back(c);
  }
  if (static_cast<int>(kept.size()) != k) {
    throw CardinalityMismatch(
        "closing R0 and R1 leaves " + std::to_string(kept.size()) +
        " of " + std::to_string(working.size()) + " centers, expected " +
        std::to_string(k));
  }
  std::set<int> out;
  for (int c : kept) {
    auto it = std::find(ctx.lambda.begin(), ctx.lambda.end(), c);
    if (it == ctx.lambda.end()) {
      if (c >= real_m) {
        throw std::invalid_argument("working center " + std::to_string(c) +
                                    " is neither real nor a dummy");
      }
      out.insert(c);
      continue;
    }
    const int part = static_cast<int>(it - ctx.lambda.begin());
    int chosen = -1;
    for (int e : X) {
      if (matroid.ground[e].part == part) chosen = matroid.ground[e].facility;
    }
    if (chosen < 0) {
      const std::vector<int> members = matroid.Part(part);
      if (members.empty()) {
        throw CardinalityMismatch("ball " + std::to_string(part) +
                                  " contains no facility");
      }
      chosen = matroid.ground[members.front()].facility;
    }
    out.insert(chosen);
  }
  for (int i = 0; i < real_m && static_cast<int>(out.size()) < k; ++i) {
    out.insert(i);
  }
  if (static_cast<int>(out.size()) != k) {
    throw CardinalityMismatch("fewer than k facilities exist");
  }
  return {out.begin(), out.end()};
}

}  // namespace kmedkit
