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


#include "kmedkit/stable.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "kmedkit/merge.h"
#include "kmedkit/oracle.h"
#include "kmedkit/random.h"

namespace kmedkit {

namespace {

constexpr uint64_t kSaturated = std::numeric_limits<uint64_t>::max();

bool Contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

std::vector<int> Minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int x : a) {
    if (!Contains(b, x)) out.push_back(x);
  }
  return out;
}

std::vector<int> Sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

uint64_t SaturatingCeil(double value) {
  if (!(value > 0)) return 0;
  if (value >= 1.8e19) return kSaturated;
  return static_cast<uint64_t>(std::ceil(value));
}

uint64_t SaturatingMul(uint64_t a, uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

uint64_t SaturatingAdd(uint64_t a, uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

uint64_t Mix(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool Accepts(const LocalSearchOptions& options, int k, const Rational& next,
             const Rational& current) {
  if (!(next < current)) return false;
  if (options.mode == LocalSearchOptions::Mode::kStrict) return true;
  return next <= (1 - options.epsilon / (5 * k)) * current;
}

// Smallest i with base^i >= x, for x > 0.
long CeilExponent(const Rational& base, const Rational& x) {
  long i = static_cast<long>(
      std::ceil(std::log(ToDouble(x)) / std::log(ToDouble(base))));
  const Rational b = base;
  auto power = [&](long e) {
    return e >= 0 ? Pow(b, static_cast<unsigned long>(e))
                  : Rational(1 / Pow(b, static_cast<unsigned long>(-e)));
  };
  while (power(i - 1) >= x) --i;
  while (power(i) < x) ++i;
  return i;
}

// Combinations of {0..n-1} of size r in lexicographic order.
void ForEachCombination(
    int n, int r, const std::function<bool(const std::vector<int>&)>& fn) {
  if (r > n || r < 0) return;
  std::vector<int> idx(r);
  for (int t = 0; t < r; ++t) idx[t] = t;
  while (true) {
    if (!fn(idx)) return;
    int t = r - 1;
    while (t >= 0 && idx[t] == n - r + t) --t;
    if (t < 0) return;
    ++idx[t];
    for (int u = t + 1; u < r; ++u) idx[u] = idx[u - 1] + 1;
  }
}

}  // namespace

std::vector<int> pad_to_k(const std::vector<int>& S, int k, int m) {
  std::vector<int> out = Sorted(S);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int i = 0; i < m && static_cast<int>(out.size()) < k; ++i) {
    if (!std::binary_search(out.begin(), out.end(), i)) {
      out.insert(std::lower_bound(out.begin(), out.end(), i), i);
    }
  }
  return out;
}

std::optional<std::pair<int, int>> find_improving_swap(
    const MetricInstance& inst, const std::vector<int>& S,
    const LocalSearchOptions& options) {
  const int k = static_cast<int>(S.size());
  const Rational current = cost(inst, S);
  std::optional<std::pair<int, int>> best;
  Rational best_cost;
  for (int out : Sorted(S)) {
    for (int in = 0; in < inst.m; ++in) {
      if (Contains(S, in)) continue;
      std::vector<int> T = S;
      *std::find(T.begin(), T.end(), out) = in;
      const Rational c = cost(inst, T);
      if (!Accepts(options, k, c, current)) continue;
      if (!best || c < best_cost) {
        best = std::make_pair(out, in);
        best_cost = c;
      }
    }
  }
  return best;
}

LocalSearchResult local_search(const MetricInstance& inst, int k,
                               const LocalSearchOptions& options) {
  if (k < 1 || k > inst.m) throw std::invalid_argument("k must be in [1, m]");
  LocalSearchResult out;
  if (options.initial.empty()) {
    for (int i = 0; i < k; ++i) out.S.push_back(i);
  } else {
    out.S = Sorted(options.initial);
    const bool distinct =
        std::adjacent_find(out.S.begin(), out.S.end()) == out.S.end();
    if (static_cast<int>(out.S.size()) != k || !distinct ||
        out.S.front() < 0 || out.S.back() >= inst.m) {
      throw std::invalid_argument("initial solution is not k facilities");
    }
  }
  while (options.max_swaps < 0 || out.swaps < options.max_swaps) {
    const auto swap = find_improving_swap(inst, out.S, options);
    if (!swap) break;
    *std::find(out.S.begin(), out.S.end(), swap->first) = swap->second;
    std::sort(out.S.begin(), out.S.end());
    ++out.swaps;
  }
  out.cost = cost(inst, out.S);
  return out;
}

uint64_t default_sample_size(int n, const Rational& epsilon) {
  const double e = ToDouble(epsilon);
  return SaturatingCeil(5 * std::log(static_cast<double>(n)) / std::pow(e, 5) *
                        std::log(5 / (e * e)));
}

std::vector<int> d_sample(const MetricInstance& inst, const std::vector<int>& S,
                          uint64_t s, uint64_t seed) {
  std::vector<Rational> weights;
  Rational total = 0;
  for (const ExtRational& d : nearest_distances(inst, S)) {
    weights.push_back(d.value());
    total += d.value();
  }
  std::vector<int> W;
  if (sgn(total) == 0) return W;
  Rng rng(seed);
  for (uint64_t t = 0; t < s; ++t) W.push_back(rng.Weighted(weights));
  return W;
}

Rational grid_radius(const Rational& epsilon, long exponent) {
  const Rational base = 1 + epsilon * epsilon * epsilon;
  if (exponent >= 0) return Pow(base, static_cast<unsigned long>(exponent));
  return 1 / Pow(base, static_cast<unsigned long>(-exponent));
}

std::optional<std::pair<long, long>> radius_exponents(const Rational& S_p,
                                                      const Rational& epsilon) {
  if (sgn(S_p) <= 0) return std::nullopt;
  const Rational e3 = epsilon * epsilon * epsilon;
  const Rational base = 1 + e3;
  const long lo = CeilExponent(base, e3 * S_p);
  long hi = CeilExponent(base, S_p / e3);
  if (grid_radius(epsilon, hi) > S_p / e3) --hi;
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::vector<Rational> leader_radii(const MetricInstance& inst, int real_m,
                                   int leader, const Rational& S_p,
                                   const Rational& epsilon, RadiusMode mode) {
  std::vector<Rational> out;
  const auto range = radius_exponents(S_p, epsilon);
  if (!range) return out;
  if (mode == RadiusMode::kGrid) {
    for (long i = range->first; i <= range->second; ++i) {
      out.push_back(grid_radius(epsilon, i));
    }
    return out;
  }
  const Rational base = 1 + epsilon * epsilon * epsilon;
  const Rational smallest = grid_radius(epsilon, range->first);
  std::vector<Rational> d;
  for (int i = 0; i < real_m; ++i) d.push_back(inst.cf(leader, i));
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  auto index = [&](const Rational& x) {
    return x <= smallest ? range->first : CeilExponent(base, x);
  };
  for (size_t t = 0; t < d.size(); ++t) {
    const long i = index(d[t]);
    if (i > range->second) break;
    if (t + 1 == d.size() || index(d[t + 1]) > i) out.push_back(d[t]);
  }
  return out;
}

BallFamily ball_guesses(const MetricInstance& inst, const std::vector<int>& W,
                        const std::vector<Rational>& S_costs,
                        const Rational& epsilon,
                        const BallGuessOptions& options) {
  std::vector<int> leaders = Sorted(W);
  leaders.erase(std::unique(leaders.begin(), leaders.end()), leaders.end());
  const int q = static_cast<int>(leaders.size());
  const int max_size =
      options.max_balls < 0 ? q : std::min(q, options.max_balls);
  // Per-leader radius counts; grid radii are materialized lazily.
  std::vector<uint64_t> counts(q);
  std::vector<std::vector<Rational>> radii(q);
  std::vector<long> first(q, 0);
  for (int t = 0; t < q; ++t) {
    const Rational& S_p = S_costs.at(leaders[t]);
    if (options.mode == RadiusMode::kGrid) {
      const auto range = radius_exponents(S_p, epsilon);
      if (range) {
        first[t] = range->first;
        counts[t] = static_cast<uint64_t>(range->second - range->first + 1);
      }
    } else {
      radii[t] = leader_radii(inst, inst.m, leaders[t], S_p, epsilon,
                              RadiusMode::kTight);
      counts[t] = radii[t].size();
    }
  }
  BallFamily out;
  for (int r = 0; r <= max_size; ++r) {
    ForEachCombination(q, r, [&](const std::vector<int>& idx) {
      uint64_t product = 1;
      for (int t : idx) product = SaturatingMul(product, counts[t]);
      out.total = SaturatingAdd(out.total, product);
      return true;
    });
  }
  if (out.total > options.cap && !options.truncate) {
    throw CapExceeded("ball family has about " + std::to_string(out.total) +
                      " sets, cap " + std::to_string(options.cap));
  }
  auto radius = [&](int t, uint64_t j) {
    if (options.mode == RadiusMode::kGrid) {
      return grid_radius(epsilon, first[t] + static_cast<long>(j));
    }
    return radii[t][j];
  };
  for (int r = 0; r <= max_size; ++r) {
    bool more = true;
    ForEachCombination(q, r, [&](const std::vector<int>& idx) {
      std::vector<uint64_t> digit(r, 0);
      for (int t : idx) {
        if (counts[t] == 0) return true;
      }
      while (true) {
        if (out.sets.size() >= options.cap) {
          more = false;
          return false;
        }
        std::vector<Ball> set;
        for (int u = 0; u < r; ++u) {
          set.push_back({leaders[idx[u]], radius(idx[u], digit[u])});
        }
        out.sets.push_back(std::move(set));
        int u = r - 1;
        while (u >= 0 && ++digit[u] == counts[idx[u]]) digit[u--] = 0;
        if (u < 0) return true;
      }
    });
    if (!more) break;
  }
  out.truncated = out.sets.size() < out.total;
  return out;
}

DummyExtension make_dummy_centers(const MetricInstance& inst,
                                  const std::vector<Ball>& balls) {
  const int b = static_cast<int>(balls.size());
  DummyExtension out;
  out.inst = MetricInstance::Zero(inst.n, inst.m + b);
  out.inst.label = inst.label;
  const int points = inst.points();
  for (int a = 0; a < points; ++a) {
    for (int c = a + 1; c < points; ++c) out.inst.Set(a, c, inst.d(a, c));
  }
  for (int t = 0; t < b; ++t) {
    const int delta = points + t;
    const Ball& ball = balls[t];
    if (sgn(ball.radius) < 0) throw std::invalid_argument("negative radius");
    for (int x = 0; x < points; ++x) {
      out.inst.Set(delta, x, ball.radius + inst.d(ball.leader, x));
    }
    for (int u = 0; u < t; ++u) {
      out.inst.Set(delta, points + u,
                   ball.radius + balls[u].radius +
                       inst.d(ball.leader, balls[u].leader));
    }
    out.lambda.push_back(inst.m + t);
  }
  return out;
}

std::vector<int> assign_nearest(const MetricInstance& inst,
                                const std::vector<int>& centers) {
  if (centers.empty()) throw std::invalid_argument("no centers");
  const std::vector<int> order = Sorted(centers);
  std::vector<int> out(inst.n);
  for (int p = 0; p < inst.n; ++p) {
    int best = order.front();
    for (int c : order) {
      if (inst.cf(p, c) < inst.cf(p, best)) best = c;
    }
    out[p] = best;
  }
  return out;
}

std::map<int, Rational> cluster_costs(const MetricInstance& inst,
                                      const std::vector<int>& S_minus_Q,
                                      const std::vector<int>& lambda) {
  std::map<int, Rational> out;
  for (int c : S_minus_Q) out[c] = 0;
  std::vector<int> centers = S_minus_Q;
  centers.insert(centers.end(), lambda.begin(), lambda.end());
  if (centers.empty()) return out;
  const std::vector<int> a = assign_nearest(inst, centers);
  for (int p = 0; p < inst.n; ++p) {
    auto it = out.find(a[p]);
    if (it != out.end()) it->second += inst.cf(p, a[p]);
  }
  return out;
}

uint64_t default_exp_iterations(int n, int s0_bound, const Rational& epsilon) {
  const double base = 8 / ToDouble(epsilon);
  const double value =
      std::pow(base, s0_bound + 1) * std::log(static_cast<double>(n));
  return std::max<uint64_t>(1, SaturatingCeil(value));
}

ExpRemResult exp_rem(const MetricInstance& inst, const std::vector<int>& S,
                     const std::vector<int>& lambda, int s0_bound,
                     const Rational& epsilon, uint64_t seed,
                     uint64_t outer_cap) {
  if (s0_bound < 0) throw std::invalid_argument("negative s0 bound");
  ExpRemResult out;
  const uint64_t theory = default_exp_iterations(inst.n, s0_bound, epsilon);
  out.iterations = std::min(theory, outer_cap);
  out.truncated = theory > outer_cap;
  Rng rng(seed);
  std::set<std::vector<int>> seen;
  for (uint64_t it = 0; it < out.iterations; ++it) {
    std::vector<int> Q;
    for (int step = 0; step <= s0_bound; ++step) {
      if (!rng.Coin()) continue;
      const std::vector<int> rest = Minus(S, Q);
      if (rest.empty()) continue;
      const std::map<int, Rational> costs = cluster_costs(inst, rest, lambda);
      std::vector<Rational> weights;
      Rational total = 0;
      for (int c : rest) {
        weights.push_back(costs.at(c));
        total += costs.at(c);
      }
      if (sgn(total) == 0) continue;
      Q.push_back(rest[rng.Weighted(weights)]);
    }
    std::sort(Q.begin(), Q.end());
    if (seen.insert(Q).second) out.sets.push_back(Q);
  }
  return out;
}

namespace {

class CheapSearch {
 public:
  CheapSearch(const MetricInstance& inst, const std::vector<int>& SQ,
              const std::vector<int>& lambda, const RemovalSizes& sizes)
      : inst_(inst), SQ_(SQ), sizes_(sizes) {
    std::vector<int> centers = SQ;
    centers.insert(centers.end(), lambda.begin(), lambda.end());
    if (!centers.empty()) {
      const std::vector<int> a = assign_nearest(inst, centers);
      for (int p = 0; p < inst.n; ++p) members_[a[p]].push_back(p);
    }
  }

  void Exhaustive() {
    result_.exhaustive = true;
    const int size = static_cast<int>(SQ_.size());
    ForEachCombination(size, sizes_.U, [&](const std::vector<int>& ui) {
      std::vector<int> U_tilde;
      for (int t : ui) U_tilde.push_back(SQ_[t]);
      const std::vector<int> rest = Minus(SQ_, U_tilde);
      ForEachCombination(static_cast<int>(rest.size()), sizes_.R,
                         [&](const std::vector<int>& ri) {
                           std::vector<int> excluded = U_tilde;
                           for (int t : ri) excluded.push_back(rest[t]);
                           CheapEntry entry;
                           entry.U_tilde = U_tilde;
                           for (int c : U_tilde) {
                             const int nx = Closest(c, excluded);
                             if (nx < 0) return true;
                             entry.next[c] = nx;
                           }
                           Emit(entry);
                           return true;
                         });
      return true;
    });
  }

  void Recurse(const std::vector<int>& Up, const std::vector<int>& Rp,
               const std::vector<int>& Xp, const std::vector<int>& N,
               const CheapEntry& entry, int depth) {
    ++result_.calls;
    result_.max_depth = std::max(result_.max_depth, depth);
    if (static_cast<int>(entry.U_tilde.size()) == sizes_.U) {
      Emit(entry);
      return;
    }
    std::vector<int> blocked = Up;
    blocked.insert(blocked.end(), Rp.begin(), Rp.end());
    blocked.insert(blocked.end(), entry.U_tilde.begin(), entry.U_tilde.end());
    int c = -1;
    int nx = -1;
    Rational best;
    for (int cand : SQ_) {
      if (Contains(Rp, cand) || Contains(Xp, cand) || Contains(N, cand) ||
          Contains(entry.U_tilde, cand)) {
        continue;
      }
      const int next = Closest(cand, blocked);
      if (next < 0) continue;
      Rational r = 0;
      auto it = members_.find(cand);
      if (it != members_.end()) {
        for (int p : it->second) r += inst_.cf(p, next);
      }
      if (c < 0 || r < best) {
        c = cand;
        nx = next;
        best = r;
      }
    }
    if (c < 0) return;
    const bool in_up = Contains(Up, c);
    if (!in_up && static_cast<int>(Xp.size()) < sizes_.X) {
      Recurse(Up, Rp, With(Xp, c), N, entry, depth + 1);
    }
    if (!in_up && static_cast<int>(Rp.size()) < sizes_.R) {
      Recurse(Up, With(Rp, c), Xp, N, entry, depth + 1);
    }
    CheapEntry grown = entry;
    grown.U_tilde.push_back(c);
    grown.next[c] = nx;
    const std::vector<int> N2 = Contains(N, nx) ? N : With(N, nx);
    const bool identified = static_cast<int>(Up.size() + Rp.size()) ==
                            sizes_.U + sizes_.R;
    if (identified || Contains(N, nx)) {
      Recurse(Up, Rp, Xp, N2, grown, depth + 1);
      return;
    }
    if (static_cast<int>(Rp.size()) < sizes_.R) {
      Recurse(Up, With(Rp, nx), Xp, N, entry, depth + 1);
    }
    if (static_cast<int>(Up.size()) < sizes_.U) {
      Recurse(With(Up, nx), Rp, Xp, N, entry, depth + 1);
    }
    Recurse(Up, Rp, Xp, N2, grown, depth + 1);
  }

  CheapRemResult Take() { return std::move(result_); }

 private:
  static std::vector<int> With(std::vector<int> v, int x) {
    v.push_back(x);
    return v;
  }

  // Closest member of SQ - excluded - {c} to c, ties to the smallest id.
  int Closest(int c, const std::vector<int>& excluded) const {
    int best = -1;
    for (int x : SQ_) {
      if (x == c || Contains(excluded, x)) continue;
      if (best < 0 || inst_.ff(c, x) < inst_.ff(c, best)) best = x;
    }
    return best;
  }

  void Emit(CheapEntry entry) {
    std::sort(entry.U_tilde.begin(), entry.U_tilde.end());
    if (seen_.insert(entry).second) result_.entries.push_back(entry);
  }

  const MetricInstance& inst_;
  std::vector<int> SQ_;
  RemovalSizes sizes_;
  std::map<int, std::vector<int>> members_;
  std::set<CheapEntry> seen_;
  CheapRemResult result_;
};

}  // namespace

CheapRemResult cheap_rem(const MetricInstance& inst, const std::vector<int>& S,
                         const std::vector<int>& Q, const RemovalSizes& sizes,
                         const std::vector<int>& lambda) {
  if (sizes.U < 0 || sizes.R < 0 || sizes.X < 0) {
    throw std::invalid_argument("negative removal size");
  }
  const std::vector<int> SQ = Sorted(Minus(S, Q));
  const int size = static_cast<int>(SQ.size());
  if (sizes.ell() > 2 * size) {
    throw std::invalid_argument("sizes exceed twice |S - Q|");
  }
  CheapSearch search(inst, SQ, lambda, sizes);
  if (size <= 4 * sizes.ell()) {
    search.Exhaustive();
  } else {
    search.Recurse({}, {}, {}, {}, CheapEntry{}, 0);
  }
  return search.Take();
}

std::vector<int> reassign(const MetricInstance& inst,
                          const std::vector<int>& S_Q,
                          const CheapEntry& entry) {
  std::vector<int> mu = assign_nearest(inst, S_Q);
  for (int& c : mu) {
    auto it = entry.next.find(c);
    if (it != entry.next.end()) c = it->second;
  }
  return mu;
}

std::vector<int> unchanged_centers(const MetricInstance& inst,
                                   const std::vector<int>& S_Q,
                                   const std::vector<int>& candidates,
                                   const std::vector<int>& mu) {
  const std::vector<int> base = assign_nearest(inst, S_Q);
  std::vector<int> out;
  for (int c : Sorted(candidates)) {
    bool same = true;
    for (int p = 0; p < inst.n && same; ++p) {
      same = (base[p] == c) == (mu[p] == c);
    }
    if (same) out.push_back(c);
  }
  return out;
}

std::vector<std::vector<int>> guess_R0(
    const std::map<int, Rational>& cluster_cost, const Rational& threshold,
    int max_members, int max_size) {
  if (sgn(threshold) <= 0) throw std::invalid_argument("threshold must be > 0");
  std::vector<int> heavy;
  for (const auto& [c, value] : cluster_cost) {
    if (value >= threshold) heavy.push_back(c);
  }
  const int count = static_cast<int>(heavy.size());
  if (count > max_members) {
    throw CapExceeded(std::to_string(count) +
                      " clusters above the R0 threshold, 2^" +
                      std::to_string(count) + " subsets");
  }
  const int top = max_size < 0 ? count : std::min(count, max_size);
  std::vector<std::vector<int>> out;
  for (int r = 0; r <= top; ++r) {
    ForEachCombination(count, r, [&](const std::vector<int>& idx) {
      std::vector<int> subset;
      for (int t : idx) subset.push_back(heavy[t]);
      out.push_back(subset);
      return true;
    });
  }
  return out;
}

namespace {

struct BallContext {
  std::vector<Ball> balls;
  DummyExtension ext;
  PartitionMatroid matroid;
};

struct Task {
  std::shared_ptr<const BallContext> ball;
  std::vector<int> Q;
  RemovalSizes sizes;
  CheapEntry cheap;
};

struct Candidate {
  Rational cost;
  std::vector<int> centers;
  // (restart, task, R0 index) in enumeration order.
  std::tuple<int, uint64_t, uint64_t> order;
  StableGuess guess;

  bool Better(const Candidate& o) const {
    if (cost != o.cost) return cost < o.cost;
    if (centers != o.centers) return centers < o.centers;
    return order < o.order;
  }
};

struct TaskOutcome {
  std::optional<Candidate> best;
  uint64_t candidates = 0;
  bool partial = false;
};

TaskOutcome EvaluateTask(const MetricInstance& inst, int k,
                         const Rational& epsilon, const std::vector<int>& S,
                         const Rational& S_cost, const StableCaps& caps,
                         const std::optional<InjectedGuess>& oracle,
                         const Task& task, int restart, uint64_t index) {
  TaskOutcome out;
  const BallContext& bc = *task.ball;
  const MetricInstance& ext = bc.ext.inst;
  const std::vector<int>& lambda = bc.ext.lambda;
  const std::vector<int> SQ = Sorted(Minus(S, task.Q));
  std::vector<int> S_Q = SQ;
  S_Q.insert(S_Q.end(), lambda.begin(), lambda.end());
  const std::vector<int> mu = reassign(ext, S_Q, task.cheap);
  const std::vector<int> kept = Minus(SQ, task.cheap.U_tilde);
  std::vector<int> working = kept;
  working.insert(working.end(), lambda.begin(), lambda.end());
  const std::vector<int> P = unchanged_centers(ext, S_Q, kept, mu);
  const int R = task.sizes.R;
  std::vector<std::vector<int>> r0_sets = {{}};
  if (oracle && oracle->R0) {
    r0_sets = {Sorted(*oracle->R0)};
  } else if (R > 0) {
    std::map<int, Rational> costs;
    for (int c : P) costs[c] = 0;
    for (int p = 0; p < ext.n; ++p) {
      auto it = costs.find(mu[p]);
      if (it != costs.end()) it->second += ext.cf(p, mu[p]);
    }
    const Rational threshold = epsilon * epsilon * (S_cost / 5) / R;
    try {
      r0_sets = guess_R0(costs, threshold, caps.r0_cap, R);
    } catch (const CapExceeded&) {
      out.partial = true;
    }
  }
  for (uint64_t r0 = 0; r0 < r0_sets.size(); ++r0) {
    const std::vector<int>& R0 = r0_sets[r0];
    const int r1 = R - static_cast<int>(R0.size());
    if (r1 < 0) continue;
    SubmodularContext ctx;
    try {
      ctx = make_submodular_context(ext, lambda, mu, P, R0, r1, S_cost,
                                    epsilon);
    } catch (const InfeasibleContext&) {
      continue;
    }
    const MaximizeResult best = maximize_f(ctx, bc.matroid);
    const std::vector<int> X = facilities_of(bc.matroid, best.X);
    const GValue g = eval_g(ctx, X);
    std::vector<int> centers;
    try {
      centers = extract_k_centers(ctx, bc.matroid, best.X, g.R1, working, k,
                                  inst.m);
    } catch (const CardinalityMismatch&) {
      continue;
    }
    ++out.candidates;
    Candidate cand;
    cand.cost = cost(inst, centers);
    cand.centers = std::move(centers);
    cand.order = {restart, index, r0};
    if (out.best && !cand.Better(*out.best)) continue;
    cand.guess.balls = bc.balls;
    cand.guess.Q = task.Q;
    cand.guess.sizes = task.sizes;
    cand.guess.cheap = task.cheap;
    cand.guess.R0 = R0;
    cand.guess.X = Sorted(X);
    out.best = std::move(cand);
  }
  return out;
}

bool BallHasFacility(const MetricInstance& inst, const Ball& ball) {
  for (int i = 0; i < inst.m; ++i) {
    if (inst.cf(ball.leader, i) <= ball.radius) return true;
  }
  return false;
}

}  // namespace

StableResult run_stable(const MetricInstance& inst, int k,
                        const Rational& epsilon, uint64_t seed,
                        const StableOptions& options) {
  if (k < 1 || k > inst.m) throw std::invalid_argument("k must be in [1, m]");
  if (sgn(epsilon) <= 0 || epsilon >= 1) {
    throw std::invalid_argument("epsilon must be in (0, 1)");
  }
  const StableCaps& caps = options.caps;
  StableResult result;
  if (options.S) {
    result.S = Sorted(*options.S);
    if (static_cast<int>(result.S.size()) != k) {
      throw std::invalid_argument("injected S does not have k centers");
    }
  } else {
    result.S = local_search(inst, k, options.local_search).S;
  }
  result.S_cost = cost(inst, result.S);
  Candidate best;
  best.cost = result.S_cost;
  best.centers = result.S;
  best.order = {-1, 0, 0};
  result.candidates = 1;
  std::vector<Rational> S_costs;
  for (const ExtRational& d : nearest_distances(inst, result.S)) {
    S_costs.push_back(d.value());
  }
  const bool trivial = k == inst.m || sgn(result.S_cost) == 0;
  const int restarts = options.oracle ? 1 : std::max(1, caps.restarts);
  int threads = caps.threads > 0
                    ? caps.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);
  for (int restart = 0; restart < restarts && !trivial; ++restart) {
    const uint64_t restart_seed = Mix(seed, static_cast<uint64_t>(restart));
    std::vector<int> W;
    std::vector<std::vector<Ball>> ball_sets;
    if (options.oracle) {
      W = options.oracle->W;
      ball_sets = {options.oracle->balls};
    } else {
      const uint64_t s =
          std::min(default_sample_size(inst.n, epsilon), caps.sample_cap);
      W = d_sample(inst, result.S, s, Mix(restart_seed, 1));
      BallGuessOptions bo;
      bo.mode = caps.radius_mode;
      bo.max_balls = caps.max_balls;
      bo.cap = caps.ball_family_cap;
      bo.truncate = true;
      BallFamily family = ball_guesses(inst, W, S_costs, epsilon, bo);
      if (family.truncated) {
        result.partial = true;
        result.notes.push_back("ball family truncated at " +
                               std::to_string(family.sets.size()) + " of " +
                               std::to_string(family.total));
      }
      ball_sets = std::move(family.sets);
    }
    std::vector<Task> tasks;
    bool task_cap_hit = false;
    for (size_t b = 0; b < ball_sets.size() && !task_cap_hit; ++b) {
      const std::vector<Ball>& balls = ball_sets[b];
      bool usable = true;
      for (const Ball& ball : balls) {
        usable = usable && BallHasFacility(inst, ball);
      }
      if (!usable) continue;
      auto bc = std::make_shared<BallContext>();
      bc->balls = balls;
      bc->ext = make_dummy_centers(inst, balls);
      bc->matroid = make_ball_matroid(bc->ext.inst, inst.m, balls);
      const int nb = static_cast<int>(balls.size());
      std::vector<std::vector<int>> q_sets;
      if (options.oracle) {
        q_sets = {Sorted(options.oracle->Q)};
      } else {
        ExpRemResult er = exp_rem(bc->ext.inst, result.S, bc->ext.lambda, nb,
                                  epsilon, Mix(restart_seed, 2 + b),
                                  caps.exp_outer_cap);
        if (er.truncated) {
          result.partial = true;
          result.notes.push_back(
              "expensive removal capped at " + std::to_string(er.iterations) +
              " of " +
              std::to_string(default_exp_iterations(inst.n, nb, epsilon)) +
              " iterations");
        }
        q_sets = std::move(er.sets);
      }
      for (const std::vector<int>& Q : q_sets) {
        if (static_cast<int>(Q.size()) > nb) continue;
        const int free = nb - static_cast<int>(Q.size());
        std::vector<RemovalSizes> size_list;
        if (options.oracle) {
          const RemovalSizes& s = options.oracle->sizes;
          if (s.U + s.R != free) {
            throw std::invalid_argument(
                "injected sizes must satisfy |U| + |R| = |B| - |Q|");
          }
          size_list = {s};
        } else {
          for (int U = 0; U <= free; ++U) {
            for (int X = 0; X <= U; ++X) size_list.push_back({U, free - U, X});
          }
        }
        const int sq = static_cast<int>(result.S.size() - Q.size());
        for (const RemovalSizes& sizes : size_list) {
          if (sizes.ell() > 2 * sq) continue;
          const CheapRemResult cr =
              cheap_rem(bc->ext.inst, result.S, Q, sizes, bc->ext.lambda);
          for (const CheapEntry& entry : cr.entries) {
            if (tasks.size() >= caps.candidate_cap) {
              task_cap_hit = true;
              break;
            }
            tasks.push_back({bc, Q, sizes, entry});
          }
          if (task_cap_hit) break;
        }
        if (task_cap_hit) break;
      }
    }
    if (task_cap_hit) {
      result.partial = true;
      result.notes.push_back("candidate cap reached in restart " +
                             std::to_string(restart));
    }
    std::atomic<size_t> cursor{0};
    std::vector<TaskOutcome> outcomes(threads);
    std::vector<std::exception_ptr> errors(threads);
    auto worker = [&](int id) {
      try {
        for (size_t t = cursor++; t < tasks.size(); t = cursor++) {
          TaskOutcome o =
              EvaluateTask(inst, k, epsilon, result.S, result.S_cost, caps,
                           options.oracle, tasks[t], restart, t);
          TaskOutcome& mine = outcomes[id];
          mine.candidates += o.candidates;
          mine.partial = mine.partial || o.partial;
          if (o.best && (!mine.best || o.best->Better(*mine.best))) {
            mine.best = std::move(o.best);
          }
        }
      } catch (...) {
        errors[id] = std::current_exception();
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int id = 0; id < threads; ++id) pool.emplace_back(worker, id);
      for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (TaskOutcome& o : outcomes) {
      result.candidates += o.candidates;
      if (o.partial) {
        result.partial = true;
        result.notes.push_back("R0 guess cap reached in restart " +
                               std::to_string(restart));
      }
      if (o.best && o.best->Better(best)) {
        best = std::move(*o.best);
        best.guess.W = Sorted(W);
      }
    }
  }
  result.centers = best.centers;
  result.cost = best.cost;
  result.winner = best.guess;
  result.winner_restart = std::max(0, std::get<0>(best.order));
  std::sort(result.notes.begin(), result.notes.end());
  result.notes.erase(std::unique(result.notes.begin(), result.notes.end()),
                     result.notes.end());
  return result;
}

MainResult run_main(const MetricInstance& inst, int k, const Rational& epsilon,
                    uint64_t seed, const StableOptions& options) {
  if (k < 1 || k > inst.m) throw std::invalid_argument("k must be in [1, m]");
  MainResult out;
  int kp = k;
  std::optional<PseudoSolution> pseudo;
  while (kp >= 1) {
    PseudoSolution ps = run_pseudo_approx(inst, kp, epsilon);
    if (kp + ps.free_count <= k) {
      out.surplus = ps.free_count;
      pseudo = std::move(ps);
      break;
    }
    kp = std::min(kp - 1, k - ps.free_count);
  }
  if (!pseudo) {
    const StableResult r = run_stable(inst, k, epsilon, seed, options);
    out.centers = r.centers;
    out.cost = r.cost;
    out.source = "stable";
    out.k_prime = 0;
    out.stable_costs[k] = r.cost;
    out.partial = r.partial;
    return out;
  }
  out.k_prime = kp;
  std::vector<int> bases;
  for (const FacilityRef& h : pseudo->open_set) bases.push_back(h.base);
  out.centers = pad_to_k(bases, k, inst.m);
  out.cost = cost(inst, out.centers);
  out.pseudo_cost = out.cost;
  out.source = "pseudo";
  for (int kk = kp + 1; kk <= k; ++kk) {
    const StableResult r = run_stable(inst, kk, epsilon, seed, options);
    out.partial = out.partial || r.partial;
    const std::vector<int> padded = pad_to_k(r.centers, k, inst.m);
    const Rational c = cost(inst, padded);
    out.stable_costs[kk] = c;
    if (c < out.cost || (c == out.cost && padded < out.centers)) {
      out.centers = padded;
      out.cost = c;
      out.source = "stable";
    }
  }
  return out;
}

}  // namespace kmedkit
