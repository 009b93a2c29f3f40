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


// Local search, D-sampling, ball guessing, dummy centers, expensive and
// cheap center removal, R0 guessing and the end-to-end drivers for stable
// instances and for the combination with the pseudo-solution walk.

#ifndef KMEDKIT_STABLE_H_
#define KMEDKIT_STABLE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmedkit/metric.h"
#include "kmedkit/rational.h"
#include "kmedkit/submodular.h"

namespace kmedkit {

struct LocalSearchOptions {
  enum class Mode { kStrict, kThreshold };
  Mode mode = Mode::kStrict;
  // Threshold mode accepts a swap only if the cost drops to at most
  // (1 - epsilon / (5k)) times the current cost.
  Rational epsilon = Rational(1, 8);
  // Starting solution; empty means the k lowest-index facilities.
  std::vector<int> initial;
  // Negative for no limit.
  long max_swaps = -1;
};

struct LocalSearchResult {
  std::vector<int> S;
  Rational cost;
  long swaps = 0;
};

// Steepest single swaps until none is accepted. Ties go to the
// lexicographically smallest (out, in) pair.
LocalSearchResult local_search(const MetricInstance& inst, int k,
                               const LocalSearchOptions& options = {});

// Best accepted swap (out, in) for S, if any.
std::optional<std::pair<int, int>> find_improving_swap(
    const MetricInstance& inst, const std::vector<int>& S,
    const LocalSearchOptions& options = {});

// ceil(5 ln n / eps^5 * ln(5 / eps^2)), saturating.
uint64_t default_sample_size(int n, const Rational& epsilon);

// s clients drawn independently with probability d(p, S) / cost(S). Empty
// when cost(S) = 0.
std::vector<int> d_sample(const MetricInstance& inst, const std::vector<int>& S,
                          uint64_t s, uint64_t seed);

// Exponents i with eps^3 S_p <= (1 + eps^3)^i <= S_p / eps^3; nullopt when
// S_p = 0.
std::optional<std::pair<long, long>> radius_exponents(const Rational& S_p,
                                                      const Rational& epsilon);
Rational grid_radius(const Rational& epsilon, long exponent);

enum class RadiusMode {
  // Every grid radius.
  kGrid,
  // One radius per distinct facility set of a grid ball: the largest facility
  // distance inside it. The ball holds the same facilities and its dummy is
  // no farther.
  kTight,
};

// Candidate radii of balls around client leader with S-cost S_p, over the
// first real_m facilities.
std::vector<Rational> leader_radii(const MetricInstance& inst, int real_m,
                                   int leader, const Rational& S_p,
                                   const Rational& epsilon, RadiusMode mode);

struct BallGuessOptions {
  RadiusMode mode = RadiusMode::kTight;
  // Largest subset of W; negative means |W|.
  int max_balls = -1;
  uint64_t cap = 1u << 16;
  // Stop at cap instead of throwing CapExceeded.
  bool truncate = false;
};

struct BallFamily {
  std::vector<std::vector<Ball>> sets;
  // Size of the untruncated family, saturating.
  uint64_t total = 0;
  bool truncated = false;
};

// For each subset of the distinct clients in W (ascending size, then
// lexicographic) every combination of leader radii. S_costs is indexed by
// client.
BallFamily ball_guesses(const MetricInstance& inst, const std::vector<int>& W,
                        const std::vector<Rational>& S_costs,
                        const Rational& epsilon,
                        const BallGuessOptions& options = {});

struct DummyExtension {
  // Original facilities followed by one dummy per ball.
  MetricInstance inst;
  std::vector<int> lambda;
};

// Dummy delta of ball (l, r) has d(delta, x) = r + d(l, x) for every input
// point x and d(delta, delta') = r + r' + d(l, l').
DummyExtension make_dummy_centers(const MetricInstance& inst,
                                  const std::vector<Ball>& balls);

// Client to its nearest center, ties to the smallest id.
std::vector<int> assign_nearest(const MetricInstance& inst,
                                const std::vector<int>& centers);

// Per center of S - Q, the cost of its cluster in Lambda + S - Q.
std::map<int, Rational> cluster_costs(const MetricInstance& inst,
                                      const std::vector<int>& S_minus_Q,
                                      const std::vector<int>& lambda);

// ceil((8 / eps)^(s0 + 1) ln n), saturating.
uint64_t default_exp_iterations(int n, int s0_bound, const Rational& epsilon);

struct ExpRemResult {
  // Distinct sorted Q sets in order of first appearance.
  std::vector<std::vector<int>> sets;
  uint64_t iterations = 0;
  bool truncated = false;
};

// Outer loop min(cap, theory count); each inner step flips a fair coin and on
// heads samples c in S - Q by its cluster cost in Lambda + S - Q. Zero-cost
// rounds leave Q unchanged.
ExpRemResult exp_rem(const MetricInstance& inst, const std::vector<int>& S,
                     const std::vector<int>& lambda, int s0_bound,
                     const Rational& epsilon, uint64_t seed,
                     uint64_t outer_cap);

struct RemovalSizes {
  int U = 0;
  int R = 0;
  int X = 0;
  int ell() const { return U + R + X; }
  bool operator==(const RemovalSizes& o) const {
    return U == o.U && R == o.R && X == o.X;
  }
};

struct CheapEntry {
  std::vector<int> U_tilde;
  // Reassignment target of each center of U_tilde.
  std::map<int, int> next;
  bool operator==(const CheapEntry& o) const {
    return U_tilde == o.U_tilde && next == o.next;
  }
  bool operator<(const CheapEntry& o) const {
    return U_tilde != o.U_tilde ? U_tilde < o.U_tilde : next < o.next;
  }
};

struct CheapRemResult {
  // Distinct entries in order of emission.
  std::vector<CheapEntry> entries;
  long calls = 0;
  int max_depth = 0;
  bool exhaustive = false;
};

// The recursive removal search. next(c) is the closest center to c by
// facility distance, ties to the smallest id. Branches where no c can be
// chosen or next(c) does not exist are pruned. Throws std::invalid_argument
// when sizes.ell() > 2 |S - Q|.
CheapRemResult cheap_rem(const MetricInstance& inst, const std::vector<int>& S,
                         const std::vector<int>& Q, const RemovalSizes& sizes,
                         const std::vector<int>& lambda);

// mu(p) = nearest center of S - Q + Lambda, moved to next(c) when that
// center is in U_tilde.
std::vector<int> reassign(const MetricInstance& inst,
                          const std::vector<int>& S_Q,
                          const CheapEntry& entry);

// Centers c of S - Q - U_tilde whose cluster under mu equals their cluster in
// S - Q + Lambda.
std::vector<int> unchanged_centers(const MetricInstance& inst,
                                   const std::vector<int>& S_Q,
                                   const std::vector<int>& candidates,
                                   const std::vector<int>& mu);

// All subsets of the centers whose cluster cost is at least threshold, by
// ascending size then lexicographic. Throws CapExceeded when more than
// max_members centers qualify.
std::vector<std::vector<int>> guess_R0(
    const std::map<int, Rational>& cluster_cost, const Rational& threshold,
    int max_members, int max_size = -1);

struct StableCaps {
  // Upper bound on the sample size.
  uint64_t sample_cap = 6;
  int max_balls = 2;
  RadiusMode radius_mode = RadiusMode::kTight;
  uint64_t ball_family_cap = 4096;
  uint64_t exp_outer_cap = 8;
  int r0_cap = 10;
  int restarts = 1;
  uint64_t candidate_cap = 1u << 20;
  // Zero means the hardware concurrency.
  int threads = 1;
};

// One point of the guess cross product.
struct StableGuess {
  std::vector<int> W;
  std::vector<Ball> balls;
  std::vector<int> Q;
  RemovalSizes sizes;
  CheapEntry cheap;
  std::vector<int> R0;
  // Facilities chosen by the matroid greedy.
  std::vector<int> X;
};

struct InjectedGuess {
  std::vector<int> W;
  std::vector<Ball> balls;
  std::vector<int> Q;
  RemovalSizes sizes;
  // Restricts the R0 enumeration to this set when present.
  std::optional<std::vector<int>> R0;
};

struct StableOptions {
  StableCaps caps;
  LocalSearchOptions local_search;
  // Skips local search.
  std::optional<std::vector<int>> S;
  std::optional<InjectedGuess> oracle;
};

struct StableResult {
  std::vector<int> centers;
  Rational cost;
  std::vector<int> S;
  Rational S_cost;
  // Winning guess; empty balls when S itself won.
  StableGuess winner;
  int winner_restart = 0;
  uint64_t candidates = 0;
  // Some enumeration hit a cap.
  bool partial = false;
  std::vector<std::string> notes;
};

// Best of local search and every candidate of the capped guess enumeration
// over caps.restarts independent samples. Reduction is by (cost, centers,
// enumeration order), so thread count does not change the result.
StableResult run_stable(const MetricInstance& inst, int k,
                        const Rational& epsilon, uint64_t seed,
                        const StableOptions& options = {});

struct MainResult {
  std::vector<int> centers;
  Rational cost;
  // "pseudo" or "stable".
  std::string source;
  int k_prime = 0;
  int surplus = 0;
  std::optional<Rational> pseudo_cost;
  // Best stable cost per k'' in (k', k].
  std::map<int, Rational> stable_costs;
  bool partial = false;
};

// Pseudo-solution at k' = k - surplus with the surplus re-measured until
// k' + surplus <= k, its facility bases padded to k, against run_stable for
// every k'' in (k', k] padded to k. Falls back to run_stable(k) when k' < 1.
MainResult run_main(const MetricInstance& inst, int k, const Rational& epsilon,
                    uint64_t seed, const StableOptions& options = {});

// Sorted distinct S plus the lowest-index facilities outside it until k are
// present.
std::vector<int> pad_to_k(const std::vector<int>& S, int k, int m);

}  // namespace kmedkit

#endif  // KMEDKIT_STABLE_H_
