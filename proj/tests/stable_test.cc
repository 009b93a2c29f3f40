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


#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "kmedkit/oracle.h"
#include "kmedkit/stable.h"
#include "support/corpus.h"
#include "support/planted.h"

namespace kmedkit {
namespace {

using testing::BallsCoverExpensive;
using testing::BuildOracle;
using testing::Classify;
using testing::ExpensiveClusters;
using testing::PerturbedSolution;
using testing::Planted;
using testing::QSatisfiesRemoval;

const Rational kEps(1, 8);

bool IsSubset(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a) {
    if (std::find(b.begin(), b.end(), x) == b.end()) return false;
  }
  return true;
}

std::vector<int> Iota(int count) {
  std::vector<int> v(count);
  for (int t = 0; t < count; ++t) v[t] = t;
  return v;
}

TEST_CASE("local search finds the planted optimum") {
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    const StableInstance st = Planted(seed);
    const int k = static_cast<int>(st.planted.size());
    const LocalSearchResult r = local_search(st.instance, k);
    CHECK(r.cost == st.opt_k);
    CHECK(r.cost == cost(st.instance, r.S));
  }
}

TEST_CASE("local search ends at a local optimum") {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const MetricInstance inst = generate_random_instance(
        seed, 5 + static_cast<int>(seed % 4), 4 + static_cast<int>(seed % 4),
        20);
    const int k = 1 + static_cast<int>(seed % 3);
    const Rational opt = brute_force_kmedian(inst, k).value;
    LocalSearchOptions strict;
    const LocalSearchResult a = local_search(inst, k, strict);
    CHECK(static_cast<int>(a.S.size()) == k);
    CHECK(!find_improving_swap(inst, a.S, strict));
    CHECK(a.cost <= 5 * opt);
    LocalSearchOptions loose;
    loose.mode = LocalSearchOptions::Mode::kThreshold;
    const LocalSearchResult b = local_search(inst, k, loose);
    CHECK(!find_improving_swap(inst, b.S, loose));
    CHECK(b.cost <= cost(inst, Iota(k)));
  }
}

TEST_CASE("local search edge cases") {
  const MetricInstance inst = generate_random_instance(3, 6, 4, 20);
  const LocalSearchResult all = local_search(inst, 4);
  CHECK(all.S == Iota(4));
  CHECK(all.swaps == 0);
  LocalSearchOptions none;
  none.initial = {3, 1};
  none.max_swaps = 0;
  const LocalSearchResult kept = local_search(inst, 2, none);
  CHECK(kept.S == std::vector<int>{1, 3});
  CHECK(kept.cost == cost(inst, {1, 3}));
}

TEST_CASE("sample size") {
  CHECK(default_sample_size(16, Rational(1, 2)) == 1329);
  CHECK(default_sample_size(32, Rational(1, 2)) >
        default_sample_size(16, Rational(1, 2)));
  CHECK(default_sample_size(16, Rational(1, 8)) >
        default_sample_size(16, Rational(1, 2)));
}

TEST_CASE("d-sampling follows the cost distribution") {
  const MetricInstance inst = generate_random_instance(11, 6, 5, 30);
  const std::vector<int> S = {0, 1};
  const std::vector<ExtRational> d = nearest_distances(inst, S);
  double total = 0;
  for (const ExtRational& x : d) total += ToDouble(x.value());
  const uint64_t draws = 20000;
  const std::vector<int> W = d_sample(inst, S, draws, 5);
  REQUIRE(W.size() == draws);
  std::vector<double> count(inst.n, 0);
  for (int p : W) count[p] += 1;
  double chi = 0;
  int cells = 0;
  for (int p = 0; p < inst.n; ++p) {
    const double expected = draws * ToDouble(d[p].value()) / total;
    if (expected == 0) {
      CHECK(count[p] == 0);
      continue;
    }
    chi += (count[p] - expected) * (count[p] - expected) / expected;
    ++cells;
  }
  // 0.001 quantile bound for up to 5 degrees of freedom.
  CHECK(cells >= 2);
  CHECK(chi < 20.52);
  CHECK(d_sample(inst, S, 50, 5) == d_sample(inst, S, 50, 5));
}

TEST_CASE("d-sampling degenerate costs") {
  const StableInstance st = generate_stable_instance(2, 2, 3, 4);
  const std::vector<int> all = Iota(st.instance.m);
  // Only the clients of a closed cluster carry cost when a planted
  // facility is missing.
  const std::vector<int> S = {0};
  const std::vector<ExtRational> d = nearest_distances(st.instance, S);
  for (int p : d_sample(st.instance, S, 500, 9)) {
    CHECK(sgn(d[p].value()) > 0);
  }
  MetricInstance flat = MetricInstance::Zero(3, 2);
  CHECK(d_sample(flat, {0}, 10, 1).empty());
  // A single client with positive cost is the only draw.
  MetricInstance one = MetricInstance::Zero(3, 2);
  for (int p = 0; p < 5; ++p) {
    if (p != 2) one.Set(p, 2, 1);
  }
  REQUIRE(validate_metric(one).empty());
  for (int p : d_sample(one, {0}, 40, 3)) CHECK(p == 2);
  (void)all;
}

TEST_CASE("radius grid") {
  const auto range = radius_exponents(1, Rational(1, 2));
  REQUIRE(range);
  CHECK(range->first == -17);
  CHECK(range->second == 17);
  CHECK(!radius_exponents(0, Rational(1, 2)));
  CHECK(grid_radius(Rational(1, 2), 2) == Rational(81, 64));
  for (const Rational& sp : {Rational(1), Rational(7, 3), Rational(1000)}) {
    const auto r = radius_exponents(sp, Rational(1, 2));
    REQUIRE(r);
    const Rational e3(1, 8);
    CHECK(grid_radius(Rational(1, 2), r->first) >= e3 * sp);
    CHECK(grid_radius(Rational(1, 2), r->first - 1) < e3 * sp);
    CHECK(grid_radius(Rational(1, 2), r->second) <= sp / e3);
    CHECK(grid_radius(Rational(1, 2), r->second + 1) > sp / e3);
    const long count = r->second - r->first + 1;
    CHECK(count >= 34);
    CHECK(count <= 36);
  }
}

TEST_CASE("ball family sizes") {
  const MetricInstance inst = generate_random_instance(4, 5, 4, 10);
  std::vector<Rational> S_costs(inst.n, 1);
  BallGuessOptions grid;
  grid.mode = RadiusMode::kGrid;
  CHECK(leader_radii(inst, inst.m, 0, 1, Rational(1, 2), RadiusMode::kGrid)
            .size() == 35);
  const BallFamily one = ball_guesses(inst, {0}, S_costs, Rational(1, 2), grid);
  CHECK(one.sets.size() == 36);
  CHECK(one.total == 36);
  CHECK(one.sets.front().empty());
  const BallFamily none = ball_guesses(inst, {}, S_costs, Rational(1, 2), grid);
  REQUIRE(none.sets.size() == 1);
  CHECK(none.sets[0].empty());
  // Repeated samples count once.
  CHECK(ball_guesses(inst, {0, 0}, S_costs, Rational(1, 2), grid).sets.size() ==
        36);
  grid.cap = 100;
  CHECK_THROWS_AS(ball_guesses(inst, {0, 1}, S_costs, Rational(1, 2), grid),
                  CapExceeded);
  grid.truncate = true;
  const BallFamily cut =
      ball_guesses(inst, {0, 1}, S_costs, Rational(1, 2), grid);
  CHECK(cut.truncated);
  CHECK(cut.sets.size() == 100);
  CHECK(cut.total == 1 + 35 + 35 + 35 * 35);
  grid.cap = 1u << 16;
  grid.truncate = false;
  grid.max_balls = 1;
  CHECK(ball_guesses(inst, {0, 1}, S_costs, Rational(1, 2), grid).sets.size() ==
        71);
}

TEST_CASE("tight radii keep the facility sets of grid balls") {
  const Rational eps(1, 2);
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    const MetricInstance inst = generate_random_instance(seed, 4, 6, 40);
    for (int leader = 0; leader < inst.n; ++leader) {
      const Rational sp = inst.cf(leader, static_cast<int>(seed % 6)) + 1;
      auto facilities = [&](const Rational& r) {
        std::vector<int> out;
        for (int i = 0; i < inst.m; ++i) {
          if (inst.cf(leader, i) <= r) out.push_back(i);
        }
        return out;
      };
      std::set<std::vector<int>> grid_sets, tight_sets;
      const auto grid =
          leader_radii(inst, inst.m, leader, sp, eps, RadiusMode::kGrid);
      for (const Rational& r : grid) {
        if (!facilities(r).empty()) grid_sets.insert(facilities(r));
      }
      for (const Rational& r :
           leader_radii(inst, inst.m, leader, sp, eps, RadiusMode::kTight)) {
        CHECK(r <= grid.back());
        tight_sets.insert(facilities(r));
        // The radius is a facility distance, so no grid ball with the same
        // facilities is tighter.
        bool attained = false;
        for (int i = 0; i < inst.m; ++i) attained |= inst.cf(leader, i) == r;
        CHECK(attained);
      }
      CHECK(grid_sets == tight_sets);
    }
  }
}

TEST_CASE("dummy centers extend the metric") {
  const MetricInstance inst = generate_random_instance(8, 5, 4, 20);
  const std::vector<Ball> balls = {{1, Rational(5, 2)}, {3, 0}};
  const DummyExtension ext = make_dummy_centers(inst, balls);
  CHECK(validate_metric(ext.inst).empty());
  REQUIRE(ext.inst.m == inst.m + 2);
  CHECK(ext.lambda == std::vector<int>{4, 5});
  CHECK(ext.inst.cf(1, 4) == Rational(5, 2));
  CHECK(ext.inst.cf(3, 5) == 0);
  for (int p = 0; p < inst.n; ++p) {
    CHECK(ext.inst.cf(p, 5) == inst.d(3, p));
    CHECK(ext.inst.cf(p, 4) == Rational(5, 2) + inst.d(1, p));
  }
  for (int i = 0; i < inst.m; ++i) {
    CHECK(ext.inst.ff(i, 5) == inst.d(3, inst.facility_point(i)));
  }
  CHECK(ext.inst.ff(4, 5) == Rational(5, 2) + inst.d(1, 3));
}

TEST_CASE("expensive removal sets") {
  const MetricInstance inst = generate_random_instance(6, 8, 6, 30);
  const std::vector<int> S = {0, 2, 4, 5};
  const ExpRemResult zero = exp_rem(inst, S, {}, 0, kEps, 3, 64);
  CHECK(zero.iterations == std::min<uint64_t>(
                               64, default_exp_iterations(inst.n, 0, kEps)));
  std::set<std::vector<int>> seen;
  for (const auto& Q : zero.sets) {
    CHECK(Q.size() <= 1);
    CHECK(IsSubset(Q, S));
    CHECK(seen.insert(Q).second);
  }
  const ExpRemResult two = exp_rem(inst, S, {}, 2, kEps, 3, 200);
  CHECK(two.truncated);
  for (const auto& Q : two.sets) {
    CHECK(Q.size() <= 3);
    CHECK(IsSubset(Q, S));
    CHECK(std::is_sorted(Q.begin(), Q.end()));
    CHECK(std::adjacent_find(Q.begin(), Q.end()) == Q.end());
  }
  CHECK(exp_rem(inst, S, {}, 2, kEps, 3, 200).sets == two.sets);
  CHECK(default_exp_iterations(1, 0, kEps) == 1);
}

TEST_CASE("expensive removal skips zero-cost clusters") {
  const StableInstance st = generate_stable_instance(5, 3, 3, 4);
  // Decoys lose every tie to the planted facility, so their clusters are
  // empty while every planted facility is present.
  std::vector<int> S = st.planted;
  S.push_back(1);
  S.push_back(3);
  const auto costs = cluster_costs(st.instance, S, {});
  CHECK(costs.at(1) == 0);
  CHECK(costs.at(3) == 0);
  const ExpRemResult r = exp_rem(st.instance, S, {}, 0, kEps, 17, 300);
  CHECK(r.sets.size() >= 3);
  for (const auto& Q : r.sets) {
    CHECK(std::find(Q.begin(), Q.end(), 1) == Q.end());
    CHECK(std::find(Q.begin(), Q.end(), 3) == Q.end());
  }
}

TEST_CASE("cheap removal exhaustive branch") {
  const MetricInstance inst = generate_random_instance(2, 6, 6, 25);
  const std::vector<int> S = {0, 1, 2, 3, 4};
  const CheapRemResult r = cheap_rem(inst, S, {4}, {1, 0, 0}, {});
  CHECK(r.exhaustive);
  REQUIRE(r.entries.size() == 4);
  for (int t = 0; t < 4; ++t) {
    const CheapEntry& e = r.entries[t];
    REQUIRE(e.U_tilde == std::vector<int>{t});
    int closest = -1;
    for (int x = 0; x < 4; ++x) {
      if (x != t && (closest < 0 || inst.ff(t, x) < inst.ff(t, closest))) {
        closest = x;
      }
    }
    CHECK(e.next.at(t) == closest);
  }
  const CheapRemResult pairs = cheap_rem(inst, S, {4}, {2, 0, 0}, {});
  CHECK(pairs.entries.size() >= 1);
  std::set<std::vector<int>> us;
  for (const CheapEntry& e : pairs.entries) {
    us.insert(e.U_tilde);
    for (const auto& [c, nx] : e.next) {
      CHECK(std::find(e.U_tilde.begin(), e.U_tilde.end(), nx) ==
            e.U_tilde.end());
    }
  }
  CHECK(us.size() <= 6);
}

TEST_CASE("cheap removal with nothing to remove") {
  const MetricInstance inst = generate_random_instance(2, 6, 6, 25);
  const CheapRemResult r = cheap_rem(inst, {0, 1, 2}, {}, {0, 0, 0}, {});
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].U_tilde.empty());
  CHECK(r.entries[0].next.empty());
  CHECK_THROWS_AS(cheap_rem(inst, {0, 1, 2}, {1, 2}, {1, 1, 1}, {}),
                  std::invalid_argument);
}

TEST_CASE("cheap removal recursion bounds") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const MetricInstance inst = generate_random_instance(seed, 10, 14, 50);
    const std::vector<int> S = Iota(13);
    for (const RemovalSizes sizes :
         {RemovalSizes{1, 0, 0}, RemovalSizes{1, 1, 0}, RemovalSizes{1, 0, 1},
          RemovalSizes{2, 0, 0}, RemovalSizes{1, 1, 1}}) {
      const int ell = sizes.ell();
      const CheapRemResult r = cheap_rem(inst, S, {}, sizes, {});
      REQUIRE(!r.exhaustive);
      CHECK(r.max_depth <= 2 * ell);
      CHECK(r.calls <= std::lround(std::pow(4, 2 * ell)));
      for (const CheapEntry& e : r.entries) {
        CHECK(static_cast<int>(e.U_tilde.size()) == sizes.U);
        CHECK(IsSubset(e.U_tilde, S));
        for (const auto& [c, nx] : e.next) {
          CHECK(IsSubset({c}, e.U_tilde));
          CHECK(IsSubset({nx}, S));
          CHECK(nx != c);
        }
      }
    }
  }
}

TEST_CASE("R0 guesses") {
  const std::map<int, Rational> costs = {
      {2, 5}, {4, 1}, {7, 9}, {9, Rational(3, 2)}};
  const auto all = guess_R0(costs, Rational(1, 2), 10);
  CHECK(all.size() == 16);
  CHECK(all.front().empty());
  CHECK(all.back() == std::vector<int>{2, 4, 7, 9});
  const auto heavy = guess_R0(costs, 2, 10);
  CHECK(heavy == std::vector<std::vector<int>>{{}, {2}, {7}, {2, 7}});
  CHECK(guess_R0(costs, 2, 10, 1).size() == 3);
  CHECK(guess_R0(costs, 100, 10) == std::vector<std::vector<int>>{{}});
  CHECK_THROWS_AS(guess_R0(costs, 1, 2), CapExceeded);
  CHECK_THROWS_AS(guess_R0(costs, 0, 2), std::invalid_argument);
}

TEST_CASE("planted classification") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const StableInstance st = Planted(seed);
    const std::vector<int> S = PerturbedSolution(st, 0, 1);
    const auto cls = Classify(st.instance, st.planted, S, kEps);
    CHECK(cls.opt == st.opt_k);
    // Only the cluster whose planted facility was removed is expensive.
    CHECK(ExpensiveClusters(cls, std::nullopt) == std::vector<int>{1});
    for (const auto& cl : cls.clusters) CHECK(cl.avg == 1);
  }
}

TEST_CASE("sampled leaders yield a valid ball") {
  int hit = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const StableInstance st = Planted(seed);
    const std::vector<int> S = PerturbedSolution(st, 0, 1);
    const auto cls = Classify(st.instance, st.planted, S, kEps);
    std::vector<Rational> S_costs;
    for (const ExtRational& d : nearest_distances(st.instance, S)) {
      S_costs.push_back(d.value());
    }
    const std::vector<int> W = d_sample(st.instance, S, 6, seed);
    const std::vector<int> expensive = ExpensiveClusters(cls, W);
    for (RadiusMode mode : {RadiusMode::kTight, RadiusMode::kGrid}) {
      BallGuessOptions bo;
      bo.mode = mode;
      bo.max_balls = 1;
      const BallFamily family = ball_guesses(st.instance, W, S_costs, kEps, bo);
      bool valid = false;
      for (const auto& balls : family.sets) {
        valid = valid || BallsCoverExpensive(st.instance, cls, expensive,
                                             balls, kEps);
      }
      CHECK(valid);
    }
    hit += expensive.empty() ? 0 : 1;
  }
  // The closed cluster carries most of cost(S), so samples land in it.
  CHECK(hit >= 18);
}

TEST_CASE("expensive removal finds a good Q") {
  int good = 0;
  const int trials = 20;
  for (uint64_t seed = 1; seed <= trials; ++seed) {
    const StableInstance st = Planted(seed);
    const std::vector<int> S = PerturbedSolution(st, 0, 1);
    const auto oracle = BuildOracle(st.instance, st.planted, S, kEps);
    REQUIRE(oracle);
    const DummyExtension ext =
        make_dummy_centers(st.instance, oracle->guess.balls);
    const ExpRemResult r = exp_rem(ext.inst, S, ext.lambda,
                                   static_cast<int>(oracle->guess.balls.size()),
                                   kEps, seed, 64);
    bool found = false;
    for (const auto& Q : r.sets) {
      found = found || QSatisfiesRemoval(ext.inst, S, oracle->S0, Q,
                                         ext.lambda, kEps, oracle->cls.opt);
    }
    good += found ? 1 : 0;
  }
  CHECK(good >= trials * 9 / 10);
}

TEST_CASE("oracle guesses recover the optimum") {
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    const StableInstance st = Planted(seed);
    const int k = static_cast<int>(st.planted.size());
    const std::vector<int> S = PerturbedSolution(st, 0, 1);
    const auto oracle = BuildOracle(st.instance, st.planted, S, kEps);
    REQUIRE(oracle);
    StableOptions options;
    options.S = S;
    options.oracle = oracle->guess;
    const StableResult r = run_stable(st.instance, k, kEps, seed, options);
    CHECK(static_cast<int>(r.centers.size()) == k);
    CHECK(r.cost <= Rational(5, 2) * st.opt_k);
    CHECK(r.cost < r.S_cost);
    CHECK(r.winner.balls == oracle->guess.balls);
  }
}

TEST_CASE("capped search from a perturbed solution") {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    const StableInstance st = Planted(seed);
    const int k = static_cast<int>(st.planted.size());
    StableOptions options;
    options.S = PerturbedSolution(st, 0, 1);
    options.caps.max_balls = 1;
    const StableResult r = run_stable(st.instance, k, kEps, seed, options);
    CHECK(static_cast<int>(r.centers.size()) == k);
    CHECK(r.cost == cost(st.instance, r.centers));
    CHECK(r.cost <= 3 * st.opt_k);
  }
}

TEST_CASE("run_stable contract") {
  const MetricInstance inst = generate_random_instance(21, 8, 6, 30);
  const StableResult all = run_stable(inst, 6, kEps, 1);
  CHECK(all.centers == Iota(6));
  StableOptions options;
  options.caps.max_balls = 1;
  options.caps.restarts = 2;
  const StableResult a = run_stable(inst, 3, kEps, 7, options);
  CHECK(a.centers.size() == 3);
  CHECK(a.cost <= a.S_cost);
  CHECK(a.cost == cost(inst, a.centers));
  CHECK(a.candidates > 1);
  const StableResult b = run_stable(inst, 3, kEps, 7, options);
  CHECK(b.centers == a.centers);
  CHECK(b.cost == a.cost);
  CHECK(b.candidates == a.candidates);
  CHECK(b.winner.Q == a.winner.Q);
  CHECK(b.winner.balls == a.winner.balls);
  CHECK(b.winner_restart == a.winner_restart);
  options.caps.threads = 4;
  const StableResult c = run_stable(inst, 3, kEps, 7, options);
  CHECK(c.centers == a.centers);
  CHECK(c.candidates == a.candidates);
  CHECK(c.winner.X == a.winner.X);
  CHECK(c.winner.R0 == a.winner.R0);
  CHECK_THROWS_AS(run_stable(inst, 0, kEps, 1), std::invalid_argument);
  StableOptions wrong;
  wrong.S = std::vector<int>{0, 1};
  CHECK_THROWS_AS(run_stable(inst, 3, kEps, 1, wrong), std::invalid_argument);
  wrong.S = std::vector<int>{0, 1, 2};
  wrong.oracle = InjectedGuess{{0}, {{0, 1000}}, {}, {0, 0, 0}, std::nullopt};
  CHECK_THROWS_AS(run_stable(inst, 3, kEps, 1, wrong), std::invalid_argument);
}

TEST_CASE("padding") {
  CHECK(pad_to_k({4, 1}, 4, 6) == std::vector<int>{0, 1, 2, 4});
  CHECK(pad_to_k({3, 3}, 2, 6) == std::vector<int>{0, 3});
  CHECK(pad_to_k({0, 1, 2}, 3, 6) == std::vector<int>{0, 1, 2});
}

TEST_CASE("run_main returns k centers") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const MetricInstance inst = generate_random_instance(
        seed, 6 + static_cast<int>(seed % 3), 5, 30);
    const int k = 1 + static_cast<int>(seed % 3);
    StableOptions options;
    options.caps.max_balls = 1;
    const MainResult r = run_main(inst, k, kEps, seed, options);
    const std::set<int> distinct(r.centers.begin(), r.centers.end());
    CHECK(static_cast<int>(r.centers.size()) == k);
    CHECK(static_cast<int>(distinct.size()) == k);
    CHECK(r.cost == cost(inst, r.centers));
    CHECK(r.cost <= Rational(5, 2) * brute_force_kmedian(inst, k).value);
    CHECK(r.k_prime + r.surplus <= k);
    Rational best = r.pseudo_cost ? *r.pseudo_cost : r.cost;
    for (const auto& [kk, c] : r.stable_costs) {
      CHECK(kk > r.k_prime);
      CHECK(kk <= k);
      best = std::min(best, c);
    }
    CHECK(r.cost == best);
  }
}

TEST_CASE("run_main runs the stable branch after a surplus") {
  int stable_wins = 0;
  for (int c = 3; c <= 5; ++c) {
    for (int k = 2; k < c; ++k) {
      const MetricInstance inst = testing::MakeHubInstance(c, 2, 8, 3);
      StableOptions options;
      options.caps.max_balls = 1;
      const MainResult r = run_main(inst, k, kEps, 1, options);
      CHECK(static_cast<int>(r.centers.size()) == k);
      CHECK(r.k_prime < k);
      CHECK_FALSE(r.stable_costs.empty());
      CHECK(r.cost == brute_force_kmedian(inst, k).value);
      stable_wins += r.source == "stable" ? 1 : 0;
    }
  }
  CHECK(stable_wins >= 1);
}

}  // namespace
}  // namespace kmedkit
