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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kmedkit/greedy.h"
#include "kmedkit/log_adaptive.h"
#include "kmedkit/lp.h"
#include "kmedkit/merge.h"
#include "kmedkit/metric.h"
#include "kmedkit/oracle.h"
#include "kmedkit/random.h"
#include "kmedkit/rational.h"
#include "kmedkit/stable.h"
#include "kmedkit/submodular.h"
#include "report.h"
#include "support/corpus.h"
#include "support/planted.h"
#include "support/submodular_cases.h"
#include "support/vertex_oracle.h"

namespace kmedkit {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages and a pass flag.
class Failures {
 public:
  void Add(const std::string& what) {
    if (count_++ < 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    return std::to_string(count_) + " failures (" + first_ + ")";
  }

 private:
  int count_ = 0;
  std::string first_;
};

std::string Seed(uint64_t seed) { return "seed " + std::to_string(seed); }

Outcome GreedyCriterion() {
  const Rational eps(1, 8);
  Failures fail;
  int opened = 0;
  for (const testing::CorpusEntry& e : testing::MakeCorpus(200, eps)) {
    const GreedyOutcome r = run_greedy(e.inst, e.f);
    const Rational fhat = 2 * e.f;
    const long size = static_cast<long>(r.S_star.size());
    opened += static_cast<int>(size);
    if (payment_gap(e.inst, fhat, r.S_star, r.alpha_star) != 0) {
      fail.Add(Seed(e.seed) + " payment identity");
    }
    if (max_dual_load(e.inst, r.alpha_star) > fhat) {
      fail.Add(Seed(e.seed) + " dual load");
    }
    const Rational ufl = brute_force_ufl(e.inst, e.f).value;
    if (cost(e.inst, r.S_star) > 2 * (ufl - e.f * size)) {
      fail.Add(Seed(e.seed) + " LMP bound");
    }
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, "200 instances, " + std::to_string(opened) +
                    " facilities opened"};
}

Outcome LogAdaptiveCriterion() {
  Failures fail;
  int longest = 0;
  for (const Rational& eps : {Rational(1, 8), Rational(1, 10)}) {
    for (const testing::CorpusEntry& e : testing::MakeCorpus(200, eps)) {
      const std::string tag = FormatRational(eps) + " " + Seed(e.seed);
      const LogAdaptiveResult r = run_log_adaptive(e.inst, e.f, eps);
      const Rational ufl = brute_force_ufl(e.inst, e.f).value;
      const long size = static_cast<long>(r.S_star.size());
      if (cost(e.inst, r.S_star) > 2 / (1 - 3 * eps) * (ufl - e.f * size)) {
        fail.Add(tag + " cost bound");
      }
      TraceAuditOptions options;
      options.ufl_value = ufl;
      options.phase_budget = static_cast<int>(
          phase_schedule(max_pairwise_distance(e.inst), eps).size());
      const ParamSet params = ParamSet::Make(e.f, eps, Rational(0));
      const AuditReport audit =
          audit_trace(e.inst, params, r.trace, Rational(0), options);
      if (!audit.ok()) fail.Add(tag + " " + audit.failures.front());
      longest = std::max(longest, r.trace.L);
    }
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, "400 runs, longest trace L = " + std::to_string(longest)};
}

Outcome MergeCriterion() {
  const Rational eps(1, 8);
  Failures fail;
  int with_free = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const testing::CorpusEntry e = testing::MakeCorpusEntry(seed, eps);
    const int k = std::min(2 + static_cast<int>(seed % 3), e.inst.m);
    const PseudoSolution ps = run_pseudo_approx(e.inst, k, eps);
    if (ps.k_regular != k) fail.Add(Seed(seed) + " regular count");
    for (const PhaseSequence& seq : ps.trace.phases) {
      if (seq.free_count() > 3) fail.Add(Seed(seed) + " free per phase");
    }
    with_free += ps.free_count > 0 ? 1 : 0;
    const Rational opt = brute_force_kmedian(e.inst, k).value;
    const Rational bound =
        2 / (1 - 3 * eps) * (opt + ps.eta * e.inst.n * k);
    if (ps.cost > bound) fail.Add(Seed(seed) + " cost bound");
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, "100 instances, " + std::to_string(with_free) +
                    " with free copies"};
}

Outcome LpCriterion() {
  Rng rng(2024);
  Failures fail;
  int feasible = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const testing::IntSystem s = testing::RandomIntSystem(rng);
    const LinearSystem sys = s.ToLinear();
    const auto w = solve_feasibility(sys);
    const std::string tag = "system " + std::to_string(trial);
    if (w.has_value() != testing::VertexFeasible(s)) fail.Add(tag + " verdict");
    if (w) {
      ++feasible;
      if (!sys.Satisfies(*w)) fail.Add(tag + " witness");
    }
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, "500 systems, " + std::to_string(feasible) + " feasible"};
}

Outcome SubmodularCriterion() {
  Failures fail;
  long triples = 0;
  int brute = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const testing::SubmodularCase sc = testing::MakeSubmodularCase(seed);
    const auto f = [&](const std::vector<int>& S) {
      return eval_f(sc.ctx, facilities_of(sc.matroid, S));
    };
    const int size = static_cast<int>(sc.matroid.ground.size());
    const std::vector<int> all = testing::Range(size);
    Rng rng(seed + 99);
    for (int trial = 0; trial < 64; ++trial) {
      const std::vector<int> F =
          facilities_of(sc.matroid, testing::RandomSubset(&rng, all));
      if (eval_g(sc.ctx, F).value != testing::ExhaustiveG(sc.ctx, F)) {
        fail.Add(Seed(seed) + " g differs from enumeration");
      }
    }
    for (int trial = 0; size > 0 && trial < 10000;) {
      const std::vector<int> Y = testing::RandomSubset(&rng, all);
      if (static_cast<int>(Y.size()) == size) continue;
      const std::vector<int> X = testing::RandomSubset(&rng, Y);
      int e = static_cast<int>(rng.Below(size));
      while (std::find(Y.begin(), Y.end(), e) != Y.end()) e = (e + 1) % size;
      std::vector<int> Xe = X, Ye = Y;
      Xe.push_back(e);
      Ye.push_back(e);
      const Rational fX = f(X), fY = f(Y);
      if (fX > fY || fX < 0) fail.Add(Seed(seed) + " monotonicity");
      if (f(Xe) - fX < f(Ye) - fY) fail.Add(Seed(seed) + " submodularity");
      ++trial;
      ++triples;
    }
    if (size > 16) continue;
    ++brute;
    const MaximizeResult best = maximize_f(sc.ctx, sc.matroid);
    Rational optimum = 0;
    for (const std::vector<int>& X : testing::IndependentSets(sc.matroid)) {
      optimum = std::max(optimum, f(X));
    }
    if (2 * best.value < optimum) fail.Add(Seed(seed) + " half optimum");
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, "100 contexts, " + std::to_string(triples) + " triples, " +
                    std::to_string(brute) + " brute-force optima"};
}

Outcome StableCriterion() {
  const Rational eps(1, 8);
  Failures fail;
  int oracle_ok = 0, search_ok = 0, guess_wins = 0;
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const StableInstance st = testing::Planted(seed);
    const int k = static_cast<int>(st.planted.size());
    const std::vector<int> S = testing::PerturbedSolution(st, 0, 1);
    const auto oracle = testing::BuildOracle(st.instance, st.planted, S, eps);
    if (!oracle) {
      fail.Add(Seed(seed) + " no oracle guess");
      continue;
    }
    StableOptions injected;
    injected.S = S;
    injected.oracle = oracle->guess;
    const StableResult r = run_stable(st.instance, k, eps, seed, injected);
    if (r.cost <= Rational(5, 2) * st.opt_k) {
      ++oracle_ok;
    } else {
      fail.Add(Seed(seed) + " oracle mode " +
               FormatRational(r.cost / st.opt_k));
    }
    StableOptions search;
    search.caps.restarts = 20;
    const StableResult s = run_stable(st.instance, k, eps, seed, search);
    search_ok += s.cost <= 3 * st.opt_k ? 1 : 0;
    guess_wins += s.winner.balls.empty() ? 0 : 1;
  }
  std::ostringstream detail;
  detail << "oracle mode " << oracle_ok << "/30 within 5/2, capped search "
         << search_ok << "/30 within 3, guess won " << guess_wins << "/30";
  if (search_ok * 10 < 30 * 9) fail.Add("capped search below 90%");
  if (!fail.ok()) return {false, fail.Summary() + "; " + detail.str()};
  return {true, detail.str()};
}

struct MixedCase {
  std::string name;
  MetricInstance inst;
  int k = 0;
};

// Seven random metrics with 6 to 12 clients, seven planted instances with at
// most 12 clients and six hub instances whose pseudo-solutions carry free
// copies.
std::vector<MixedCase> MixedCorpus() {
  std::vector<MixedCase> out;
  for (uint64_t seed = 1; seed <= 7; ++seed) {
    const int n = 6 + static_cast<int>(seed % 7);
    const int m = 5 + static_cast<int>(seed % 3);
    out.push_back({"random-" + std::to_string(seed),
                   generate_random_instance(seed, n, m, 30),
                   1 + static_cast<int>(seed % 3)});
  }
  for (uint64_t seed = 1; seed <= 7; ++seed) {
    const int k = 2 + static_cast<int>(seed % 2);
    const int size = 3 + static_cast<int>(seed / 2 % 2);
    StableInstance st = generate_stable_instance(seed, k, size, 4);
    out.push_back({"planted-" + std::to_string(seed), std::move(st.instance),
                   k});
  }
  for (int c = 3; c <= 5; ++c) {
    for (int k = 2; k < c; ++k) {
      out.push_back({"hub-" + std::to_string(c) + "-" + std::to_string(k),
                     testing::MakeHubInstance(c, 2, 8, 3), k});
    }
  }
  return out;
}

Outcome MainCriterion() {
  const Rational eps(1, 8);
  Failures fail;
  double worst = 0;
  int stable_wins = 0;
  for (const MixedCase& c : MixedCorpus()) {
    const MainResult r = run_main(c.inst, c.k, eps, 1);
    const Rational opt = brute_force_kmedian(c.inst, c.k).value;
    const std::set<int> distinct(r.centers.begin(), r.centers.end());
    const double ratio = ToDouble(r.cost / opt);
    worst = std::max(worst, ratio);
    std::printf("  %s n=%d k=%d ratio %.4f source %s k'=%d\n",
                c.name.c_str(), c.inst.n, c.k, ratio, r.source.c_str(),
                r.k_prime);
    if (static_cast<int>(distinct.size()) != c.k ||
        r.centers.size() != distinct.size()) {
      fail.Add(c.name + " center count");
    }
    if (r.cost != cost(c.inst, r.centers)) fail.Add(c.name + " cost");
    if (r.cost > Rational(5, 2) * opt) fail.Add(c.name + " ratio");
    stable_wins += r.source == "stable" ? 1 : 0;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "20 instances, worst ratio %.4f, stable branch won %d",
                worst, stable_wins);
  if (!fail.ok()) return {false, fail.Summary() + "; " + detail};
  return {true, detail};
}

Outcome DeterminismCriterion() {
  using cli::Algorithm;
  Failures fail;
  const StableInstance st = generate_stable_instance(3, 2, 3, 4);
  const testing::CorpusEntry e = testing::MakeCorpusEntry(5, Rational(1, 8));
  int compared = 0;
  for (Algorithm alg : {Algorithm::kGreedy, Algorithm::kLogAdaptive,
                        Algorithm::kMerge, Algorithm::kStable,
                        Algorithm::kMain}) {
    const bool kmedian = alg == Algorithm::kMerge ||
                         alg == Algorithm::kStable || alg == Algorithm::kMain;
    for (const MetricInstance* inst : {&st.instance, &e.inst}) {
      cli::RunConfig config;
      config.algorithm = alg;
      config.seed = 7;
      if (kmedian) {
        config.k = 2;
      } else {
        config.f = Rational(2);
      }
      const std::string first = cli::Solve(*inst, config).report;
      const std::string second = cli::Solve(*inst, config).report;
      config.caps.threads = 4;
      const std::string parallel = cli::Solve(*inst, config).report;
      const std::string name = cli::AlgorithmName(alg);
      if (first != second) fail.Add(name + " differs between runs");
      if (first != parallel) fail.Add(name + " differs with 4 threads");
      ++compared;
    }
  }
  if (!fail.ok()) return {false, fail.Summary()};
  return {true, std::to_string(compared) +
                    " (algorithm, instance) pairs byte-identical"};
}

}  // namespace
}  // namespace kmedkit

int main() {
  const std::vector<std::function<kmedkit::Outcome()>> criteria = {
      kmedkit::GreedyCriterion,     kmedkit::LogAdaptiveCriterion,
      kmedkit::MergeCriterion,      kmedkit::LpCriterion,
      kmedkit::SubmodularCriterion, kmedkit::StableCriterion,
      kmedkit::MainCriterion,       kmedkit::DeterminismCriterion};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    kmedkit::Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const std::chrono::duration<double> wall =
        std::chrono::steady_clock::now() - start;
    std::printf("criterion %zu: %s: %s (%.1f s)\n", i + 1,
                out.pass ? "PASS" : "FAIL", out.detail.c_str(), wall.count());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
