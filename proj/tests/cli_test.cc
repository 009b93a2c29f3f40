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


#include <map>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "kmedkit/io.h"
#include "kmedkit/oracle.h"
#include "report.h"

namespace kmedkit {
namespace cli {
namespace {

using Json = nlohmann::json;

RunConfig Config(Algorithm alg) {
  RunConfig c;
  c.algorithm = alg;
  return c;
}

TEST_CASE("greedy report on a single pair") {
  MetricInstance inst = MetricInstance::Zero(1, 1);
  inst.Set(0, 1, 3);
  RunConfig c = Config(Algorithm::kGreedy);
  c.f = Rational(2);
  const RunOutcome r = Solve(inst, c);
  CHECK(r.exit_code() == kExitOk);
  const Json report = Json::parse(r.report);
  CHECK(report["solution"] == Json::array({0}));
  CHECK(report["cost"] == "3/1");
  // The client alone pays fhat = 4 on top of distance 3.
  CHECK(report["alpha"] == Json::array({"7/1"}));
  CHECK(report["certificate"]["payment_gap"] == "0/1");
  for (const Verdict& v : Verify(inst, r.report)) CHECK(v.pass);
}

TEST_CASE("every algorithm passes its audits") {
  const MetricInstance inst = generate_random_instance(5, 7, 5, 10);
  for (Algorithm alg : {Algorithm::kGreedy, Algorithm::kLogAdaptive,
                        Algorithm::kMerge, Algorithm::kStable,
                        Algorithm::kMain}) {
    RunConfig c = Config(alg);
    c.k = 2;
    c.f = Rational(3);
    c.caps.max_balls = 1;
    const RunOutcome r = Solve(inst, c);
    CAPTURE(AlgorithmName(alg));
    CHECK(r.audits_pass());
    CHECK(r.exit_code() != kExitAudit);
    const std::vector<Verdict> v = Verify(inst, r.report);
    CHECK(!v.empty());
    for (const Verdict& x : v) {
      CAPTURE(x.name);
      CHECK(x.pass);
    }
  }
}

TEST_CASE("tampered reports fail verification") {
  const MetricInstance inst = generate_random_instance(6, 6, 4, 10);
  RunConfig c = Config(Algorithm::kGreedy);
  c.f = Rational(2);
  Json report = Json::parse(Solve(inst, c).report);
  Json alpha = report;
  alpha["alpha"][0] = "1000/1";
  bool dual_failed = false;
  for (const Verdict& v : Verify(inst, alpha.dump())) {
    if (v.name == "dual_feasibility") dual_failed = !v.pass;
  }
  CHECK(dual_failed);
  Json cost = report;
  cost["cost"] = "1/1";
  CHECK(!Verify(inst, cost.dump()).front().pass);

  RunConfig la = Config(Algorithm::kLogAdaptive);
  la.f = Rational(2);
  Json traced = Json::parse(Solve(inst, la).report);
  traced["alpha"][1] = "0/1";
  bool replay_failed = false;
  for (const Verdict& v : Verify(inst, traced.dump())) {
    if (v.name == "alpha_matches_trace") replay_failed = !v.pass;
  }
  CHECK(replay_failed);
  CHECK_THROWS_AS(Verify(inst, "not json"), UsageError);
}

TEST_CASE("reports are reproducible") {
  const StableInstance st = generate_stable_instance(4, 3, 3, 4);
  RunConfig c = Config(Algorithm::kMain);
  c.k = 3;
  c.caps.max_balls = 1;
  const std::string a = Solve(st.instance, c).report;
  CHECK(Solve(st.instance, c).report == a);
  c.caps.threads = 3;
  CHECK(Solve(st.instance, c).report == a);
  const Json report = Json::parse(a);
  CHECK(report["solution"].size() == 3);
  CHECK(!report.contains("timing"));
  c.timing = true;
  CHECK(Json::parse(Solve(st.instance, c).report).contains("timing"));
}

TEST_CASE("config validation") {
  const MetricInstance inst = generate_random_instance(1, 4, 3, 10);
  CHECK_THROWS_AS(ParseAlgorithm("simplex"), UsageError);
  CHECK(ParseAlgorithm("log-adaptive") == Algorithm::kLogAdaptive);
  CHECK_THROWS_AS(Solve(inst, Config(Algorithm::kMerge)), UsageError);
  CHECK_THROWS_AS(Solve(inst, Config(Algorithm::kGreedy)), UsageError);
  RunConfig c = Config(Algorithm::kStable);
  c.k = 4;
  CHECK_THROWS_AS(Solve(inst, c), UsageError);
  c = Config(Algorithm::kMerge);
  c.k = 2;
  c.epsilon = Rational(1, 5);
  CHECK_THROWS_AS(Solve(inst, c), UsageError);
}

TEST_CASE("caps precedence") {
  std::map<std::string, std::string> env = {{"KMEDKIT_RESTARTS", "5"},
                                            {"KMEDKIT_MAX_BALLS", "3"}};
  auto getenv = [&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  StableCaps caps = LoadCaps(std::nullopt, getenv);
  CHECK(caps.restarts == 5);
  CHECK(caps.max_balls == 3);
  caps = LoadCaps(std::string("{\"restarts\": 9}"), getenv);
  CHECK(caps.restarts == 9);
  CHECK(caps.max_balls == 3);
  env["KMEDKIT_R0_CAP"] = "many";
  CHECK_THROWS_AS(LoadCaps(std::nullopt, getenv), UsageError);
  env.erase("KMEDKIT_R0_CAP");
  CHECK_THROWS_AS(LoadCaps(std::string("{\"nope\": 1}"), getenv), UsageError);
}

TEST_CASE("oracle output") {
  const MetricInstance inst = generate_random_instance(2, 5, 4, 10);
  const Json km = Json::parse(OracleJson(inst, 2, std::nullopt));
  CHECK(km["value"] == FormatRational(brute_force_kmedian(inst, 2).value));
  const Json ufl = Json::parse(OracleJson(inst, std::nullopt, Rational(1)));
  CHECK(ufl["problem"] == "ufl");
  CHECK_THROWS_AS(OracleJson(inst, std::nullopt, std::nullopt), UsageError);
}

TEST_CASE("bench rows") {
  std::vector<NamedInstance> corpus;
  for (int s = 1; s <= 20; ++s) {
    corpus.push_back({"r" + std::to_string(s),
                      generate_random_instance(s, 6, 5, 10)});
  }
  RunConfig base;
  base.k = 2;
  base.f = Rational(2);
  base.caps.max_balls = 1;
  const std::vector<Algorithm> algs = {Algorithm::kGreedy, Algorithm::kMerge};
  const std::vector<BenchRow> rows = Bench(corpus, algs, base);
  REQUIRE(rows.size() == 40);
  // 2 / (1 - 3 eps) at eps = 1/8, plus the eta slack.
  const Rational factor(16, 5);
  for (const BenchRow& r : rows) {
    if (r.algorithm != "merge") continue;
    REQUIRE(r.opt);
    CHECK(r.cost <= factor * (*r.opt + Rational(1, 1000)));
  }
  CHECK(Bench({}, algs, base).empty());
  const std::string csv = BenchCsv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
  CHECK(Json::parse(BenchJson(rows)).size() == 40);
}

}  // namespace
}  // namespace cli
}  // namespace kmedkit
