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


#include <string>

#include "doctest.h"
#include "kmedkit/io.h"
#include "kmedkit/log_adaptive.h"
#include "kmedkit/merge.h"
#include "support/corpus.h"

namespace kmedkit {
namespace {

TEST_CASE("instance round trip") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    MetricInstance inst = generate_random_instance(seed, 5, 4, 10);
    inst.Set(0, 6, Rational(7, 3));
    metric_closure(&inst);
    const std::string text = instance_to_json(inst);
    const MetricInstance back = instance_from_json(text);
    CHECK(back.n == inst.n);
    CHECK(back.m == inst.m);
    CHECK(back.dist == inst.dist);
    CHECK(back.label == inst.label);
    CHECK(instance_to_json(back) == text);
  }
}

TEST_CASE("instance parse errors") {
  CHECK_THROWS_AS(instance_from_json("{"), ParseError);
  CHECK_THROWS_AS(instance_from_json("{\"n\": 1}"), ParseError);
  CHECK_THROWS_AS(
      instance_from_json("{\"n\": 1, \"m\": 1, \"dist\": [[\"0\"]]}"),
      ParseError);
  CHECK_THROWS_AS(instance_from_json("{\"n\": 1, \"m\": 1, \"dist\": "
                                     "[[\"0\", 1], [\"1\", \"0\"]]}"),
                  ParseError);
  CHECK_THROWS_AS(instance_from_json("{\"n\": 1, \"m\": 1, \"dist\": "
                                     "[[\"0\", \"x\"], [\"1\", \"0\"]]}"),
                  ParseError);
  const MetricInstance ok = instance_from_json(
      "{\"n\": 1, \"m\": 1, \"dist\": [[\"0\", \"3/2\"], [\"3/2\", \"0\"]]}");
  CHECK(ok.cf(0, 0) == Rational(3, 2));
}

TEST_CASE("trace round trip") {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const testing::CorpusEntry e =
        testing::MakeCorpusEntry(seed, Rational(1, 8));
    const LogAdaptiveResult r = run_log_adaptive(e.inst, e.f, Rational(1, 8));
    const std::string text = trace_to_json(r.trace);
    const ExecutionTrace back = trace_from_json(text);
    CHECK(back.params == r.trace.params);
    CHECK(back.L == r.trace.L);
    CHECK(trace_to_json(back) == text);
    CHECK(audit_trace(e.inst, back.params, back, Rational(0)).ok());
  }
}

TEST_CASE("trace with free copies round trips") {
  const testing::CorpusEntry e = testing::MakeCorpusEntry(3, Rational(1, 8));
  const PseudoSolution ps = run_pseudo_approx(e.inst, 2, Rational(1, 8));
  const std::string text = trace_to_json(ps.trace);
  const ExecutionTrace back = trace_from_json(text);
  CHECK(back.params == ps.trace.params);
  CHECK(back.opened() == ps.trace.opened());
  CHECK(trace_to_json(back) == text);
}

TEST_CASE("caps") {
  StableCaps caps;
  caps.restarts = 7;
  caps.radius_mode = RadiusMode::kGrid;
  const StableCaps back = caps_from_json(caps_to_json(caps));
  CHECK(back.restarts == 7);
  CHECK(back.radius_mode == RadiusMode::kGrid);
  CHECK(caps_to_json(back) == caps_to_json(caps));
  const StableCaps partial = caps_from_json("{\"max_balls\": 1}", caps);
  CHECK(partial.max_balls == 1);
  CHECK(partial.restarts == 7);
  CHECK_THROWS_AS(caps_from_json("{\"bogus\": 1}"), ParseError);
  CHECK_THROWS_AS(caps_from_json("{\"restarts\": \"x\"}"), ParseError);
  CHECK_THROWS_AS(caps_from_json("{\"radius_mode\": \"wide\"}"), ParseError);
  CHECK_THROWS_AS(caps_from_json("[]"), ParseError);
}

}  // namespace
}  // namespace kmedkit
