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


// Run configuration, report construction with re-audits, report
// verification and the benchmark table shared by the CLI and the acceptance
// suite.

#ifndef KMEDKIT_TOOLS_REPORT_H_
#define KMEDKIT_TOOLS_REPORT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kmedkit/metric.h"
#include "kmedkit/rational.h"
#include "kmedkit/stable.h"

namespace kmedkit {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;
inline constexpr int kExitAudit = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { kGreedy, kLogAdaptive, kMerge, kStable, kMain };

Algorithm ParseAlgorithm(const std::string& name);
std::string AlgorithmName(Algorithm alg);

struct RunConfig {
  Algorithm algorithm = Algorithm::kGreedy;
  std::optional<int> k;
  std::optional<Rational> f;
  Rational epsilon = Rational(1, 8);
  uint64_t seed = 1;
  StableCaps caps;
  // Adds wall time; reports are then no longer reproducible byte for byte.
  bool timing = false;

  // Throws UsageError when an algorithm-specific field is missing or out of
  // range for inst.
  void Validate(const MetricInstance& inst) const;
};

struct Verdict {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunOutcome {
  // Canonical JSON.
  std::string report;
  std::vector<Verdict> audits;
  bool partial = false;

  bool audits_pass() const;
  int exit_code() const;
};

RunOutcome Solve(const MetricInstance& inst, const RunConfig& config);

// Replays the checks a report claims: cost recomputation, cardinality,
// dual feasibility of reported alpha and trace audits.
std::vector<Verdict> Verify(const MetricInstance& inst,
                            const std::string& report);

std::string VerdictsToJson(const std::vector<Verdict>& verdicts);

// Caps from environment variables, then the caps file, in that order of
// increasing precedence. getenv is injectable for tests.
StableCaps LoadCaps(const std::optional<std::string>& file_text,
                    const std::function<const char*(const char*)>& getenv);

// Canonical JSON of an OracleResult for k-median (k set) or UFL.
std::string OracleJson(const MetricInstance& inst, std::optional<int> k,
                       std::optional<Rational> f);

struct BenchRow {
  std::string instance;
  std::string algorithm;
  std::string param;
  Rational cost;
  std::optional<Rational> opt;
  int opened = 0;
  int free_count = 0;
  int phases = 0;
  double wall_ms = 0;
};

struct NamedInstance {
  std::string name;
  MetricInstance inst;
};

// One row per (instance, algorithm), in corpus order then algorithm order.
std::vector<BenchRow> Bench(const std::vector<NamedInstance>& corpus,
                            const std::vector<Algorithm>& algorithms,
                            const RunConfig& base);
std::string BenchCsv(const std::vector<BenchRow>& rows);
std::string BenchJson(const std::vector<BenchRow>& rows);

}  // namespace cli
}  // namespace kmedkit

#endif  // KMEDKIT_TOOLS_REPORT_H_
