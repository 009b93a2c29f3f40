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


// kmedkit command-line driver: gen | solve | verify | bench | oracle.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kmedkit/io.h"
#include "kmedkit/metric.h"
#include "kmedkit/rational.h"
#include "report.h"

namespace kmedkit {
namespace cli {
namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void Emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

MetricInstance LoadInstance(const std::string& path) {
  MetricInstance inst = instance_from_json(ReadFile(path));
  const std::vector<std::string> problems = validate_metric(inst);
  if (!problems.empty()) {
    throw UsageError(path + " is not a metric: " + problems.front());
  }
  return inst;
}

Rational ParseRationalFlag(const std::string& name, const std::string& text) {
  try {
    return ParseRational(text);
  } catch (const std::exception&) {
    throw UsageError(name + " must be a rational such as 3/2");
  }
}

std::vector<Algorithm> ParseAlgorithms(const std::string& list) {
  std::vector<Algorithm> out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (!name.empty()) out.push_back(ParseAlgorithm(name));
  }
  if (out.empty()) throw UsageError("--algs is empty");
  return out;
}

struct GenArgs {
  std::string kind;
  int n = 8;
  int m = 6;
  int coord_range = 10;
  int k = 3;
  int cluster_size = 3;
  int separation = 4;
  uint64_t seed = 1;
  std::string output;
};

int RunGen(const GenArgs& a) {
  if (a.kind == "random") {
    if (a.n < 1 || a.m < 1 || a.coord_range < 1) {
      throw UsageError("gen random requires n, m, coord-range >= 1");
    }
    MetricInstance inst =
        generate_random_instance(a.seed, a.n, a.m, a.coord_range);
    Emit(instance_to_json(inst), a.output);
    return kExitOk;
  }
  if (a.kind == "stable") {
    if (a.k < 1 || a.cluster_size < 1 || a.separation < 4) {
      throw UsageError(
          "gen stable requires k, cluster-size >= 1 and separation >= 4");
    }
    const StableInstance st =
        generate_stable_instance(a.seed, a.k, a.cluster_size, a.separation);
    Emit(instance_to_json(st.instance), a.output);
    std::ostringstream summary;
    summary << "{\"planted\": [";
    for (size_t t = 0; t < st.planted.size(); ++t) {
      summary << (t ? ", " : "") << st.planted[t];
    }
    summary << "], \"opt_k\": \"" << FormatRational(st.opt_k)
            << "\", \"opt_k_minus_1\": \"" << FormatRational(st.opt_k_minus_1)
            << "\", \"beta\": \"" << FormatRational(st.beta) << "\"}\n";
    (a.output.empty() || a.output == "-" ? std::cerr : std::cout)
        << summary.str();
    return kExitOk;
  }
  throw UsageError("gen kind must be random or stable");
}

struct SolveArgs {
  std::string instance;
  std::string algorithm;
  std::optional<int> k;
  std::optional<std::string> f;
  std::string epsilon = "1/8";
  uint64_t seed = 1;
  std::optional<std::string> caps_file;
  std::optional<int> restarts;
  std::optional<int> threads;
  std::optional<int> max_balls;
  std::optional<uint64_t> sample_cap;
  bool timing = false;
  std::string output;
};

RunConfig MakeConfig(const SolveArgs& a) {
  RunConfig config;
  config.algorithm = ParseAlgorithm(a.algorithm);
  config.k = a.k;
  if (a.f) config.f = ParseRationalFlag("--f", *a.f);
  config.epsilon = ParseRationalFlag("--eps", a.epsilon);
  config.seed = a.seed;
  std::optional<std::string> caps_text;
  if (a.caps_file) caps_text = ReadFile(*a.caps_file);
  config.caps =
      LoadCaps(caps_text, [](const char* v) { return std::getenv(v); });
  if (a.restarts) config.caps.restarts = *a.restarts;
  if (a.threads) config.caps.threads = *a.threads;
  if (a.max_balls) config.caps.max_balls = *a.max_balls;
  if (a.sample_cap) config.caps.sample_cap = *a.sample_cap;
  config.timing = a.timing;
  return config;
}

int RunSolve(const SolveArgs& a) {
  const MetricInstance inst = LoadInstance(a.instance);
  const RunOutcome out = Solve(inst, MakeConfig(a));
  Emit(out.report, a.output);
  for (const Verdict& v : out.audits) {
    if (!v.pass) {
      std::cerr << "audit " << v.name << " failed: " << v.detail << "\n";
    }
  }
  if (out.partial) std::cerr << "search was capped; result is partial\n";
  return out.exit_code();
}

struct VerifyArgs {
  std::string instance;
  std::string report;
  std::optional<std::string> trace;
  std::string output;
};

int RunVerify(const VerifyArgs& a) {
  const MetricInstance inst = LoadInstance(a.instance);
  std::string report = ReadFile(a.report);
  if (a.trace) {
    // A separate trace file replaces the embedded one.
    const std::string trace = ReadFile(*a.trace);
    trace_from_json(trace);
    const size_t at = report.rfind('}');
    if (at == std::string::npos) throw UsageError("report is not JSON");
    report = report.substr(0, at) + ", \"trace\": " + trace + "}";
  }
  const std::vector<Verdict> verdicts = Verify(inst, report);
  Emit(VerdictsToJson(verdicts), a.output);
  const bool ok = std::all_of(verdicts.begin(), verdicts.end(),
                              [](const Verdict& v) { return v.pass; });
  return ok ? kExitOk : kExitAudit;
}

struct BenchArgs {
  std::optional<std::string> corpus;
  int generate = 0;
  int n = 8;
  int m = 6;
  std::string algs = "greedy,merge";
  SolveArgs solve;
  std::string format = "csv";
};

int RunBench(BenchArgs a) {
  std::vector<NamedInstance> corpus;
  if (a.corpus) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(*a.corpus, ec)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    if (ec) throw IoError("cannot list " + *a.corpus);
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      corpus.push_back({p.filename().string(), LoadInstance(p.string())});
    }
  }
  for (int s = 1; s <= a.generate; ++s) {
    corpus.push_back({"random-" + std::to_string(s),
                      generate_random_instance(s, a.n, a.m, 10)});
  }
  a.solve.algorithm = "greedy";
  RunConfig base = MakeConfig(a.solve);
  if (!base.k) base.k = 2;
  if (!base.f) base.f = Rational(2);
  const std::vector<BenchRow> rows =
      Bench(corpus, ParseAlgorithms(a.algs), base);
  if (a.format != "csv" && a.format != "json") {
    throw UsageError("--format must be csv or json");
  }
  Emit(a.format == "csv" ? BenchCsv(rows) : BenchJson(rows), a.solve.output);
  return kExitOk;
}

struct OracleArgs {
  std::string instance;
  std::optional<int> k;
  std::optional<std::string> f;
  std::string output;
};

int RunOracle(const OracleArgs& a) {
  const MetricInstance inst = LoadInstance(a.instance);
  std::optional<Rational> f;
  if (a.f) f = ParseRationalFlag("--f", *a.f);
  Emit(OracleJson(inst, a.k, f), a.output);
  return kExitOk;
}

void AddSolveFlags(CLI::App* cmd, SolveArgs* a, bool with_alg) {
  if (with_alg) {
    cmd->add_option("--alg", a->algorithm,
                    "greedy | log-adaptive | merge | stable | main")
        ->required();
  }
  cmd->add_option("--k", a->k, "Number of centers");
  cmd->add_option("--f", a->f, "Facility cost as a rational");
  cmd->add_option("--eps", a->epsilon, "Epsilon as a rational");
  cmd->add_option("--seed", a->seed, "Random seed");
  cmd->add_option("--caps", a->caps_file, "JSON file with search caps");
  cmd->add_option("--restarts", a->restarts, "Independent restarts");
  cmd->add_option("--threads", a->threads, "Worker threads, 0 for all");
  cmd->add_option("--max-balls", a->max_balls, "Largest ball guess");
  cmd->add_option("--sample-cap", a->sample_cap, "Largest D-sample");
  cmd->add_option("-o,--output", a->output, "Output file, stdout if absent");
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Metric k-median and facility location toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write an instance file");
  gen_cmd->add_option("kind", gen.kind, "random | stable")->required();
  gen_cmd->add_option("--n", gen.n, "Clients (random)");
  gen_cmd->add_option("--m", gen.m, "Facilities (random)");
  gen_cmd->add_option("--coord-range", gen.coord_range, "Coordinate range");
  gen_cmd->add_option("--k", gen.k, "Clusters (stable)");
  gen_cmd->add_option("--cluster-size", gen.cluster_size,
                      "Clients per cluster");
  gen_cmd->add_option("--separation", gen.separation, "Cluster gap, >= 4");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("-o,--output", gen.output, "Output file");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run an algorithm");
  solve_cmd->add_option("--instance", solve.instance, "Instance JSON")
      ->required();
  AddSolveFlags(solve_cmd, &solve, true);
  solve_cmd->add_flag("--timing", solve.timing, "Record wall time");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Re-audit a report");
  verify_cmd->add_option("--instance", verify.instance, "Instance JSON")
      ->required();
  verify_cmd->add_option("--report", verify.report, "Report JSON")->required();
  verify_cmd->add_option("--trace", verify.trace, "Trace JSON");
  verify_cmd->add_option("-o,--output", verify.output, "Output file");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Sweep a corpus");
  bench_cmd->add_option("--corpus", bench.corpus, "Directory of instances");
  bench_cmd->add_option("--generate", bench.generate,
                        "Append this many random instances");
  bench_cmd->add_option("--n", bench.n, "Clients of generated instances");
  bench_cmd->add_option("--m", bench.m, "Facilities of generated instances");
  bench_cmd->add_option("--algs", bench.algs, "Comma-separated algorithms");
  bench_cmd->add_option("--format", bench.format, "csv | json");
  AddSolveFlags(bench_cmd, &bench.solve, false);

  OracleArgs oracle;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exact optimum");
  oracle_cmd->add_option("--instance", oracle.instance, "Instance JSON")
      ->required();
  oracle_cmd->add_option("--k", oracle.k, "k-median with k centers");
  oracle_cmd->add_option("--f", oracle.f, "UFL with facility cost f");
  oracle_cmd->add_option("-o,--output", oracle.output, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (*gen_cmd) return RunGen(gen);
    if (*solve_cmd) return RunSolve(solve);
    if (*verify_cmd) return RunVerify(verify);
    if (*bench_cmd) return RunBench(bench);
    if (*oracle_cmd) return RunOracle(oracle);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAudit;
  }
  return kExitUsage;
}

}  // namespace cli
}  // namespace kmedkit

int main(int argc, char** argv) { return kmedkit::cli::Main(argc, argv); }
