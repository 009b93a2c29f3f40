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


#include "report.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "kmedkit/greedy.h"
#include "kmedkit/io.h"
#include "kmedkit/log_adaptive.h"
#include "kmedkit/merge.h"
#include "kmedkit/oracle.h"

namespace kmedkit {
namespace cli {
namespace {

using Json = nlohmann::ordered_json;

std::string Str(const Rational& value) { return FormatRational(value); }

Json RationalList(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(Str(v));
  return out;
}

Json AuditsJson(const std::vector<Verdict>& verdicts) {
  Json out = Json::array();
  for (const Verdict& v : verdicts) {
    out.push_back(
        Json{{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }
  return out;
}

std::string Join(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) {
    if (!out.empty()) out += "; ";
    out += line;
  }
  return out;
}

Verdict FromAudit(const std::string& name, const AuditReport& report) {
  return {name, report.ok(), Join(report.failures)};
}

// Largest sum_j [alpha_j - 2 d(j, i)]+ must not exceed fhat.
Verdict DualFeasibility(const MetricInstance& inst,
                        const std::vector<Rational>& alpha,
                        const Rational& fhat) {
  if (static_cast<int>(alpha.size()) != inst.n) {
    return {"dual_feasibility", false, "alpha has wrong length"};
  }
  const Rational load = max_dual_load(inst, alpha);
  return {"dual_feasibility", load <= fhat,
          "max load " + Str(load) + ", fhat " + Str(fhat)};
}

Verdict CostCheck(const MetricInstance& inst, const std::vector<int>& S,
                  const Rational& claimed) {
  if (S.empty()) return {"cost", false, "empty solution"};
  for (int i : S) {
    if (i < 0 || i >= inst.m) {
      return {"cost", false, "facility " + std::to_string(i) + " out of range"};
    }
  }
  const Rational fresh = cost(inst, S);
  return {"cost", fresh == claimed,
          "recomputed " + Str(fresh) + ", reported " + Str(claimed)};
}

Verdict Cardinality(const std::vector<int>& S, int k) {
  const std::set<int> distinct(S.begin(), S.end());
  const bool ok = static_cast<int>(S.size()) == k &&
                  static_cast<int>(distinct.size()) == k;
  return {"cardinality", ok,
          std::to_string(distinct.size()) + " distinct of " +
              std::to_string(S.size()) + ", k = " + std::to_string(k)};
}

std::optional<Rational> UflOpt(const MetricInstance& inst, const Rational& f) {
  try {
    return brute_force_ufl(inst, f).value;
  } catch (const CapExceeded&) {
    return std::nullopt;
  }
}

std::optional<Rational> KMedianOpt(const MetricInstance& inst, int k) {
  try {
    return brute_force_kmedian(inst, k).value;
  } catch (const CapExceeded&) {
    return std::nullopt;
  }
}

Json CapsJson(const StableCaps& caps) {
  Json out = Json::parse(caps_to_json(caps));
  // Thread count does not change results.
  out.erase("threads");
  return out;
}

Json TraceJson(const ExecutionTrace& trace) {
  return Json::parse(trace_to_json(trace));
}

Json BallsJson(const std::vector<Ball>& balls) {
  Json out = Json::array();
  for (const Ball& b : balls) {
    out.push_back(Json{{"leader", b.leader}, {"radius", Str(b.radius)}});
  }
  return out;
}

Json GuessJson(const StableResult& r) {
  Json next = Json::object();
  for (const auto& [c, nx] : r.winner.cheap.next) next[std::to_string(c)] = nx;
  Json out;
  out["source"] = r.winner.balls.empty() && r.centers == r.S ? "local_search"
                                                             : "guess";
  out["restart"] = r.winner_restart;
  out["W"] = r.winner.W;
  out["balls"] = BallsJson(r.winner.balls);
  out["Q"] = r.winner.Q;
  out["sizes"] = Json{{"U", r.winner.sizes.U},
                      {"R", r.winner.sizes.R},
                      {"X", r.winner.sizes.X}};
  out["U_tilde"] = r.winner.cheap.U_tilde;
  out["next"] = next;
  out["R0"] = r.winner.R0;
  out["X"] = r.winner.X;
  out["local_search"] = r.S;
  out["local_search_cost"] = Str(r.S_cost);
  out["candidates"] = r.candidates;
  out["notes"] = r.notes;
  return out;
}

std::vector<int> Sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "greedy") return Algorithm::kGreedy;
  if (name == "log-adaptive") return Algorithm::kLogAdaptive;
  if (name == "merge") return Algorithm::kMerge;
  if (name == "stable") return Algorithm::kStable;
  if (name == "main") return Algorithm::kMain;
  throw UsageError("unknown algorithm \"" + name + "\"");
}

std::string AlgorithmName(Algorithm alg) {
  switch (alg) {
    case Algorithm::kGreedy:
      return "greedy";
    case Algorithm::kLogAdaptive:
      return "log-adaptive";
    case Algorithm::kMerge:
      return "merge";
    case Algorithm::kStable:
      return "stable";
    case Algorithm::kMain:
      return "main";
  }
  return "";
}

void RunConfig::Validate(const MetricInstance& inst) const {
  const bool needs_k = algorithm == Algorithm::kMerge ||
                       algorithm == Algorithm::kStable ||
                       algorithm == Algorithm::kMain;
  if (needs_k) {
    if (!k) throw UsageError(AlgorithmName(algorithm) + " requires --k");
    if (*k < 1 || *k > inst.m) throw UsageError("--k must be in [1, m]");
  } else {
    if (!f) throw UsageError(AlgorithmName(algorithm) + " requires --f");
    if (sgn(*f) < 0) throw UsageError("--f must be non-negative");
  }
  if (sgn(epsilon) <= 0 || epsilon >= 1) {
    throw UsageError("--eps must be in (0, 1)");
  }
  if (algorithm == Algorithm::kMerge && !(epsilon < Rational(1, 6))) {
    throw UsageError("merge requires --eps < 1/6");
  }
}

bool RunOutcome::audits_pass() const {
  return std::all_of(audits.begin(), audits.end(),
                     [](const Verdict& v) { return v.pass; });
}

int RunOutcome::exit_code() const {
  if (!audits_pass()) return kExitAudit;
  return partial ? kExitPartial : kExitOk;
}

RunOutcome Solve(const MetricInstance& inst, const RunConfig& config) {
  config.Validate(inst);
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  Json report;
  report["algorithm"] = AlgorithmName(config.algorithm);
  const bool kmedian = config.algorithm == Algorithm::kMerge ||
                       config.algorithm == Algorithm::kStable ||
                       config.algorithm == Algorithm::kMain;
  Json cfg;
  cfg["k"] = kmedian ? Json(*config.k) : Json(nullptr);
  cfg["f"] = kmedian ? Json(nullptr) : Json(Str(*config.f));
  cfg["epsilon"] = Str(config.epsilon);
  cfg["seed"] = config.seed;
  cfg["caps"] = CapsJson(config.caps);
  report["config"] = cfg;
  report["instance"] = Json{{"n", inst.n}, {"m", inst.m}, {"name", inst.label}};
  std::vector<int> solution;
  Rational total;
  Json certificate = Json::object();
  Json extra = Json::object();
  switch (config.algorithm) {
    case Algorithm::kGreedy: {
      const Rational& f = *config.f;
      const GreedyOutcome g = run_greedy(inst, f);
      ParamSet params;
      params.SetFacilityCost(f);
      solution = Sorted(g.S_star);
      total = cost(inst, solution);
      const Rational gap =
          payment_gap(inst, params.fhat, g.S_star, g.alpha_star);
      certificate["opened"] = g.S_star;
      certificate["events"] = static_cast<int>(g.events.size());
      certificate["payment_gap"] = Str(gap);
      certificate["max_dual_load"] = Str(max_dual_load(inst, g.alpha_star));
      out.audits.push_back(FromAudit("no_overbid",
                                     audit_no_overbid(g.events, inst, params)));
      out.audits.push_back({"payment", sgn(gap) == 0, "gap " + Str(gap)});
      out.audits.push_back(DualFeasibility(inst, g.alpha_star, params.fhat));
      const LmpReport lmp =
          verify_lmp_certificate(inst, f, solution, g.alpha_star, Rational(2));
      out.audits.push_back(
          {"lmp_bound", lmp.lmp_bound.value_or(true),
           lmp.lmp_bound ? Join(lmp.failures) : "oracle refused the instance"});
      extra["alpha"] = RationalList(g.alpha_star);
      break;
    }
    case Algorithm::kLogAdaptive: {
      const LogAdaptiveResult r =
          run_log_adaptive(inst, *config.f, config.epsilon);
      solution = Sorted(r.S_star);
      total = cost(inst, solution);
      TraceAuditOptions options;
      options.ufl_value = UflOpt(inst, *config.f);
      certificate["phases"] = r.trace.L;
      certificate["ufl_opt"] =
          options.ufl_value ? Json(Str(*options.ufl_value)) : Json(nullptr);
      out.audits.push_back(FromAudit(
          "trace", audit_trace(inst, r.trace.params, r.trace, Rational(0),
                               options)));
      out.audits.push_back(
          DualFeasibility(inst, r.alpha_star, r.trace.params.fhat));
      extra["alpha"] = RationalList(r.alpha_star);
      extra["trace"] = TraceJson(r.trace);
      break;
    }
    case Algorithm::kMerge: {
      const int k = *config.k;
      const PseudoSolution ps = run_pseudo_approx(inst, k, config.epsilon);
      std::set<int> bases;
      Json open = Json::array();
      for (const FacilityRef& h : ps.open_set) {
        bases.insert(h.base);
        open.push_back(ToString(h));
      }
      solution.assign(bases.begin(), bases.end());
      total = cost(inst, solution);
      int worst_free = 0;
      for (const PhaseSequence& seq : ps.trace.phases) {
        worst_free = std::max(worst_free, seq.free_count());
      }
      certificate["open_set"] = open;
      certificate["k_regular"] = ps.k_regular;
      certificate["free_count"] = ps.free_count;
      certificate["pseudo_cost"] = Str(ps.cost);
      certificate["eta"] = Str(ps.eta);
      certificate["padding"] = ps.padding;
      certificate["walk_log"] = ps.walk_log;
      out.audits.push_back({"regular_count", ps.k_regular == k,
                            std::to_string(ps.k_regular) + " regular"});
      out.audits.push_back({"free_per_phase", worst_free <= 3,
                            "at most " + std::to_string(worst_free)});
      out.audits.push_back(FromAudit(
          "trace", audit_trace(inst, ps.trace.params, ps.trace, ps.eta)));
      extra["alpha"] = RationalList(ps.alpha);
      extra["trace"] = TraceJson(ps.trace);
      break;
    }
    case Algorithm::kStable: {
      StableOptions options;
      options.caps = config.caps;
      const StableResult r =
          run_stable(inst, *config.k, config.epsilon, config.seed, options);
      solution = Sorted(r.centers);
      total = cost(inst, solution);
      out.partial = r.partial;
      out.audits.push_back(Cardinality(solution, *config.k));
      extra["guess"] = GuessJson(r);
      break;
    }
    case Algorithm::kMain: {
      StableOptions options;
      options.caps = config.caps;
      const MainResult r =
          run_main(inst, *config.k, config.epsilon, config.seed, options);
      solution = Sorted(r.centers);
      total = cost(inst, solution);
      out.partial = r.partial;
      out.audits.push_back(Cardinality(solution, *config.k));
      Json stable = Json::object();
      for (const auto& [kk, c] : r.stable_costs) {
        stable[std::to_string(kk)] = Str(c);
      }
      extra["guess"] = Json{{"source", r.source},
                            {"k_prime", r.k_prime},
                            {"surplus", r.surplus},
                            {"pseudo_cost", r.pseudo_cost
                                                ? Json(Str(*r.pseudo_cost))
                                                : Json(nullptr)},
                            {"stable_costs", stable}};
      break;
    }
  }
  out.audits.insert(out.audits.begin(), CostCheck(inst, solution, total));
  report["solution"] = solution;
  report["cost"] = Str(total);
  report["certificate"] = certificate;
  report["audits"] = AuditsJson(out.audits);
  report["partial"] = out.partial;
  for (auto& [key, value] : extra.items()) report[key] = value;
  if (config.timing) {
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    report["timing"] = Json{{"wall_ms", ms}};
  }
  out.report = report.dump(1) + "\n";
  return out;
}

std::vector<Verdict> Verify(const MetricInstance& inst,
                            const std::string& text) {
  Json report;
  try {
    report = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("report is not JSON: ") + e.what());
  }
  std::vector<Verdict> out;
  std::vector<int> solution;
  Rational claimed;
  try {
    solution = report.at("solution").get<std::vector<int>>();
    claimed = ParseRational(report.at("cost").get<std::string>());
  } catch (const std::exception& e) {
    throw UsageError(std::string("report lacks solution or cost: ") + e.what());
  }
  out.push_back(CostCheck(inst, solution, claimed));
  const Json& cfg = report.value("config", Json::object());
  if (cfg.contains("k") && cfg.at("k").is_number_integer()) {
    out.push_back(Cardinality(solution, cfg.at("k").get<int>()));
  }
  std::optional<std::vector<Rational>> alpha;
  if (report.contains("alpha")) {
    alpha.emplace();
    for (const Json& a : report.at("alpha")) {
      alpha->push_back(ParseRational(a.get<std::string>()));
    }
  }
  if (report.contains("trace")) {
    const ExecutionTrace trace = trace_from_json(report.at("trace").dump());
    const Rational eta = trace.params.eta;
    out.push_back(FromAudit("trace",
                            audit_trace(inst, trace.params, trace, eta)));
    const Replay replay = replay_trace(inst, trace.params, trace, eta);
    if (alpha) {
      out.push_back(DualFeasibility(inst, *alpha, trace.params.fhat));
      out.push_back({"alpha_matches_trace", *alpha == replay.alpha,
                     *alpha == replay.alpha ? "" : "reported alpha differs"});
    }
  } else if (alpha) {
    if (!cfg.contains("f") || !cfg.at("f").is_string()) {
      throw UsageError("report with alpha lacks config.f");
    }
    const Rational f = ParseRational(cfg.at("f").get<std::string>());
    out.push_back(DualFeasibility(inst, *alpha, 2 * f));
    const LmpReport lmp =
        verify_lmp_certificate(inst, f, solution, *alpha, Rational(2));
    std::vector<std::string> payment;
    for (const std::string& line : lmp.failures) {
      if (line.rfind("payment", 0) == 0) payment.push_back(line);
    }
    out.push_back({"payment", lmp.payment, Join(payment)});
  }
  return out;
}

std::string VerdictsToJson(const std::vector<Verdict>& verdicts) {
  const bool ok = std::all_of(verdicts.begin(), verdicts.end(),
                              [](const Verdict& v) { return v.pass; });
  Json out;
  out["ok"] = ok;
  out["verdicts"] = AuditsJson(verdicts);
  return out.dump(1) + "\n";
}

StableCaps LoadCaps(const std::optional<std::string>& file_text,
                    const std::function<const char*(const char*)>& getenv) {
  static const std::pair<const char*, const char*> kEnv[] = {
      {"KMEDKIT_SAMPLE_CAP", "sample_cap"},
      {"KMEDKIT_MAX_BALLS", "max_balls"},
      {"KMEDKIT_RADIUS_MODE", "radius_mode"},
      {"KMEDKIT_BALL_FAMILY_CAP", "ball_family_cap"},
      {"KMEDKIT_EXP_OUTER_CAP", "exp_outer_cap"},
      {"KMEDKIT_R0_CAP", "r0_cap"},
      {"KMEDKIT_RESTARTS", "restarts"},
      {"KMEDKIT_CANDIDATE_CAP", "candidate_cap"},
      {"KMEDKIT_THREADS", "threads"},
  };
  Json env = Json::object();
  for (const auto& [var, key] : kEnv) {
    const char* value = getenv(var);
    if (value == nullptr) continue;
    const std::string text = value;
    if (std::string(key) == "radius_mode") {
      env[key] = text;
      continue;
    }
    try {
      size_t used = 0;
      const long long number = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      env[key] = number;
    } catch (const std::exception&) {
      throw UsageError(std::string(var) + " must be an integer");
    }
  }
  try {
    StableCaps caps = caps_from_json(env.dump());
    if (file_text) caps = caps_from_json(*file_text, caps);
    return caps;
  } catch (const ParseError& e) {
    throw UsageError(std::string("caps: ") + e.what());
  }
}

std::string OracleJson(const MetricInstance& inst, std::optional<int> k,
                       std::optional<Rational> f) {
  Json out;
  OracleResult r;
  if (k) {
    if (*k < 1 || *k > inst.m) throw UsageError("--k must be in [1, m]");
    r = brute_force_kmedian(inst, *k);
    out["problem"] = "k-median";
    out["k"] = *k;
  } else if (f) {
    r = brute_force_ufl(inst, *f);
    out["problem"] = "ufl";
    out["f"] = Str(*f);
  } else {
    throw UsageError("oracle requires --k or --f");
  }
  out["value"] = Str(r.value);
  out["witness"] = r.witness;
  out["enumerated"] = r.enumerated;
  return out.dump(1) + "\n";
}

std::vector<BenchRow> Bench(const std::vector<NamedInstance>& corpus,
                            const std::vector<Algorithm>& algorithms,
                            const RunConfig& base) {
  std::vector<BenchRow> rows;
  for (const NamedInstance& entry : corpus) {
    for (Algorithm alg : algorithms) {
      RunConfig config = base;
      config.algorithm = alg;
      config.timing = false;
      if (config.k) config.k = std::min(*config.k, entry.inst.m);
      BenchRow row;
      row.instance = entry.name;
      row.algorithm = AlgorithmName(alg);
      const bool kmedian =
          alg == Algorithm::kMerge || alg == Algorithm::kStable ||
          alg == Algorithm::kMain;
      row.param = kmedian ? "k=" + std::to_string(config.k.value_or(0))
                          : "f=" + Str(config.f.value_or(Rational(0)));
      const auto start = std::chrono::steady_clock::now();
      const RunOutcome r = Solve(entry.inst, config);
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      const Json report = Json::parse(r.report);
      row.cost = ParseRational(report.at("cost").get<std::string>());
      row.opened = static_cast<int>(report.at("solution").size());
      const Json& cert = report.at("certificate");
      row.free_count = cert.value("free_count", 0);
      if (report.contains("trace")) {
        row.phases = report.at("trace").at("L").get<int>();
      }
      if (kmedian) {
        row.opt = KMedianOpt(entry.inst, *config.k);
      } else if (const auto opt = UflOpt(entry.inst, *config.f)) {
        // Connection cost against the UFL optimum less the facility cost of
        // the reported solution.
        row.opt = *opt - *config.f * row.opened;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string BenchCsv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "instance,algorithm,param,cost,opt,ratio,ratio_approx,opened,free,"
         "phases,wall_ms\n";
  for (const BenchRow& r : rows) {
    std::string ratio, approx;
    if (r.opt && sgn(*r.opt) > 0) {
      const Rational q = r.cost / *r.opt;
      ratio = Str(q);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", ToDouble(q));
      approx = buf;
    }
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.3f", r.wall_ms);
    out << r.instance << ',' << r.algorithm << ',' << r.param << ','
        << Str(r.cost) << ',' << (r.opt ? Str(*r.opt) : "") << ',' << ratio
        << ',' << approx << ',' << r.opened << ',' << r.free_count << ','
        << r.phases << ',' << ms << '\n';
  }
  return out.str();
}

std::string BenchJson(const std::vector<BenchRow>& rows) {
  Json out = Json::array();
  for (const BenchRow& r : rows) {
    Json row;
    row["instance"] = r.instance;
    row["algorithm"] = r.algorithm;
    row["param"] = r.param;
    row["cost"] = Str(r.cost);
    row["opt"] = r.opt ? Json(Str(*r.opt)) : Json(nullptr);
    row["ratio"] = r.opt && sgn(*r.opt) > 0 ? Json(Str(r.cost / *r.opt))
                                            : Json(nullptr);
    row["opened"] = r.opened;
    row["free"] = r.free_count;
    row["phases"] = r.phases;
    row["wall_ms"] = r.wall_ms;
    out.push_back(std::move(row));
  }
  return out.dump(1) + "\n";
}

}  // namespace cli
}  // namespace kmedkit
