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

#include "kmedkit/log_adaptive.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kmedkit/lp.h"

namespace kmedkit {

int PhaseSequence::free_count() const {
  int count = 0;
  for (const Opening& o : openings) count += o.facility.is_free() ? 1 : 0;
  return count;
}

bool PhaseSequence::SameFacilities(const PhaseSequence& o) const {
  if (openings.size() != o.openings.size()) return false;
  for (size_t t = 0; t < openings.size(); ++t) {
    if (openings[t].facility != o.openings[t].facility) return false;
  }
  return true;
}

std::vector<FacilityRef> ExecutionTrace::opened() const {
  return opened_through(L);
}

std::vector<FacilityRef> ExecutionTrace::opened_through(int p) const {
  std::vector<FacilityRef> out;
  for (const PhaseSequence& seq : phases) {
    if (seq.phase > p) break;
    for (const Opening& o : seq.openings) out.push_back(o.facility);
  }
  return out;
}

const PhaseSequence* ExecutionTrace::find(int p) const {
  for (const PhaseSequence& seq : phases) {
    if (seq.phase == p) return &seq;
  }
  return nullptr;
}

PhaseSequence ExecutionTrace::sequence(int p) const {
  const PhaseSequence* seq = find(p);
  if (seq != nullptr) return *seq;
  PhaseSequence empty;
  empty.phase = p;
  return empty;
}

int ExecutionTrace::regular_count() const {
  int count = 0;
  for (const FacilityRef& h : opened()) count += h.is_free() ? 0 : 1;
  return count;
}

int ExecutionTrace::free_count() const {
  int count = 0;
  for (const FacilityRef& h : opened()) count += h.is_free() ? 1 : 0;
  return count;
}

ExecutionTrace ExecutionTrace::Prefix(int p) const {
  ExecutionTrace out;
  out.params = params;
  out.L = p;
  for (const PhaseSequence& seq : phases) {
    if (seq.phase <= p) out.phases.push_back(seq);
  }
  return out;
}

void ExecutionTrace::SetSequence(const PhaseSequence& seq) {
  auto it = std::find_if(phases.begin(), phases.end(),
                         [&](const PhaseSequence& s) {
                           return s.phase >= seq.phase;
                         });
  if (it != phases.end() && it->phase == seq.phase) {
    if (seq.openings.empty()) {
      phases.erase(it);
    } else {
      *it = seq;
    }
    return;
  }
  if (!seq.openings.empty()) phases.insert(it, seq);
}

Rational phase_theta(const Rational& epsilon, int p) {
  return Pow(1 + epsilon * epsilon, static_cast<unsigned long>(p - 1));
}

std::vector<Rational> phase_schedule(const Rational& Mmax,
                                     const Rational& epsilon) {
  if (Mmax < 1) throw std::invalid_argument("Mmax must be >= 1");
  if (sgn(epsilon) <= 0) throw std::invalid_argument("epsilon must be > 0");
  const Rational base = 1 + epsilon * epsilon;
  const Rational target = 6 * Mmax;
  std::vector<Rational> out = {Rational(1)};
  while (out.back() < target) out.push_back(out.back() * base);
  return out;
}

namespace {

// Stage-1 view of the state determined by (theta, S).
struct View {
  Rational theta;
  std::vector<ExtRational> dS;
  std::vector<bool> active;
  // min((1 - delta) d(j, S), (1 + eps^2) theta) for active j.
  std::vector<Rational> upper;
  std::vector<int> A;
  std::vector<int> I;
};

View MakeView(const MetricInstance& inst, const ParamSet& params,
              const Rational& theta, std::vector<ExtRational> dS) {
  View v;
  v.theta = theta;
  v.dS = std::move(dS);
  v.active.assign(inst.n, false);
  v.upper.assign(inst.n, Rational(0));
  const Rational keep = 1 - params.delta;
  const Rational cap = (1 + params.epsilon * params.epsilon) * theta;
  for (int j = 0; j < inst.n; ++j) {
    const ExtRational scaled = v.dS[j].Scaled(keep);
    if (theta < scaled) {
      v.active[j] = true;
      v.upper[j] = scaled.infinite() ? cap : std::min(scaled.value(), cap);
      v.A.push_back(j);
    } else {
      v.I.push_back(j);
    }
  }
  return v;
}

View MakeView(const MetricInstance& inst, const ParamSet& params,
              const Rational& theta, const std::vector<FacilityRef>& S) {
  return MakeView(inst, params, theta, distances_to_open(inst, params, S));
}

std::vector<int> Ball(const MetricInstance& inst, const ParamSet& params,
                      const View& v, int i) {
  const Rational radius = params.epsilon * v.theta;
  std::vector<int> out;
  for (int j : v.A) {
    if (inst.cf(j, i) <= radius) out.push_back(j);
  }
  return out;
}

// Bids of every client: tau on the ball, theta elsewhere in A.
std::vector<Rational> FullBids(const MetricInstance& inst, const View& v,
                               const Bids& tau) {
  std::vector<Rational> out(inst.n, Rational(0));
  for (int j : v.A) out[j] = v.theta;
  for (const auto& [j, value] : tau) out[j] = value;
  return out;
}

Rational Payment(const MetricInstance& inst, const ParamSet& params,
                 const View& v, int i, const std::vector<Rational>& bids) {
  const Rational keep = 1 - params.delta;
  Rational total = 0;
  for (int j : v.A) total += PositivePart(bids[j] - keep * inst.cf(j, i));
  Rational inactive = 0;
  for (int j : v.I) inactive += PositivePart(v.dS[j].value() - inst.cf(j, i));
  return total + keep * inactive;
}

// First violated dual-feasibility row over regular i0 and k in A.
std::optional<std::string> DualViolation(const MetricInstance& inst,
                                         const ParamSet& params, const View& v,
                                         const std::vector<Rational>& bids) {
  for (int i0 = 0; i0 < inst.m; ++i0) {
    Rational a_term = 0;
    for (int j : v.A) a_term += PositivePart(bids[j] - inst.cf(j, i0));
    if (a_term > params.fhat) {
      return "dual row i" + std::to_string(i0) + " exceeds fhat";
    }
    if (v.I.empty()) continue;
    for (int k : v.A) {
      Rational i_term = 0;
      for (int j : v.I) {
        i_term += PositivePart(bids[k] - 2 * inst.cf(j, i0) - inst.cf(k, i0));
      }
      if (a_term + i_term > params.fhat) {
        return "dual row (i" + std::to_string(i0) + ", k" +
               std::to_string(k) + ") exceeds fhat";
      }
    }
  }
  return std::nullopt;
}

Bids BallBids(const std::vector<int>& ball, const std::vector<Rational>& bids) {
  Bids out;
  for (int j : ball) out[j] = bids[j];
  return out;
}

// Linear program over the ball bids with the hinge terms of the dual rows
// linearized by auxiliary variables. Rows already satisfied at the largest
// bids are dropped.
std::optional<Bids> SolveBids(const MetricInstance& inst,
                              const ParamSet& params, const View& v, int i,
                              const std::vector<int>& ball,
                              const Rational& threshold,
                              const std::vector<Rational>& high) {
  LinearSystem sys;
  std::map<int, int> var;
  std::vector<bool> in_ball(inst.n, false);
  for (int j : ball) {
    var[j] = sys.AddVariable(v.theta, v.upper[j]);
    in_ball[j] = true;
  }
  const Rational keep = 1 - params.delta;
  {
    Rational base = 0;
    for (int j : v.A) {
      base += in_ball[j] ? Rational(-keep * inst.cf(j, i))
                         : PositivePart(v.theta - keep * inst.cf(j, i));
    }
    for (int j : v.I) {
      base += keep * PositivePart(v.dS[j].value() - inst.cf(j, i));
    }
    std::vector<std::pair<int, Rational>> coeffs;
    for (int j : ball) coeffs.emplace_back(var[j], Rational(1));
    sys.AddRow(std::move(coeffs), Relation::kGe, threshold - base);
  }
  std::vector<int> outside;
  for (int j : v.A) {
    if (!in_ball[j]) outside.push_back(j);
  }
  for (int i0 = 0; i0 < inst.m; ++i0) {
    Rational a_high = 0;
    for (int j : v.A) a_high += PositivePart(high[j] - inst.cf(j, i0));
    auto i_term = [&](const Rational& tau_k, int k) {
      Rational total = 0;
      for (int j : v.I) {
        total += PositivePart(tau_k - 2 * inst.cf(j, i0) - inst.cf(k, i0));
      }
      return total;
    };
    // Rows that can bind: the worst k outside the ball and every ball k.
    std::optional<int> worst_outside;
    for (int k : outside) {
      if (!worst_outside || inst.cf(k, i0) < inst.cf(*worst_outside, i0)) {
        worst_outside = k;
      }
    }
    std::vector<int> binding_k;
    bool outside_binds = false;
    if (a_high > params.fhat) outside_binds = true;
    if (worst_outside &&
        a_high + i_term(v.theta, *worst_outside) > params.fhat) {
      outside_binds = true;
    }
    for (int k : ball) {
      if (a_high + i_term(high[k], k) > params.fhat) binding_k.push_back(k);
    }
    if (!outside_binds && binding_k.empty()) continue;

    // Shared A-term: constant part plus linear and hinge parts on the ball.
    Rational constant = 0;
    std::vector<std::pair<int, Rational>> a_coeffs;
    for (int j : outside) constant += PositivePart(v.theta - inst.cf(j, i0));
    for (int j : ball) {
      const Rational& d = inst.cf(j, i0);
      if (d <= v.theta) {
        a_coeffs.emplace_back(var[j], Rational(1));
        constant -= d;
      } else if (d < v.upper[j]) {
        const int t = sys.AddVariable(Rational(0), v.upper[j] - d);
        sys.AddRow({{var[j], Rational(1)}, {t, Rational(-1)}}, Relation::kLe,
                   d);
        a_coeffs.emplace_back(t, Rational(1));
      }
    }
    if (outside_binds) {
      Rational extra = worst_outside ? i_term(v.theta, *worst_outside)
                                     : Rational(0);
      sys.AddRow(a_coeffs, Relation::kLe, params.fhat - constant - extra);
    }
    for (int k : binding_k) {
      std::vector<std::pair<int, Rational>> coeffs = a_coeffs;
      Rational row_constant = constant;
      std::vector<Rational> inner;
      for (int j : v.I) {
        const Rational b = 2 * inst.cf(j, i0) + inst.cf(k, i0);
        if (b <= v.theta) {
          coeffs.emplace_back(var[k], Rational(1));
          row_constant -= b;
        } else if (b < v.upper[k]) {
          inner.push_back(b);
        }
      }
      if (!inner.empty()) {
        std::sort(inner.begin(), inner.end());
        const int s = sys.AddVariable(
            Rational(0), v.upper[k] * static_cast<long>(inner.size()));
        Rational prefix = 0;
        for (size_t r = 0; r < inner.size(); ++r) {
          prefix += inner[r];
          sys.AddRow({{var[k], Rational(static_cast<long>(r + 1))},
                      {s, Rational(-1)}},
                     Relation::kLe, prefix);
        }
        coeffs.emplace_back(s, Rational(1));
      }
      sys.AddRow(std::move(coeffs), Relation::kLe, params.fhat - row_constant);
    }
  }
  const std::optional<std::vector<Rational>> x = solve_feasibility(sys);
  if (!x) return std::nullopt;
  Bids out;
  for (int j : ball) out[j] = (*x)[var[j]];
  return out;
}

std::optional<Bids> Openable(const MetricInstance& inst,
                             const ParamSet& params, const View& v, int i,
                             const Rational& eta) {
  const std::vector<int> ball = Ball(inst, params, v, i);
  std::vector<Rational> low = FullBids(inst, v, Bids());
  std::vector<Rational> high = low;
  for (int j : ball) high[j] = v.upper[j];
  const Rational threshold = params.fhat - inst.n * eta;
  if (Payment(inst, params, v, i, high) < threshold) return std::nullopt;
  if (DualViolation(inst, params, v, low)) return std::nullopt;
  if (Payment(inst, params, v, i, low) >= threshold) {
    return BallBids(ball, low);
  }
  if (!DualViolation(inst, params, v, high)) return BallBids(ball, high);
  std::optional<Bids> tau =
      SolveBids(inst, params, v, i, ball, threshold, high);
  if (tau) {
    const std::vector<Rational> bids = FullBids(inst, v, *tau);
    if (Payment(inst, params, v, i, bids) < threshold ||
        DualViolation(inst, params, v, bids)) {
      throw std::logic_error("bid program returned an invalid witness");
    }
  }
  return tau;
}

Rational MaxPayment(const MetricInstance& inst, const ParamSet& params,
                    const View& v, int i) {
  std::vector<Rational> high = FullBids(inst, v, Bids());
  for (int j : Ball(inst, params, v, i)) high[j] = v.upper[j];
  return Payment(inst, params, v, i, high);
}

bool OpenAsRegular(const std::vector<FacilityRef>& S, int i) {
  return std::find(S.begin(), S.end(), FacilityRef::Regular(i)) != S.end();
}

}  // namespace

std::vector<std::string> check_bids(const MetricInstance& inst,
                                    const ParamSet& params,
                                    const Rational& theta,
                                    const std::vector<FacilityRef>& S, int i,
                                    const Bids& tau, const Rational& eta) {
  std::vector<std::string> out;
  const View v = MakeView(inst, params, theta, S);
  const std::vector<int> ball = Ball(inst, params, v, i);
  std::vector<bool> in_ball(inst.n, false);
  for (int j : ball) in_ball[j] = true;
  for (const auto& [j, value] : tau) {
    if (j < 0 || j >= inst.n || !v.active[j]) {
      out.push_back("bid for non-active client " + std::to_string(j));
    } else if (!in_ball[j] && value != theta) {
      out.push_back("raised bid outside the ball for client " +
                    std::to_string(j));
    } else if (value < theta || value > v.upper[j]) {
      out.push_back("bid out of range for client " + std::to_string(j));
    }
  }
  if (!out.empty()) return out;
  const std::vector<Rational> bids = FullBids(inst, v, tau);
  const Rational threshold = params.fhat - inst.n * eta;
  if (Payment(inst, params, v, i, bids) < threshold) {
    out.push_back("facility i" + std::to_string(i) + " not paid for");
  }
  if (auto violation = DualViolation(inst, params, v, bids)) {
    out.push_back(*violation);
  }
  return out;
}

std::optional<Bids> is_openable(const MetricInstance& inst,
                                const ParamSet& params, const Rational& theta,
                                const std::vector<FacilityRef>& S, int i,
                                const Rational& eta) {
  return Openable(inst, params, MakeView(inst, params, theta, S), i, eta);
}

std::optional<Bids> is_openable(const DualState& state,
                                const MetricInstance& inst, int i,
                                const ParamSet& params, const Rational& eta) {
  return is_openable(inst, params, state.theta, state.S, i, eta);
}

Rational max_payment(const MetricInstance& inst, const ParamSet& params,
                     const Rational& theta, const std::vector<FacilityRef>& S,
                     int i) {
  return MaxPayment(inst, params, MakeView(inst, params, theta, S), i);
}

namespace {

// Phase bookkeeping shared by completion and replay.
class PhaseClock {
 public:
  PhaseClock(const MetricInstance& inst, const ParamSet& params)
      : inst_(inst), params_(params),
        base_(1 + params.epsilon * params.epsilon) {}

  const Rational& Theta(int q) {
    auto it = cache_.find(q);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(q, phase_theta(params_.epsilon, q)).first->second;
  }

  // (1 - delta) max_j d(j, S), or nullopt while some client has no open
  // facility.
  std::optional<Rational> Horizon(const std::vector<ExtRational>& dS) const {
    Rational worst = 0;
    for (const ExtRational& d : dS) {
      if (d.infinite()) return std::nullopt;
      worst = std::max(worst, d.value());
    }
    return (1 - params_.delta) * worst;
  }

  bool Terminated(int p, const std::vector<ExtRational>& dS) {
    std::optional<Rational> h = Horizon(dS);
    return h && Theta(p + 1) >= *h;
  }

  // First q > p with theta_{q+1} >= horizon.
  std::optional<int> TerminationPhase(int p,
                                      const std::vector<ExtRational>& dS) {
    std::optional<Rational> h = Horizon(dS);
    if (!h) return std::nullopt;
    int e = 0;
    if (*h > 1) {
      e = static_cast<int>(
          std::ceil(std::log(ToDouble(*h)) / std::log(ToDouble(base_))));
      e = std::max(e, 0);
      while (e > 0 && Theta(e) >= *h) --e;
      while (Theta(e + 1) < *h) ++e;
    }
    return std::max(p + 1, e);
  }

  bool Payable(int q, const std::vector<FacilityRef>& S,
               const std::vector<ExtRational>& dS) {
    const View v = MakeView(inst_, params_, Theta(q), dS);
    for (int i = 0; i < inst_.m; ++i) {
      if (OpenAsRegular(S, i)) continue;
      if (MaxPayment(inst_, params_, v, i) >= params_.fhat) return true;
    }
    return false;
  }

  // First q in [lo, hi] that is payable; unbounded when hi is nullopt.
  std::optional<int> FirstPayable(int lo, std::optional<int> hi,
                                  const std::vector<FacilityRef>& S,
                                  const std::vector<ExtRational>& dS) {
    if (hi && lo > *hi) return std::nullopt;
    if (Payable(lo, S, dS)) return lo;
    int bad = lo;
    int good;
    if (hi) {
      if (!Payable(*hi, S, dS)) return std::nullopt;
      good = *hi;
    } else {
      long step = 1;
      while (true) {
        if (step > (1L << 30)) throw std::logic_error("no payable phase");
        const int probe = bad + static_cast<int>(step);
        if (Payable(probe, S, dS)) {
          good = probe;
          break;
        }
        bad = probe;
        step *= 2;
      }
    }
    while (good - bad > 1) {
      const int mid = bad + (good - bad) / 2;
      if (Payable(mid, S, dS)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    return good;
  }

  void StageOne(std::vector<FacilityRef>* S, PhaseSequence* seq) {
    const Rational theta = Theta(seq->phase);
    while (true) {
      const View v = MakeView(inst_, params_, theta, *S);
      bool opened = false;
      for (int i = 0; i < inst_.m && !opened; ++i) {
        if (OpenAsRegular(*S, i)) continue;
        std::optional<Bids> tau = Openable(inst_, params_, v, i, Rational(0));
        if (!tau) continue;
        seq->openings.push_back(Opening{FacilityRef::Regular(i), *tau, *S});
        S->push_back(FacilityRef::Regular(i));
        opened = true;
      }
      if (!opened) return;
    }
  }

 private:
  const MetricInstance& inst_;
  const ParamSet& params_;
  Rational base_;
  std::map<int, Rational> cache_;
};

}  // namespace

PhaseSequence complete_sequence(const MetricInstance& inst,
                                const ParamSet& params,
                                const ExecutionTrace& prefix,
                                const PhaseSequence& hp) {
  std::vector<FacilityRef> S = prefix.opened_through(hp.phase - 1);
  for (const Opening& o : hp.openings) S.push_back(o.facility);
  PhaseSequence out = hp;
  PhaseClock clock(inst, params);
  clock.StageOne(&S, &out);
  return out;
}

ExecutionTrace complete_solution(const MetricInstance& inst,
                                 const ParamSet& params,
                                 const ExecutionTrace& partial) {
  ExecutionTrace trace = partial;
  trace.params = params;
  for (const PhaseSequence& seq : trace.phases) {
    if (seq.phase < 1 || seq.phase > trace.L) {
      throw std::invalid_argument("phase outside the partial trace");
    }
  }
  PhaseClock clock(inst, params);
  std::vector<FacilityRef> S = trace.opened();
  int p = trace.L;
  if (p >= 1) {
    PhaseSequence seq = trace.sequence(p);
    clock.StageOne(&S, &seq);
    trace.SetSequence(seq);
  }
  while (true) {
    const std::vector<ExtRational> dS = distances_to_open(inst, params, S);
    if (p >= 1 && clock.Terminated(p, dS)) {
      trace.L = p;
      return trace;
    }
    const std::optional<int> last = clock.TerminationPhase(p, dS);
    const std::optional<int> next = clock.FirstPayable(p + 1, last, S, dS);
    if (!next) {
      trace.L = *last;
      return trace;
    }
    PhaseSequence seq;
    seq.phase = *next;
    clock.StageOne(&S, &seq);
    if (!seq.openings.empty()) trace.phases.push_back(seq);
    p = *next;
  }
}

namespace {

// Replays a trace; with a report, also audits it.
Replay Walk(const MetricInstance& inst, const ParamSet& params,
            const ExecutionTrace& trace, const Rational& eta,
            const TraceAuditOptions& options, AuditReport* report) {
  auto fail = [&](const std::string& message) {
    if (report != nullptr) report->failures.push_back(message);
  };
  PhaseClock clock(inst, params);
  const Rational keep = 1 - params.delta;
  const Rational threshold = params.fhat - inst.n * eta;
  Replay out;
  std::vector<bool> active(inst.n, true);
  out.alpha.assign(inst.n, Rational(1));
  std::vector<FacilityRef> S;

  auto regular_count = [&]() {
    long count = 0;
    for (const FacilityRef& h : S) count += h.is_free() ? 0 : 1;
    return count;
  };
  auto checkpoint = [&](const Rational& theta, const std::string& where) {
    if (report == nullptr) return;
    const std::vector<ExtRational> dS = distances_to_open(inst, params, S);
    for (int i = 0; i < inst.m; ++i) {
      Rational bids = 0;
      for (int j = 0; j < inst.n; ++j) {
        bids += active[j] ? PositivePart(theta - inst.cf(j, i))
                          : PositivePart(keep * dS[j].value() - inst.cf(j, i));
      }
      if (bids > params.fhat) {
        fail("overbid on i" + std::to_string(i) + " " + where);
      }
    }
    Rational paid = 0;
    Rational owed = threshold * regular_count();
    for (int j = 0; j < inst.n; ++j) {
      if (active[j]) continue;
      paid += out.alpha[j];
      owed += keep * dS[j].value();
    }
    if (paid < owed) fail("inactive payments fall short " + where);
  };
  auto deactivate = [&](const Rational& theta) {
    const std::vector<ExtRational> dS = distances_to_open(inst, params, S);
    for (int j = 0; j < inst.n; ++j) {
      if (!active[j]) continue;
      if (theta >= dS[j].Scaled(keep)) {
        active[j] = false;
        out.alpha[j] = keep * dS[j].value();
      } else {
        out.alpha[j] = theta;
      }
    }
  };
  auto maximal_at = [&](int q) {
    const View v = MakeView(inst, params, clock.Theta(q), S);
    for (int i = 0; i < inst.m; ++i) {
      if (OpenAsRegular(S, i)) continue;
      if (MaxPayment(inst, params, v, i) < params.fhat) continue;
      if (Openable(inst, params, v, i, Rational(0))) {
        fail("phase " + std::to_string(q) + " not maximal: i" +
             std::to_string(i) + " openable");
      }
    }
  };
  auto maximal_stretch = [&](int lo, int hi) {
    if (report == nullptr || !options.check_maximality || lo > hi) return;
    const std::vector<ExtRational> dS = distances_to_open(inst, params, S);
    std::optional<int> first = clock.FirstPayable(lo, hi, S, dS);
    if (!first) return;
    for (int q = *first; q <= hi; ++q) maximal_at(q);
  };

  int previous = 0;
  for (const PhaseSequence& seq : trace.phases) {
    const int q = seq.phase;
    if (q <= previous || q > trace.L) {
      fail("phase " + std::to_string(q) + " out of order or beyond L");
      continue;
    }
    maximal_stretch(previous + 1, q - 1);
    const Rational& theta = clock.Theta(q);
    if (clock.Terminated(q - 1, distances_to_open(inst, params, S)) &&
        q > 1) {
      fail("phase " + std::to_string(q) + " runs after termination");
    }
    deactivate(theta);
    checkpoint(theta, "at start of phase " + std::to_string(q));
    if (seq.free_count() > 3) {
      fail("phase " + std::to_string(q) + " opens " +
           std::to_string(seq.free_count()) + " free facilities");
    }
    for (const Opening& o : seq.openings) {
      const FacilityRef& h = o.facility;
      const std::string where =
          "after " + ToString(h) + " in phase " + std::to_string(q);
      if (h.is_free()) {
        if (params.u.count(h.copy) == 0) {
          fail("free copy " + std::to_string(h.copy) + " has no offset");
          continue;
        }
        if (std::find(S.begin(), S.end(), h) != S.end()) {
          fail("free copy " + std::to_string(h.copy) + " opened twice");
        }
        S.push_back(h);
        const std::vector<ExtRational> dS =
            distances_to_open(inst, params, S);
        for (int j = 0; j < inst.n; ++j) {
          if (active[j] && theta >= dS[j].Scaled(keep)) active[j] = false;
        }
        checkpoint(theta, where);
        continue;
      }
      if (OpenAsRegular(S, h.base)) fail(ToString(h) + " opened twice");
      std::vector<FacilityRef> rest = o.superset;
      bool contains = true;
      for (const FacilityRef& x : S) {
        auto it = std::find(rest.begin(), rest.end(), x);
        if (it == rest.end()) {
          contains = false;
          break;
        }
        rest.erase(it);
      }
      if (!contains) fail("superset of " + ToString(h) + " misses the prefix");
      Bids tau = o.tau;
      const std::vector<std::string> problems =
          check_bids(inst, params, theta, o.superset, h.base, tau, eta);
      if (!problems.empty()) {
        std::optional<Bids> other =
            is_openable(inst, params, theta, o.superset, h.base, eta);
        if (other) {
          tau = *other;
        } else {
          fail(ToString(h) + " in phase " + std::to_string(q) +
               " is not openable: " + problems.front());
        }
      }
      for (const auto& [j, value] : tau) {
        if (j >= 0 && j < inst.n && active[j]) out.alpha[j] = value;
      }
      S.push_back(h);
      const std::vector<ExtRational> dS = distances_to_open(inst, params, S);
      for (int j = 0; j < inst.n; ++j) {
        if (active[j] && out.alpha[j] >= dS[j].Scaled(keep)) active[j] = false;
      }
      checkpoint(theta, where);
    }
    if (report != nullptr && options.check_maximality) maximal_at(q);
    previous = q;
  }
  maximal_stretch(previous + 1, trace.L);
  const std::vector<ExtRational> final_dS = distances_to_open(inst, params, S);
  if (options.require_solution && previous < trace.L && trace.L > 1 &&
      clock.Terminated(trace.L - 1, final_dS)) {
    fail("trace continues past termination");
  }
  const Rational& end = clock.Theta(trace.L + 1);
  deactivate(end);
  out.solution = std::find(active.begin(), active.end(), true) == active.end();
  for (int j = 0; j < inst.n; ++j) {
    if (active[j]) out.alpha[j] = end;
  }
  out.S = S;
  if (report == nullptr) return out;
  if (options.require_solution && !out.solution) {
    fail("clients remain active after phase " + std::to_string(trace.L));
  }
  checkpoint(end, "at the end");
  for (int i = 0; i < inst.m; ++i) {
    Rational load = 0;
    for (int j = 0; j < inst.n; ++j) {
      load += PositivePart(out.alpha[j] - 2 * inst.cf(j, i));
    }
    if (load > params.fhat) {
      fail("final dual infeasible at i" + std::to_string(i));
    }
  }
  if (options.ufl_value && out.solution && !S.empty()) {
    Rational connection = 0;
    for (const ExtRational& d : final_dS) connection += d.value();
    const Rational bound = 2 / keep *
                           (*options.ufl_value -
                            (params.f - eta * inst.n) * regular_count());
    if (connection > bound) fail("LMP bound violated");
  }
  if (options.phase_budget > 0 && trace.L > options.phase_budget) {
    fail("phase count " + std::to_string(trace.L) + " exceeds budget " +
         std::to_string(options.phase_budget));
  }
  return out;
}

}  // namespace

LogAdaptiveResult run_log_adaptive(const MetricInstance& inst,
                                   const Rational& f,
                                   const Rational& epsilon) {
  if (inst.m < 1) throw std::invalid_argument("no facilities");
  ParamSet params = ParamSet::Make(f, epsilon, Rational(0));
  ExecutionTrace empty;
  empty.params = params;
  LogAdaptiveResult out;
  out.trace = complete_solution(inst, params, empty);
  const Replay replay = replay_trace(inst, params, out.trace, Rational(0));
  out.alpha_star = replay.alpha;
  for (const FacilityRef& h : replay.S) out.S_star.push_back(h.base);
  return out;
}

Replay replay_trace(const MetricInstance& inst, const ParamSet& params,
                    const ExecutionTrace& trace, const Rational& eta) {
  return Walk(inst, params, trace, eta, TraceAuditOptions{}, nullptr);
}

AuditReport audit_trace(const MetricInstance& inst, const ParamSet& params,
                        const ExecutionTrace& trace, const Rational& eta,
                        const TraceAuditOptions& options) {
  AuditReport report;
  Walk(inst, params, trace, eta, options, &report);
  return report;
}

}  // namespace kmedkit
