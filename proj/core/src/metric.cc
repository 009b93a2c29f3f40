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

#include "kmedkit/metric.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace kmedkit {

MetricInstance MetricInstance::Zero(int n, int m) {
  MetricInstance inst;
  inst.n = n;
  inst.m = m;
  inst.dist.assign(static_cast<size_t>(n + m) * (n + m), Rational(0));
  return inst;
}

void MetricInstance::Set(int a, int b, const Rational& value) {
  const int p = n + m;
  dist[a * p + b] = value;
  dist[b * p + a] = value;
}

bool FacilityRef::operator<(const FacilityRef& o) const {
  return std::tie(kind, base, copy) < std::tie(o.kind, o.base, o.copy);
}

std::string ToString(const FacilityRef& ref) {
  if (!ref.is_free()) return "i" + std::to_string(ref.base);
  return "~" + std::to_string(ref.copy) + "(i" + std::to_string(ref.base) +
         ")";
}

ParamSet ParamSet::Make(const Rational& f, const Rational& epsilon,
                        const Rational& eta) {
  ParamSet p;
  p.SetFacilityCost(f);
  p.epsilon = epsilon;
  p.delta = 3 * epsilon;
  p.eta = eta;
  return p;
}

void ParamSet::SetFacilityCost(const Rational& cost) {
  f = cost;
  fhat = 2 * cost;
}

const Rational& ParamSet::offset(int copy) const {
  auto it = u.find(copy);
  if (it == u.end()) {
    throw MissingParameter("no offset for free copy " + std::to_string(copy));
  }
  return it->second;
}

std::vector<std::string> ParamSet::Validate(int n) const {
  std::vector<std::string> out;
  if (sgn(f) < 0) out.push_back("f < 0");
  if (fhat != 2 * f) out.push_back("fhat != 2f");
  if (sgn(epsilon) <= 0 || epsilon >= Rational(1, 6)) {
    out.push_back("epsilon outside (0, 1/6)");
  }
  if (delta != 3 * epsilon) out.push_back("delta != 3 epsilon");
  if (sgn(eta) <= 0) out.push_back("eta <= 0");
  if (n * eta >= 1) out.push_back("n * eta >= 1");
  for (const auto& [copy, value] : u) {
    if (sgn(value) < 0) out.push_back("u(" + std::to_string(copy) + ") < 0");
  }
  return out;
}

bool ParamSet::operator==(const ParamSet& o) const {
  return f == o.f && fhat == o.fhat && epsilon == o.epsilon &&
         delta == o.delta && eta == o.eta && u == o.u;
}

namespace {

int PointOf(const MetricInstance& inst, const Endpoint& e) {
  return e.is_client ? e.client : inst.facility_point(e.facility.base);
}

Rational OffsetOf(const ParamSet& params, const Endpoint& e) {
  if (e.is_client || !e.facility.is_free()) return Rational(0);
  return params.offset(e.facility.copy);
}

}  // namespace

Rational extended_distance(const MetricInstance& inst, const ParamSet& params,
                           const Endpoint& a, const Endpoint& b) {
  const bool same_free = !a.is_client && !b.is_client &&
                         a.facility.is_free() && a.facility == b.facility;
  if (same_free) return Rational(0);
  return OffsetOf(params, a) + inst.d(PointOf(inst, a), PointOf(inst, b)) +
         OffsetOf(params, b);
}

Rational client_distance(const MetricInstance& inst, const ParamSet& params,
                         int j, const FacilityRef& h) {
  if (!h.is_free()) return inst.cf(j, h.base);
  return params.offset(h.copy) + inst.cf(j, h.base);
}

std::vector<std::string> validate_metric(const MetricInstance& inst) {
  std::vector<std::string> out;
  const int p = inst.points();
  if (static_cast<int>(inst.dist.size()) != p * p) {
    out.push_back("table size mismatch");
    return out;
  }
  for (int a = 0; a < p; ++a) {
    if (inst.d(a, a) != 0) {
      out.push_back("nonzero diagonal at " + std::to_string(a));
    }
    for (int b = a + 1; b < p; ++b) {
      if (inst.d(a, b) != inst.d(b, a)) {
        out.push_back("asymmetric pair (" + std::to_string(a) + "," +
                      std::to_string(b) + ")");
      }
      if (sgn(inst.d(a, b)) < 0) {
        out.push_back("negative distance (" + std::to_string(a) + "," +
                      std::to_string(b) + ")");
      }
    }
  }
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      for (int c = 0; c < p; ++c) {
        if (c == a || c == b) continue;
        if (inst.d(a, b) > inst.d(a, c) + inst.d(c, b)) {
          std::ostringstream os;
          os << "triangle violated: d(" << a << "," << b << ") > d(" << a
             << "," << c << ") + d(" << c << "," << b << ")";
          out.push_back(os.str());
        }
      }
    }
  }
  return out;
}

void metric_closure(MetricInstance* inst) {
  const int p = inst->points();
  for (int c = 0; c < p; ++c) {
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        Rational via = inst->d(a, c) + inst->d(c, b);
        if (via < inst->d(a, b)) inst->dist[a * p + b] = via;
      }
    }
  }
}

Rational max_cross_distance(const MetricInstance& inst) {
  Rational best = 0;
  for (int j = 0; j < inst.n; ++j) {
    for (int i = 0; i < inst.m; ++i) best = std::max(best, inst.cf(j, i));
  }
  return best;
}

Rational max_pairwise_distance(const MetricInstance& inst) {
  Rational best = 0;
  for (const Rational& v : inst.dist) best = std::max(best, v);
  return best;
}

Rational nearest_facility_sum(const MetricInstance& inst) {
  Rational total = 0;
  for (int j = 0; j < inst.n; ++j) {
    Rational best = inst.cf(j, 0);
    for (int i = 1; i < inst.m; ++i) best = std::min(best, inst.cf(j, i));
    total += best;
  }
  return total;
}

MetricInstance normalize_with_guess(const MetricInstance& inst,
                                    const Rational& epsilon,
                                    const Rational& mguess) {
  if (sgn(epsilon) <= 0) throw std::invalid_argument("epsilon must be > 0");
  if (sgn(mguess) == 0) {
    for (int j = 0; j < inst.n; ++j) {
      for (int i = 0; i < inst.m; ++i) {
        if (sgn(inst.cf(j, i)) != 0) {
          throw DegenerateGuess("guess 0 with a nonzero client distance");
        }
      }
    }
  }
  const Rational n(inst.n);
  const Rational far(Ceil(Rational(n * n * n / epsilon)));
  const Rational scale =
      sgn(mguess) == 0 ? Rational(0) : n / (mguess * epsilon);
  MetricInstance out = MetricInstance::Zero(inst.n, inst.m);
  out.label = inst.label;
  const int p = inst.points();
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) out.Set(a, b, far);
  }
  for (int j = 0; j < inst.n; ++j) {
    for (int i = 0; i < inst.m; ++i) {
      const Rational& d = inst.cf(j, i);
      if (d <= mguess) {
        Rational v(Ceil(Rational(d * scale)));
        out.Set(j, inst.facility_point(i), std::max(v, Rational(1)));
      }
    }
  }
  metric_closure(&out);
  return out;
}

std::vector<std::pair<Rational, MetricInstance>> enumerate_normalizations(
    const MetricInstance& inst, const Rational& epsilon) {
  std::set<Rational> guesses;
  bool any_nonzero = false;
  for (int j = 0; j < inst.n; ++j) {
    for (int i = 0; i < inst.m; ++i) {
      guesses.insert(inst.cf(j, i));
      any_nonzero = any_nonzero || sgn(inst.cf(j, i)) != 0;
    }
  }
  std::vector<std::pair<Rational, MetricInstance>> out;
  for (const Rational& g : guesses) {
    if (sgn(g) == 0 && any_nonzero) continue;
    out.emplace_back(g, normalize_with_guess(inst, epsilon, g));
  }
  return out;
}

}  // namespace kmedkit
