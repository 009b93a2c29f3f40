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

#include "kmedkit/oracle.h"

#include <algorithm>
#include <limits>

namespace kmedkit {

Rational cost(const MetricInstance& inst, const std::vector<FacilityRef>& S,
              const ParamSet& params) {
  if (S.empty()) throw std::invalid_argument("cost of an empty set");
  Rational total = 0;
  for (int j = 0; j < inst.n; ++j) {
    Rational best = client_distance(inst, params, j, S[0]);
    for (size_t t = 1; t < S.size(); ++t) {
      best = std::min(best, client_distance(inst, params, j, S[t]));
    }
    total += best;
  }
  return total;
}

Rational cost(const MetricInstance& inst, const std::vector<int>& S) {
  if (S.empty()) throw std::invalid_argument("cost of an empty set");
  Rational total = 0;
  for (int j = 0; j < inst.n; ++j) {
    const Rational* best = &inst.cf(j, S[0]);
    for (size_t t = 1; t < S.size(); ++t) {
      if (inst.cf(j, S[t]) < *best) best = &inst.cf(j, S[t]);
    }
    total += *best;
  }
  return total;
}

std::vector<ExtRational> nearest_distances(const MetricInstance& inst,
                                           const std::vector<int>& S) {
  std::vector<ExtRational> out(inst.n);
  for (int j = 0; j < inst.n; ++j) {
    for (int i : S) out[j] = Min(out[j], ExtRational(inst.cf(j, i)));
  }
  return out;
}

uint64_t binomial(int m, int k) {
  if (k < 0 || k > m) return 0;
  k = std::min(k, m - k);
  unsigned __int128 r = 1;
  for (int t = 1; t <= k; ++t) {
    r = r * (m - k + t) / t;
    if (r > std::numeric_limits<uint64_t>::max()) {
      return std::numeric_limits<uint64_t>::max();
    }
  }
  return static_cast<uint64_t>(r);
}

namespace {

// Depth-first subset enumeration carrying per-client nearest distances.
class SubsetSearch {
 public:
  SubsetSearch(const MetricInstance& inst, int size, const Rational& per_open)
      : inst_(inst), size_(size), per_open_(per_open) {}

  OracleResult Run() {
    std::vector<Rational> nearest;
    Recurse(0, nearest);
    return std::move(result_);
  }

 private:
  void Recurse(int next, const std::vector<Rational>& nearest) {
    const int chosen = static_cast<int>(current_.size());
    if (size_ < 0 ? chosen > 0 : chosen == size_) {
      Rational total = per_open_ * chosen;
      for (const Rational& v : nearest) total += v;
      ++result_.enumerated;
      if (!found_ || total < result_.value) {
        found_ = true;
        result_.value = total;
        result_.witness = current_;
      }
      if (size_ >= 0) return;
    }
    if (size_ >= 0 && inst_.m - next < size_ - chosen) return;
    for (int i = next; i < inst_.m; ++i) {
      std::vector<Rational> updated(inst_.n);
      for (int j = 0; j < inst_.n; ++j) {
        updated[j] = chosen == 0 ? inst_.cf(j, i)
                                 : std::min(nearest[j], inst_.cf(j, i));
      }
      current_.push_back(i);
      Recurse(i + 1, updated);
      current_.pop_back();
    }
  }

  const MetricInstance& inst_;
  int size_;
  Rational per_open_;
  std::vector<int> current_;
  bool found_ = false;
  OracleResult result_;
};

}  // namespace

OracleResult brute_force_kmedian(const MetricInstance& inst, int k,
                                 uint64_t cap) {
  if (k < 1 || k > inst.m) throw std::invalid_argument("k outside [1, m]");
  const uint64_t count = binomial(inst.m, k);
  if (count > cap) {
    throw CapExceeded("C(" + std::to_string(inst.m) + "," +
                      std::to_string(k) + ") = " + std::to_string(count) +
                      " exceeds cap " + std::to_string(cap));
  }
  return SubsetSearch(inst, k, Rational(0)).Run();
}

OracleResult brute_force_ufl(const MetricInstance& inst, const Rational& f,
                             uint64_t cap) {
  if (inst.m >= 63 || (uint64_t{1} << inst.m) > cap) {
    throw CapExceeded("2^" + std::to_string(inst.m) + " exceeds cap " +
                      std::to_string(cap));
  }
  return SubsetSearch(inst, -1, f).Run();
}

LmpReport verify_lmp_certificate(const MetricInstance& inst,
                                 const Rational& f, const std::vector<int>& S,
                                 const std::vector<Rational>& alpha,
                                 const Rational& factor, const Rational& eta) {
  LmpReport report;
  for (int i = 0; i < inst.m; ++i) {
    Rational paid = 0;
    for (int j = 0; j < inst.n; ++j) {
      paid += PositivePart(alpha[j] / 2 - inst.cf(j, i));
    }
    if (paid > f) {
      report.dual_feasible = false;
      report.failures.push_back("dual infeasible at facility " +
                                std::to_string(i) + ": " +
                                FormatRational(paid) + " > " +
                                FormatRational(f));
    }
  }
  Rational sum_alpha = 0;
  for (const Rational& a : alpha) sum_alpha += a;
  const Rational connection = S.empty() ? Rational(0) : cost(inst, S);
  const Rational size(static_cast<long>(S.size()));
  const Rational lower =
      2 / factor * connection + size * (2 * f - inst.n * eta);
  if (sum_alpha < lower) {
    report.payment = false;
    report.failures.push_back("payment " + FormatRational(sum_alpha) +
                              " < " + FormatRational(lower));
  }
  report.payment_exact = sum_alpha == connection + size * 2 * f;
  try {
    const OracleResult ufl = brute_force_ufl(inst, f);
    const bool bound = connection <= factor * (ufl.value - f * size);
    report.lmp_bound = bound;
    if (!bound) {
      report.failures.push_back("cost " + FormatRational(connection) +
                                " exceeds LMP bound");
    }
  } catch (const CapExceeded&) {
    report.lmp_bound.reset();
  }
  return report;
}

}  // namespace kmedkit
