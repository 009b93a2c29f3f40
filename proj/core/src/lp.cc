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

#include "kmedkit/lp.h"

#include <stdexcept>

namespace kmedkit {

int LinearSystem::AddVariable(const Rational& lo, const Rational& hi) {
  lower.push_back(lo);
  upper.push_back(hi);
  return num_variables() - 1;
}

void LinearSystem::AddRow(std::vector<std::pair<int, Rational>> coeffs,
                          Relation relation, const Rational& rhs) {
  rows.push_back(LinearRow{std::move(coeffs), relation, rhs});
}

std::vector<std::string> LinearSystem::Validate() const {
  std::vector<std::string> out;
  if (lower.size() != upper.size()) out.push_back("bound arrays differ");
  for (int v = 0; v < num_variables(); ++v) {
    if (upper[v] < lower[v]) {
      out.push_back("empty box on variable " + std::to_string(v));
    }
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [v, a] : rows[r].coeffs) {
      if (v < 0 || v >= num_variables()) {
        out.push_back("row " + std::to_string(r) + " names variable " +
                      std::to_string(v));
      }
    }
  }
  return out;
}

bool LinearSystem::Satisfies(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != num_variables()) return false;
  for (int v = 0; v < num_variables(); ++v) {
    if (x[v] < lower[v] || x[v] > upper[v]) return false;
  }
  for (const LinearRow& row : rows) {
    Rational lhs = 0;
    for (const auto& [v, a] : row.coeffs) lhs += a * x[v];
    switch (row.relation) {
      case Relation::kLe:
        if (lhs > row.rhs) return false;
        break;
      case Relation::kGe:
        if (lhs < row.rhs) return false;
        break;
      case Relation::kEq:
        if (lhs != row.rhs) return false;
        break;
    }
  }
  return true;
}

namespace {

// Phase-1 tableau for A y = b, y >= 0, b >= 0, minimizing the sum of the
// artificial columns. Pivoting follows Bland's rule.
class Phase1 {
 public:
  Phase1(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
         std::vector<int> basis, int first_artificial)
      : a_(std::move(a)),
        b_(std::move(b)),
        basis_(std::move(basis)),
        first_artificial_(first_artificial) {}

  // Returns true iff the optimum is zero.
  bool Solve() {
    const int cols = a_.empty() ? 0 : static_cast<int>(a_[0].size());
    const int rows = static_cast<int>(a_.size());
    std::vector<Rational> reduced(cols, Rational(0));
    Rational objective = 0;
    for (int c = first_artificial_; c < cols; ++c) reduced[c] = 1;
    for (int r = 0; r < rows; ++r) {
      if (basis_[r] < first_artificial_) continue;
      for (int c = 0; c < cols; ++c) reduced[c] -= a_[r][c];
      objective -= b_[r];
    }
    while (true) {
      int enter = -1;
      for (int c = 0; c < cols; ++c) {
        if (sgn(reduced[c]) < 0) {
          enter = c;
          break;
        }
      }
      if (enter < 0) break;
      int leave = -1;
      Rational best;
      for (int r = 0; r < rows; ++r) {
        if (sgn(a_[r][enter]) <= 0) continue;
        Rational ratio = b_[r] / a_[r][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      // The phase-1 objective is bounded below by zero.
      if (leave < 0) throw std::logic_error("unbounded phase-1 direction");
      Pivot(leave, enter, &reduced, &objective);
    }
    return sgn(objective) == 0;
  }

  std::vector<Rational> Values(int count) const {
    std::vector<Rational> y(count, Rational(0));
    for (size_t r = 0; r < basis_.size(); ++r) {
      if (basis_[r] < count) y[basis_[r]] = b_[r];
    }
    return y;
  }

 private:
  void Pivot(int leave, int enter, std::vector<Rational>* reduced,
             Rational* objective) {
    const int cols = static_cast<int>(a_[leave].size());
    const Rational pivot = a_[leave][enter];
    for (int c = 0; c < cols; ++c) a_[leave][c] /= pivot;
    b_[leave] /= pivot;
    for (size_t r = 0; r < a_.size(); ++r) {
      if (static_cast<int>(r) == leave || sgn(a_[r][enter]) == 0) continue;
      const Rational factor = a_[r][enter];
      for (int c = 0; c < cols; ++c) {
        if (sgn(a_[leave][c]) != 0) a_[r][c] -= factor * a_[leave][c];
      }
      b_[r] -= factor * b_[leave];
    }
    const Rational factor = (*reduced)[enter];
    for (int c = 0; c < cols; ++c) {
      if (sgn(a_[leave][c]) != 0) (*reduced)[c] -= factor * a_[leave][c];
    }
    *objective -= factor * b_[leave];
    basis_[leave] = enter;
  }

  std::vector<std::vector<Rational>> a_;
  std::vector<Rational> b_;
  std::vector<int> basis_;
  int first_artificial_;
};

struct StandardRow {
  std::vector<Rational> coeffs;
  Relation relation;
  Rational rhs;
};

}  // namespace

std::optional<std::vector<Rational>> solve_feasibility(
    const LinearSystem& sys) {
  const std::vector<std::string> problems = sys.Validate();
  if (!problems.empty()) {
    throw std::invalid_argument("malformed system: " + problems.front());
  }
  if (sys.Satisfies(sys.lower)) return sys.lower;
  const int nv = sys.num_variables();

  // Shift to y = x - lower and add the upper bounds as rows.
  std::vector<StandardRow> rows;
  for (const LinearRow& row : sys.rows) {
    StandardRow s{std::vector<Rational>(nv, Rational(0)), row.relation,
                  row.rhs};
    for (const auto& [v, a] : row.coeffs) {
      s.coeffs[v] += a;
      s.rhs -= a * sys.lower[v];
    }
    rows.push_back(std::move(s));
  }
  for (int v = 0; v < nv; ++v) {
    StandardRow s{std::vector<Rational>(nv, Rational(0)), Relation::kLe,
                  sys.upper[v] - sys.lower[v]};
    s.coeffs[v] = 1;
    rows.push_back(std::move(s));
  }

  int slacks = 0;
  for (const StandardRow& s : rows) {
    if (s.relation != Relation::kEq) ++slacks;
  }
  // A row keeps its slack basic when the slack enters with +1 after the
  // sign normalization of the right-hand side.
  std::vector<int> slack_col(rows.size(), -1);
  std::vector<bool> needs_artificial(rows.size(), true);
  int next_slack = nv;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].relation == Relation::kEq) continue;
    slack_col[r] = next_slack++;
    const int sign = rows[r].relation == Relation::kLe ? 1 : -1;
    const int rhs_sign = sgn(rows[r].rhs) < 0 ? -1 : 1;
    needs_artificial[r] = sign * rhs_sign < 0;
  }
  int artificials = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (needs_artificial[r]) ++artificials;
  }
  const int cols = nv + slacks + artificials;
  std::vector<std::vector<Rational>> a(
      rows.size(), std::vector<Rational>(cols, Rational(0)));
  std::vector<Rational> b(rows.size());
  std::vector<int> basis(rows.size());
  int next_artificial = nv + slacks;
  for (size_t r = 0; r < rows.size(); ++r) {
    const int rhs_sign = sgn(rows[r].rhs) < 0 ? -1 : 1;
    for (int v = 0; v < nv; ++v) a[r][v] = rhs_sign * rows[r].coeffs[v];
    if (slack_col[r] >= 0) {
      const int sign = rows[r].relation == Relation::kLe ? 1 : -1;
      a[r][slack_col[r]] = sign * rhs_sign;
    }
    b[r] = rhs_sign * rows[r].rhs;
    if (needs_artificial[r]) {
      a[r][next_artificial] = 1;
      basis[r] = next_artificial++;
    } else {
      basis[r] = slack_col[r];
    }
  }
  Phase1 tableau(std::move(a), std::move(b), std::move(basis), nv + slacks);
  if (!tableau.Solve()) return std::nullopt;
  std::vector<Rational> x = tableau.Values(nv);
  for (int v = 0; v < nv; ++v) x[v] += sys.lower[v];
  if (!sys.Satisfies(x)) throw std::logic_error("phase-1 witness rejected");
  return x;
}

}  // namespace kmedkit
