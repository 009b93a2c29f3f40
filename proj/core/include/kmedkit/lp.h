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

// Exact feasibility of boxed linear systems over the rationals.

#ifndef KMEDKIT_LP_H_
#define KMEDKIT_LP_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmedkit/rational.h"

namespace kmedkit {

enum class Relation { kLe, kGe, kEq };

struct LinearRow {
  std::vector<std::pair<int, Rational>> coeffs;
  Relation relation = Relation::kLe;
  Rational rhs;
};

struct LinearSystem {
  std::vector<Rational> lower;
  std::vector<Rational> upper;
  std::vector<LinearRow> rows;

  int num_variables() const { return static_cast<int>(lower.size()); }
  int AddVariable(const Rational& lo, const Rational& hi);
  void AddRow(std::vector<std::pair<int, Rational>> coeffs, Relation relation,
              const Rational& rhs);
  // Empty iff every coefficient names a declared variable and every box is
  // nonempty.
  std::vector<std::string> Validate() const;
  // True iff x lies in every box and satisfies every row exactly.
  bool Satisfies(const std::vector<Rational>& x) const;
};

// Feasible assignment, or nullopt when the system is infeasible. Throws
// std::invalid_argument on a malformed system.
std::optional<std::vector<Rational>> solve_feasibility(const LinearSystem& sys);

}  // namespace kmedkit

#endif  // KMEDKIT_LP_H_
