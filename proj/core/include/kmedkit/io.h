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


// JSON round-tripping of instances, execution traces and stable caps.
// Rationals are "p/q" strings; output is canonical (sorted keys, fixed
// layout), so equal inputs serialize to identical bytes.

#ifndef KMEDKIT_IO_H_
#define KMEDKIT_IO_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "kmedkit/log_adaptive.h"
#include "kmedkit/metric.h"
#include "kmedkit/stable.h"

namespace kmedkit {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"n", "m", "dist": (n + m) rows, clients first, "labels": {"name"}}.
std::string instance_to_json(const MetricInstance& inst);
// Checks shape and rational syntax; the metric axioms are left to
// validate_metric.
MetricInstance instance_from_json(std::string_view text);

// {"params", "L", "phases": [{"phase", "openings": [{"facility", "kind",
// "copy", "tau", "superset"}]}]}.
std::string trace_to_json(const ExecutionTrace& trace);
ExecutionTrace trace_from_json(std::string_view text);

std::string caps_to_json(const StableCaps& caps);
// Keys present in text override base. Unknown keys are rejected.
StableCaps caps_from_json(std::string_view text, StableCaps base = {});

}  // namespace kmedkit

#endif  // KMEDKIT_IO_H_
