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


#include "kmedkit/io.h"

#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace kmedkit {
namespace {

using Json = nlohmann::ordered_json;

Json FromRational(const Rational& value) { return FormatRational(value); }

Rational ToRational(const Json& value, const char* what) {
  if (!value.is_string()) {
    throw ParseError(std::string(what) + ": expected a \"p/q\" string");
  }
  try {
    return ParseRational(value.get<std::string>());
  } catch (const std::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

int ToIndex(const std::string& key) {
  try {
    size_t used = 0;
    const int value = std::stoi(key, &used);
    if (used == key.size()) return value;
  } catch (const std::exception&) {
  }
  throw ParseError("bad index key \"" + key + "\"");
}

Json Parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  }
}

const Json& Field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(std::string("missing field \"") + key + "\"");
  }
  return obj.at(key);
}

template <typename T>
T Get(const Json& obj, const char* key) {
  try {
    return Field(obj, key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(key) + ": " + e.what());
  }
}

Json RefToJson(const FacilityRef& ref) {
  Json out;
  out["kind"] = ref.is_free() ? "free" : "regular";
  out["base"] = ref.base;
  if (ref.is_free()) out["copy"] = ref.copy;
  return out;
}

FacilityRef RefFromJson(const Json& obj) {
  const std::string kind = Get<std::string>(obj, "kind");
  const int base = Get<int>(obj, "base");
  if (kind == "regular") return FacilityRef::Regular(base);
  if (kind == "free") return FacilityRef::Free(Get<int>(obj, "copy"), base);
  throw ParseError("unknown facility kind \"" + kind + "\"");
}

Json ParamsToJson(const ParamSet& p) {
  Json out;
  out["f"] = FromRational(p.f);
  out["fhat"] = FromRational(p.fhat);
  out["epsilon"] = FromRational(p.epsilon);
  out["delta"] = FromRational(p.delta);
  out["eta"] = FromRational(p.eta);
  Json u = Json::object();
  for (const auto& [copy, value] : p.u) {
    u[std::to_string(copy)] = FromRational(value);
  }
  out["u"] = u;
  return out;
}

ParamSet ParamsFromJson(const Json& obj) {
  ParamSet p;
  p.f = ToRational(Field(obj, "f"), "f");
  p.fhat = ToRational(Field(obj, "fhat"), "fhat");
  p.epsilon = ToRational(Field(obj, "epsilon"), "epsilon");
  p.delta = ToRational(Field(obj, "delta"), "delta");
  p.eta = ToRational(Field(obj, "eta"), "eta");
  for (const auto& [key, value] : Field(obj, "u").items()) {
    p.u[ToIndex(key)] = ToRational(value, "u");
  }
  return p;
}

}  // namespace

std::string instance_to_json(const MetricInstance& inst) {
  Json out;
  out["n"] = inst.n;
  out["m"] = inst.m;
  Json rows = Json::array();
  for (int a = 0; a < inst.points(); ++a) {
    Json row = Json::array();
    for (int b = 0; b < inst.points(); ++b) {
      row.push_back(FromRational(inst.d(a, b)));
    }
    rows.push_back(std::move(row));
  }
  out["dist"] = std::move(rows);
  out["labels"] = Json{{"name", inst.label}};
  return out.dump(1) + "\n";
}

MetricInstance instance_from_json(std::string_view text) {
  const Json doc = Parse(text);
  const int n = Get<int>(doc, "n");
  const int m = Get<int>(doc, "m");
  if (n < 1 || m < 1) throw ParseError("n and m must be positive");
  MetricInstance inst = MetricInstance::Zero(n, m);
  const Json& rows = Field(doc, "dist");
  if (!rows.is_array() || static_cast<int>(rows.size()) != inst.points()) {
    throw ParseError("dist must have n + m rows");
  }
  for (int a = 0; a < inst.points(); ++a) {
    const Json& row = rows[a];
    if (!row.is_array() || static_cast<int>(row.size()) != inst.points()) {
      throw ParseError("dist row " + std::to_string(a) + " has wrong length");
    }
    for (int b = 0; b < inst.points(); ++b) {
      inst.dist[a * inst.points() + b] = ToRational(row[b], "dist");
    }
  }
  if (doc.contains("labels")) {
    const Json& labels = doc.at("labels");
    if (labels.is_object() && labels.contains("name") &&
        labels.at("name").is_string()) {
      inst.label = labels.at("name").get<std::string>();
    }
  }
  return inst;
}

std::string trace_to_json(const ExecutionTrace& trace) {
  Json out;
  out["params"] = ParamsToJson(trace.params);
  out["L"] = trace.L;
  Json phases = Json::array();
  for (const PhaseSequence& seq : trace.phases) {
    Json openings = Json::array();
    for (const Opening& o : seq.openings) {
      Json entry = RefToJson(o.facility);
      Json tau = Json::object();
      for (const auto& [client, bid] : o.tau) {
        tau[std::to_string(client)] = FromRational(bid);
      }
      entry["tau"] = tau;
      Json superset = Json::array();
      for (const FacilityRef& h : o.superset) superset.push_back(RefToJson(h));
      entry["superset"] = superset;
      openings.push_back(std::move(entry));
    }
    phases.push_back(Json{{"phase", seq.phase}, {"openings", openings}});
  }
  out["phases"] = std::move(phases);
  return out.dump(1) + "\n";
}

ExecutionTrace trace_from_json(std::string_view text) {
  const Json doc = Parse(text);
  ExecutionTrace trace;
  trace.params = ParamsFromJson(Field(doc, "params"));
  trace.L = Get<int>(doc, "L");
  for (const Json& phase : Field(doc, "phases")) {
    PhaseSequence seq;
    seq.phase = Get<int>(phase, "phase");
    for (const Json& entry : Field(phase, "openings")) {
      Opening o;
      o.facility = RefFromJson(entry);
      for (const auto& [key, value] : Field(entry, "tau").items()) {
        o.tau[ToIndex(key)] = ToRational(value, "tau");
      }
      for (const Json& h : Field(entry, "superset")) {
        o.superset.push_back(RefFromJson(h));
      }
      seq.openings.push_back(std::move(o));
    }
    trace.phases.push_back(std::move(seq));
  }
  return trace;
}

std::string caps_to_json(const StableCaps& caps) {
  Json out;
  out["sample_cap"] = caps.sample_cap;
  out["max_balls"] = caps.max_balls;
  out["radius_mode"] = caps.radius_mode == RadiusMode::kGrid ? "grid" : "tight";
  out["ball_family_cap"] = caps.ball_family_cap;
  out["exp_outer_cap"] = caps.exp_outer_cap;
  out["r0_cap"] = caps.r0_cap;
  out["restarts"] = caps.restarts;
  out["candidate_cap"] = caps.candidate_cap;
  out["threads"] = caps.threads;
  return out.dump(1) + "\n";
}

StableCaps caps_from_json(std::string_view text, StableCaps base) {
  const Json doc = Parse(text);
  if (!doc.is_object()) throw ParseError("caps must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "sample_cap") {
        base.sample_cap = value.get<uint64_t>();
      } else if (key == "max_balls") {
        base.max_balls = value.get<int>();
      } else if (key == "radius_mode") {
        const std::string mode = value.get<std::string>();
        if (mode != "grid" && mode != "tight") {
          throw ParseError("radius_mode must be \"grid\" or \"tight\"");
        }
        base.radius_mode =
            mode == "grid" ? RadiusMode::kGrid : RadiusMode::kTight;
      } else if (key == "ball_family_cap") {
        base.ball_family_cap = value.get<uint64_t>();
      } else if (key == "exp_outer_cap") {
        base.exp_outer_cap = value.get<uint64_t>();
      } else if (key == "r0_cap") {
        base.r0_cap = value.get<int>();
      } else if (key == "restarts") {
        base.restarts = value.get<int>();
      } else if (key == "candidate_cap") {
        base.candidate_cap = value.get<uint64_t>();
      } else if (key == "threads") {
        base.threads = value.get<int>();
      } else {
        throw ParseError("unknown caps key \"" + key + "\"");
      }
    } catch (const Json::exception& e) {
      throw ParseError(key + ": " + e.what());
    }
  }
  return base;
}

}  // namespace kmedkit
