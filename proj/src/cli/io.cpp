// Copyright 2026 The fair-screen Authors
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

#include "fairscreen/cli/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fairscreen/errors.hpp"
#include "fairscreen/fairness.hpp"

namespace fairscreen::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kParseError, path + ": " + message);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path + "." + key, "expected a finite number");
  return d;
}

const json& array(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "expected a non-empty array");
  return v;
}

std::string text(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

json fairness_json(const FairnessReport& r) {
  return {{"satisfied", r.satisfied},
          {"max_gap", r.max_gap},
          {"stage", r.stage + 1},
          {"witness", {r.witness.first, r.witness.second}}};
}

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

PipelineSpec parse_pipeline(const json& doc) {
  const json& groups = array(doc, "$", "groups");
  std::vector<Group> parsed;
  double total = 0.0;
  for (std::size_t x = 0; x < groups.size(); ++x) {
    const std::string path = "$.groups[" + std::to_string(x) + "]";
    const json& g = groups[x];
    Group group;
    group.id = text(g, path, "id");
    if (g.contains("q") || g.contains("u")) {
      if (g.contains("weight")) fail(path, "give either q/u or weight/base_rate, not both");
      group.q = number(g, path, "q");
      group.u = number(g, path, "u");
    } else {
      const double weight = number(g, path, "weight");
      const double base = number(g, path, "base_rate");
      if (weight <= 0.0) fail(path + ".weight", "must be positive");
      if (base <= 0.0 || base > 1.0) fail(path + ".base_rate", "must lie in (0,1]");
      group.q = weight * base;
      group.u = weight * (1.0 - base);
    }
    if (group.q <= 0.0) fail(path + ".q", "qualified mass must be positive");
    if (group.u < 0.0) fail(path + ".u", "unqualified mass must be nonnegative");
    const json& stages = array(g, path, "stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const std::string sp = path + ".stages[" + std::to_string(i) + "]";
      group.stages.push_back({number(stages[i], sp, "tau1"), number(stages[i], sp, "tau0")});
    }
    total += group.q + group.u;
    parsed.push_back(std::move(group));
  }
  for (Group& g : parsed) {
    g.q /= total;
    g.u /= total;
  }
  std::optional<double> tolerance;
  if (doc.contains("tolerance")) {
    tolerance = number(doc, "$", "tolerance");
    if (*tolerance < 0.0) fail("$.tolerance", "must be nonnegative");
  }
  try {
    return {Pipeline(std::move(parsed)), tolerance};
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, std::string("$.groups: ") + e.what());
  }
}

PipelineSpec load_pipeline(const std::string& path) {
  try {
    return parse_pipeline(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError && std::string(e.what()).rfind(path, 0) != 0) {
      throw Error(ErrorCode::kParseError, path + ": " + e.what());
    }
    throw;
  }
}

Policy parse_policy(const json& doc) {
  const json& groups = array(doc, "$", "groups");
  Policy policy;
  for (std::size_t x = 0; x < groups.size(); ++x) {
    const std::string path = "$.groups[" + std::to_string(x) + "]";
    GroupPolicy gp;
    gp.id = text(groups[x], path, "id");
    const json& stages = array(groups[x], path, "stages");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const std::string sp = path + ".stages[" + std::to_string(i) + "]";
      gp.stages.push_back({number(stages[i], sp, "pi1"), number(stages[i], sp, "pi0")});
    }
    policy.groups.push_back(std::move(gp));
  }
  return policy;
}

Policy load_policy(const std::string& path) {
  try {
    return parse_policy(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError && std::string(e.what()).rfind(path, 0) != 0) {
      throw Error(ErrorCode::kParseError, path + ": " + e.what());
    }
    throw;
  }
}

json to_json(const Pipeline& pipeline) {
  json groups = json::array();
  for (const Group& g : pipeline.groups()) {
    json stages = json::array();
    for (const TestStats& t : g.stages) stages.push_back({{"tau1", t.tau1}, {"tau0", t.tau0}});
    groups.push_back({{"id", g.id}, {"q", g.q}, {"u", g.u}, {"stages", stages}});
  }
  return {{"groups", groups}};
}

json to_json(const Policy& policy) {
  json groups = json::array();
  for (const GroupPolicy& g : policy.groups) {
    json stages = json::array();
    for (const StagePolicy& s : g.stages) stages.push_back({{"pi1", s.pi1}, {"pi0", s.pi0}});
    groups.push_back({{"id", g.id}, {"stages", stages}});
  }
  return {{"groups", groups}};
}

json to_json(const Pipeline& pipeline, const SolverReport& report, double tolerance) {
  json doc = to_json(report.policy);
  for (json& g : doc["groups"]) {
    const auto x = pipeline.find(g["id"].get<std::string>());
    const GroupRates& r = report.evaluation.groups.at(*x);
    g["tpr"] = r.tpr;
    g["fpr"] = r.fpr;
  }
  doc["method"] = report.method;
  doc["objective"] = {{"kind", report.objective.name()}, {"alpha", report.objective.alpha()}};
  doc["eps"] = report.eps ? json(*report.eps) : json(nullptr);
  doc["recall"] = report.evaluation.recall;
  doc["precision"] = report.evaluation.precision ? json(*report.evaluation.precision)
                                                 : json(nullptr);
  doc["score"] = report.score;
  doc["certificate"] = report.certificate;
  doc["tolerance"] = tolerance;
  doc["fairness"] = {
      {"eo",
       {{"final", fairness_json(check_eo(pipeline, report.policy, tolerance, Scope::kFinal))},
        {"per_stage",
         fairness_json(check_eo(pipeline, report.policy, tolerance, Scope::kPerStage))}}},
      {"eodds",
       {{"final",
         fairness_json(check_eodds(pipeline, report.policy, tolerance, Scope::kFinal))},
        {"per_stage",
         fairness_json(check_eodds(pipeline, report.policy, tolerance, Scope::kPerStage))}}}};
  json diagnostics = json::object();
  for (const auto& [key, value] : report.diagnostics) diagnostics[key] = value;
  doc["diagnostics"] = diagnostics;
  return doc;
}

std::string render_table(const Pipeline& pipeline, const SolverReport& report,
                         double tolerance) {
  std::ostringstream os;
  os << "method     " << report.method << "\n";
  os << "objective  " << report.objective.name();
  if (report.objective.kind() != Objective::Kind::kCustom) {
    os << " (alpha " << fixed(report.objective.alpha()) << ")";
  }
  os << "\n";
  if (report.eps) os << "eps        " << fixed(*report.eps) << "\n";
  if (!report.certificate.empty()) os << "certificate " << report.certificate << "\n";
  os << "\n";
  os << std::left << std::setw(12) << "group" << std::setw(7) << "stage" << std::right
     << std::setw(10) << "pi1" << std::setw(10) << "pi0" << "\n";
  for (const GroupPolicy& g : report.policy.groups) {
    for (std::size_t i = 0; i < g.stages.size(); ++i) {
      os << std::left << std::setw(12) << (i == 0 ? g.id : "") << std::setw(7) << i + 1
         << std::right << std::setw(10) << fixed(g.stages[i].pi1) << std::setw(10)
         << fixed(g.stages[i].pi0) << "\n";
    }
  }
  os << "\n"
     << std::left << std::setw(12) << "group" << std::right << std::setw(10) << "tpr"
     << std::setw(10) << "fpr" << "\n";
  for (const GroupRates& r : report.evaluation.groups) {
    os << std::left << std::setw(12) << r.id << std::right << std::setw(10) << fixed(r.tpr)
       << std::setw(10) << fixed(r.fpr) << "\n";
  }
  os << "\nrecall     " << fixed(report.evaluation.recall) << "\n";
  os << "precision  "
     << (report.evaluation.precision ? fixed(*report.evaluation.precision) : "undefined")
     << "\n";
  os << "score      " << fixed(report.score) << "\n\n";
  const auto line = [&](const char* label, const FairnessReport& r) {
    os << std::left << std::setw(20) << label << (r.satisfied ? "ok  " : "FAIL")
       << "  gap " << fixed(r.max_gap) << "\n";
  };
  line("EO final", check_eo(pipeline, report.policy, tolerance, Scope::kFinal));
  line("EO per-stage", check_eo(pipeline, report.policy, tolerance, Scope::kPerStage));
  line("EOdds final", check_eodds(pipeline, report.policy, tolerance, Scope::kFinal));
  line("EOdds per-stage", check_eodds(pipeline, report.policy, tolerance, Scope::kPerStage));
  if (!report.diagnostics.empty()) {
    os << "\n";
    for (const auto& [key, value] : report.diagnostics) {
      os << std::left << std::setw(24) << key << value << "\n";
    }
  }
  return os.str();
}

}  // namespace fairscreen::cli
