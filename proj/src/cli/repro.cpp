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

#include "fairscreen/cli/repro.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "fairscreen/eodds.hpp"
#include "fairscreen/errors.hpp"
#include "fairscreen/exact.hpp"
#include "fairscreen/fairness.hpp"
#include "fairscreen/groupblind.hpp"
#include "fairscreen/oracle.hpp"
#include "fairscreen/ratio.hpp"

namespace fairscreen::cli {

namespace {

constexpr double kExactTol = 1e-12;
constexpr double kScoreTol = 1e-9;
constexpr std::size_t kScanResolution = 20001;

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

ReproCheck equals(std::string name, double actual, double expected, double tol,
                  std::string label) {
  return {std::move(name), label + " +/- " + num(tol), actual,
          std::fabs(actual - expected) <= tol};
}

ReproCheck below(std::string name, double actual, double bound) {
  return {std::move(name), "< " + num(bound), actual, actual < bound};
}

ReproCheck above(std::string name, double actual, double bound) {
  return {std::move(name), "> " + num(bound), actual, actual > bound};
}

ReproCheck within(std::string name, double actual, double lo, double hi) {
  return {std::move(name), "in [" + num(lo) + ", " + num(hi) + "]",
          actual, actual >= lo && actual <= hi};
}

Pipeline one_stage_pipeline() {
  return Pipeline({{"A", 0.25, 0.25, {{1.0, 0.5}}}, {"B", 0.25, 0.25, {{0.8, 0.5}}}});
}

Pipeline two_stage_pipeline(double fail_rate) {
  return Pipeline({{"A", 0.25, 0.25, {{0.75, 0.0}, {0.5, fail_rate}}},
                   {"B", 0.25, 0.25, {{0.5, fail_rate}, {0.75, 0.0}}}});
}

Pipeline nonlocal_pipeline(int stages) {
  Group g{"X", 0.5, 0.5, {{0.5, 0.0}}};
  for (int i = 1; i < stages; ++i) g.stages.push_back({0.99, 0.5});
  return Pipeline({g});
}

Policy make_policy(std::vector<StagePolicy> a, std::vector<StagePolicy> b) {
  return Policy{{{"A", std::move(a)}, {"B", std::move(b)}}};
}

double rate_of(const Evaluation& e, const char* id, bool tpr) {
  for (const GroupRates& r : e.groups) {
    if (r.id == id) return tpr ? r.tpr : r.fpr;
  }
  throw Error(ErrorCode::kInvalidInput, std::string("no group ") + id);
}

std::vector<ReproCheck> one_stage() {
  const Pipeline pl = one_stage_pipeline();
  std::vector<ReproCheck> out;
  const Policy pass_only = Policy::uniform(pl, StagePolicy::full_use());
  out.push_back(equals("promote-iff-pass EO gap",
                       check_eo(pl, pass_only, 1e-6, Scope::kFinal).max_gap, 0.2,
                       kExactTol, "0.2"));
  const Policy q_policy = make_policy({StagePolicy::full_use()}, {StagePolicy::bypass()});
  const auto q_check = check_eo(pl, q_policy, 1e-6, Scope::kFinal);
  out.push_back({"policy Q satisfies EO", "gap 0", q_check.max_gap, q_check.satisfied});
  const Policy ratio = opportunity_ratio(pl);
  out.push_back(equals("ratio pi1 for A", ratio.find("A")->stages[0].pi1, 0.8, kExactTol,
                       "0.8"));
  out.push_back(equals("ratio pi1 for B", ratio.find("B")->stages[0].pi1, 1.0, kExactTol,
                       "1"));
  const Evaluation ev = evaluate(pl, ratio);
  out.push_back(equals("ratio precision", ev.precision.value_or(0.0), 0.64, kScoreTol,
                       "0.64"));
  out.push_back(equals("max_precision", max_precision(pl), 0.64, kScoreTol, "0.64"));
  return out;
}

std::vector<ReproCheck> nonconvex() {
  const Pipeline pl = two_stage_pipeline(0.5);
  const std::vector<StagePolicy> a = {StagePolicy::full_use(), StagePolicy::bypass()};
  const Policy p = make_policy(a, {StagePolicy::bypass(), StagePolicy::full_use()});
  const Policy q = make_policy(a, {{1.0, 0.5}, StagePolicy::bypass()});
  const Policy mid = make_policy(a, {{1.0, 0.75}, {1.0, 0.5}});
  std::vector<ReproCheck> out;
  const auto p_check = check_eo(pl, p, 1e-9, Scope::kFinal);
  const auto q_check = check_eo(pl, q, 1e-9, Scope::kFinal);
  out.push_back({"policy P satisfies EO", "gap 0", p_check.max_gap, p_check.satisfied});
  out.push_back({"policy Q satisfies EO", "gap 0", q_check.max_gap, q_check.satisfied});
  const Evaluation ev = evaluate(pl, mid);
  out.push_back(equals("midpoint tpr A", rate_of(ev, "A", true), 0.75, kExactTol, "3/4"));
  out.push_back(
      equals("midpoint tpr B", rate_of(ev, "B", true), 49.0 / 64.0, kExactTol, "49/64"));
  const auto mid_check = check_eo(pl, mid, 1e-9, Scope::kFinal);
  out.push_back(equals("midpoint EO gap", mid_check.max_gap, 49.0 / 64.0 - 0.75, kExactTol,
                       "1/64"));
  out.push_back({"midpoint violates EO", "violated", mid_check.max_gap,
                 !mid_check.satisfied});
  return out;
}

std::vector<ReproCheck> or_suboptimal() {
  const Pipeline pl = two_stage_pipeline(0.25);
  const Objective f = Objective::linear(0.5);
  std::vector<ReproCheck> out;
  const SolverReport first =
      make_report("ratio", pl, f, opportunity_ratio(pl, RatioPolicyKind::kFirstStage));
  out.push_back(equals("ratio common tpr", first.evaluation.recall, 0.375, kExactTol, "3/8"));
  out.push_back(equals("ratio score", first.score, 11.0 / 16.0, kScoreTol, "11/16"));
  const SolverReport per_stage =
      make_report("ratio", pl, f, opportunity_ratio(pl, RatioPolicyKind::kPerStage));
  out.push_back(equals("per-stage ratio common tpr", per_stage.evaluation.recall, 0.25,
                       kExactTol, "1/4"));
  out.push_back(equals("per-stage ratio precision",
                       per_stage.evaluation.precision.value_or(0.0), 1.0, kScoreTol, "1"));
  const SolverReport exact = solve_exact(pl, f);
  out.push_back(equals("exact score", exact.score, 7.0 / 8.0, kScoreTol, "7/8"));
  out.push_back(equals("exact recall", exact.evaluation.recall, 0.75, kScoreTol, "3/4"));
  out.push_back(equals("exact precision", exact.evaluation.precision.value_or(0.0), 1.0,
                       kScoreTol, "1"));
  out.push_back(equals("two-approx score", two_approx(pl, f).score, 0.75, kScoreTol, "3/4"));
  out.push_back(above("exact beats ratio", exact.score - 11.0 / 16.0, 0.0));
  return out;
}

std::vector<ReproCheck> nonlocal() {
  // recall + 2 * precision is three times the linear objective at alpha 2/3.
  const Objective f = Objective::linear(2.0 / 3.0);
  std::vector<ReproCheck> out;
  const Pipeline two = nonlocal_pipeline(2);
  const SolverReport exact2 = solve_exact(two, f);
  out.push_back(equals("k=2 exact optimum", 3.0 * exact2.score, 2.5, kScoreTol, "2.5"));
  const auto& s2 = exact2.policy.groups[0].stages;
  out.push_back({"k=2 uses t1 fully", "(1, 0)", s2[0].pi0,
                 s2[0].pi1 == 1.0 && s2[0].pi0 == 0.0});
  out.push_back({"k=2 bypasses t2", "(1, 1)", s2[1].pi0,
                 s2[1].pi1 == 1.0 && s2[1].pi0 == 1.0});
  const SolverReport scan2 = structured_grid_search(two, f, kScanResolution);
  out.push_back(equals("k=2 structured oracle", 3.0 * scan2.score, 2.5, kScoreTol, "2.5"));
  const ConfigPredicate bypass_first = [](const Configuration& c) {
    const GroupConfig& g = c.groups[0];
    return g.partial_level != 0 && g.usage[0] == LevelUsage::kBypass;
  };
  const SolverReport other = structured_grid_search(two, f, kScanResolution, bypass_first);
  out.push_back(below("k=2 best with t1 bypassed", 3.0 * other.score, 2.32));
  const Pipeline three = nonlocal_pipeline(3);
  const SolverReport exact3 = solve_exact(three, f);
  out.push_back(above("k=3 exact optimum", 3.0 * exact3.score, 2.57));
  const auto& s3 = exact3.policy.groups[0].stages;
  out.push_back({"k=3 bypasses t1", "(1, 1)", s3[0].pi0,
                 s3[0].pi1 == 1.0 && s3[0].pi0 == 1.0});
  const SolverReport scan3 = structured_grid_search(three, f, kScanResolution);
  out.push_back(above("k=3 structured oracle", 3.0 * scan3.score, 2.57));
  return out;
}

std::vector<ReproCheck> eodds_gap() {
  const Pipeline pl = gap_instance(0.2, 1e-4, 1e-3, 2, 2);
  const double ratio = max_precision(pl) / eodds_precision_bound(pl).value;
  return {within("EO / EOdds precision ratio", ratio, 4.95, 5.0)};
}

std::vector<ReproCheck> groupblind_bypass() {
  const Pipeline pl({{"A", 0.25, 0.25, {{1.0, 0.0}}}, {"B", 0.25, 0.25, {{0.5, 0.0}}}});
  const double eps = 0.1;
  const SolverReport r = solve_groupblind(pl, Objective::linear(0.5), eps);
  const StagePolicy& a = r.policy.groups[0].stages[0];
  const StagePolicy& b = r.policy.groups[1].stages[0];
  std::vector<ReproCheck> out;
  out.push_back({"policy shared across groups", "identical", 0.0, a == b});
  out.push_back(equals("pi1 - pi0", a.pi1 - a.pi0, 0.0, eps, "0"));
  out.push_back(equals("precision", r.evaluation.precision.value_or(0.0),
                       pl.qualified_mass(), eps, "0.5"));
  const SolverReport aware = solve_exact(pl, Objective::linear(0.5));
  out.push_back(below("blind minus aware score", r.score - aware.score, kScoreTol));
  return out;
}

const std::map<std::string, std::function<std::vector<ReproCheck>()>, std::less<>>&
registry() {
  static const std::map<std::string, std::function<std::vector<ReproCheck>()>, std::less<>>
      table = {{"one-stage", one_stage},         {"nonconvex", nonconvex},
               {"or-suboptimal", or_suboptimal}, {"nonlocal", nonlocal},
               {"eodds-gap", eodds_gap},         {"groupblind-bypass", groupblind_bypass}};
  return table;
}

}  // namespace

std::vector<std::string> repro_ids() {
  return {"one-stage", "nonconvex",  "or-suboptimal",
          "nonlocal",  "eodds-gap",  "groupblind-bypass"};
}

std::vector<ReproCheck> run_repro(std::string_view id) {
  const auto it = registry().find(id);
  if (it == registry().end()) {
    throw Error(ErrorCode::kUnknownExample, "unknown example '" + std::string(id) + "'");
  }
  return it->second();
}

}  // namespace fairscreen::cli
