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

#include "fairscreen/ratio.hpp"

#include "fairscreen/errors.hpp"

namespace fairscreen {

namespace {

double qualified_pass_product(const Group& g) {
  double p = 1.0;
  for (const TestStats& t : g.stages) p *= t.tau1;
  return p;
}

// Index of the group minimizing value(x); ties go to the smaller id.
template <typename Value>
std::size_t argmin_group(const Pipeline& pipeline, Value value) {
  std::size_t best = 0;
  for (std::size_t x = 1; x < pipeline.num_groups(); ++x) {
    const double v = value(x);
    const double b = value(best);
    if (v < b || (v == b && pipeline.group(x).id < pipeline.group(best).id)) best = x;
  }
  return best;
}

}  // namespace

Policy opportunity_ratio(const Pipeline& pipeline, RatioPolicyKind kind) {
  const std::size_t k = pipeline.num_stages();
  Policy policy = Policy::uniform(pipeline, StagePolicy::full_use());
  if (kind == RatioPolicyKind::kFirstStage) {
    const std::size_t star = argmin_group(
        pipeline, [&](std::size_t x) { return qualified_pass_product(pipeline.group(x)); });
    const Group& weakest = pipeline.group(star);
    for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
      double ratio = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        ratio *= weakest.stages[i].tau1 / pipeline.group(x).stages[i].tau1;
      }
      policy.groups[x].stages[0] = {x == star ? 1.0 : ratio, 0.0};
    }
    return policy;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t star = argmin_group(
        pipeline, [&](std::size_t x) { return pipeline.group(x).stages[i].tau1; });
    const double floor = pipeline.group(star).stages[i].tau1;
    for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
      policy.groups[x].stages[i] = {floor / pipeline.group(x).stages[i].tau1, 0.0};
    }
  }
  return policy;
}

double max_precision(const Pipeline& pipeline) {
  const double q = pipeline.qualified_mass();
  double false_mass = 0.0;
  for (const Group& g : pipeline.groups()) {
    double r = 1.0;
    for (const TestStats& t : g.stages) r *= t.tau0 / t.tau1;
    false_mass += g.u * r;
  }
  return q / (q + false_mass);
}

SolverReport two_approx(const Pipeline& pipeline, const Objective& objective) {
  if (!objective.is_linear()) {
    throw Error(ErrorCode::kIncompatibleFlags,
                "two-approx requires a linear or precision objective");
  }
  SolverReport bypass = make_report("two-approx", pipeline, objective,
                                    Policy::uniform(pipeline, StagePolicy::bypass()));
  SolverReport ratio = make_report("two-approx", pipeline, objective,
                                   opportunity_ratio(pipeline, RatioPolicyKind::kFirstStage));
  const double bypass_score = bypass.score;
  const double ratio_score = ratio.score;
  SolverReport& best = ratio_score > bypass_score ? ratio : bypass;
  best.certificate = ratio_score > bypass_score ? "opportunity-ratio" : "all-bypass";
  best.diagnostics["bypass_score"] = bypass_score;
  best.diagnostics["ratio_score"] = ratio_score;
  return best;
}

}  // namespace fairscreen
