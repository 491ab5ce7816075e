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

#include "fairscreen/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "fairscreen/errors.hpp"

namespace fairscreen {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::kInvalidInput, message);
}

[[noreturn]] void mismatch(const std::string& message) {
  throw Error(ErrorCode::kShapeMismatch, message);
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

void validate(const TestStats& test) {
  if (!is_probability(test.tau1) || !is_probability(test.tau0)) {
    invalid("test pass rates must lie in [0,1]");
  }
  if (!(test.tau1 > 0.0) || test.tau0 > test.tau1) {
    std::ostringstream os;
    os << "test is not weakly effective: need 0 < tau1 and tau0 <= tau1, got tau1="
       << test.tau1 << ", tau0=" << test.tau0;
    invalid(os.str());
  }
}

Pipeline::Pipeline(std::vector<Group> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) invalid("pipeline needs at least one group");
  const std::size_t k = groups_.front().stages.size();
  if (k == 0) invalid("pipeline needs at least one stage");
  std::set<std::string> ids;
  double total = 0.0;
  for (const Group& g : groups_) {
    if (!ids.insert(g.id).second) invalid("duplicate group id '" + g.id + "'");
    if (!(std::isfinite(g.q) && g.q > 0.0)) {
      invalid("group '" + g.id + "' needs positive qualified mass");
    }
    if (!(std::isfinite(g.u) && g.u >= 0.0)) {
      invalid("group '" + g.id + "' needs nonnegative unqualified mass");
    }
    if (g.stages.size() != k) {
      invalid("group '" + g.id + "' has a different number of stages");
    }
    for (const TestStats& t : g.stages) validate(t);
    qualified_mass_ += g.q;
    unqualified_mass_ += g.u;
    total += g.q + g.u;
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os << "group masses sum to " << total << ", expected 1";
    invalid(os.str());
  }
}

std::optional<std::size_t> Pipeline::find(std::string_view id) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].id == id) return i;
  }
  return std::nullopt;
}

Policy Policy::uniform(const Pipeline& pipeline, StagePolicy stage) {
  Policy p;
  for (const Group& g : pipeline.groups()) {
    p.groups.push_back({g.id, std::vector<StagePolicy>(pipeline.num_stages(), stage)});
  }
  return p;
}

const GroupPolicy* Policy::find(std::string_view id) const {
  for (const GroupPolicy& g : groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

std::vector<const std::vector<StagePolicy>*> align(const Pipeline& pipeline,
                                                   const Policy& policy) {
  if (policy.groups.size() != pipeline.num_groups()) {
    mismatch("policy covers " + std::to_string(policy.groups.size()) +
             " groups, pipeline has " + std::to_string(pipeline.num_groups()));
  }
  std::vector<const std::vector<StagePolicy>*> out;
  out.reserve(pipeline.num_groups());
  for (const Group& g : pipeline.groups()) {
    const GroupPolicy* gp = policy.find(g.id);
    if (gp == nullptr) mismatch("policy has no entry for group '" + g.id + "'");
    if (gp->stages.size() != pipeline.num_stages()) {
      mismatch("policy for group '" + g.id + "' has " +
               std::to_string(gp->stages.size()) + " stages, expected " +
               std::to_string(pipeline.num_stages()));
    }
    for (const StagePolicy& s : gp->stages) {
      if (!is_probability(s.pi1) || !is_probability(s.pi0)) {
        mismatch("policy for group '" + g.id + "' has a probability outside [0,1]");
      }
    }
    out.push_back(&gp->stages);
  }
  return out;
}

StageRates stage_rates(const TestStats& test, const StagePolicy& stage) {
  return {test.tau1 * stage.pi1 + (1.0 - test.tau1) * stage.pi0,
          test.tau0 * stage.pi1 + (1.0 - test.tau0) * stage.pi0};
}

void aggregate(const Pipeline& pipeline, Evaluation& evaluation) {
  double promoted_q = 0.0;
  double promoted_u = 0.0;
  for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
    promoted_q += pipeline.group(x).q * evaluation.groups[x].tpr;
    promoted_u += pipeline.group(x).u * evaluation.groups[x].fpr;
  }
  evaluation.recall = promoted_q / pipeline.qualified_mass();
  const double denom = promoted_q + promoted_u;
  if (denom > 0.0) {
    evaluation.precision = promoted_q / denom;
  } else {
    evaluation.precision.reset();
  }
}

std::vector<std::vector<GroupRates>> cumulative_rates(const Pipeline& pipeline,
                                                      const Policy& policy) {
  const auto stages = align(pipeline, policy);
  const std::size_t k = pipeline.num_stages();
  std::vector<std::vector<GroupRates>> out(k);
  for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
    const Group& g = pipeline.group(x);
    double tpr = 1.0;
    double fpr = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const StageRates r = stage_rates(g.stages[i], (*stages[x])[i]);
      tpr *= r.m;
      fpr *= r.n;
      out[i].push_back({g.id, tpr, fpr});
    }
  }
  return out;
}

Evaluation evaluate(const Pipeline& pipeline, const Policy& policy) {
  Evaluation e;
  e.groups = std::move(cumulative_rates(pipeline, policy).back());
  aggregate(pipeline, e);
  return e;
}

}  // namespace fairscreen
