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

#include "fairscreen/eodds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairscreen/errors.hpp"

namespace fairscreen {

EoddsBound eodds_precision_bound(const Pipeline& pipeline) {
  EoddsBound b;
  for (const Group& g : pipeline.groups()) {
    double r = 1.0;
    for (const TestStats& t : g.stages) r *= t.tau0 / t.tau1;
    b.rho = std::max(b.rho, r);
  }
  const double q = pipeline.qualified_mass();
  b.value = q / (q + b.rho * pipeline.unqualified_mass());
  return b;
}

Pipeline gap_instance(double gamma, double mu, double delta, int stages, int num_groups) {
  if (!(gamma > 0.0 && gamma < 1.0) || !(mu > 0.0) || !(delta > 0.0 && delta < 1.0) ||
      stages < 1 || num_groups < 2 || !(gamma + mu < 1.0)) {
    throw Error(ErrorCode::kInvalidParams,
                "gap instance needs gamma, delta in (0,1), mu > 0, gamma + mu < 1, "
                "at least one stage and two groups");
  }
  const double q = gamma / num_groups;
  const double u_rest = (1.0 - gamma - mu) / (num_groups - 1);
  std::vector<Group> groups;
  for (int x = 0; x < num_groups; ++x) {
    Group g;
    g.id = "X" + std::to_string(x);
    g.q = q;
    g.u = x == 0 ? mu : u_rest;
    const TestStats test = x == 0 ? TestStats{1.0, 1.0 - delta} : TestStats{1.0, 0.0};
    g.stages.assign(static_cast<std::size_t>(stages), test);
    groups.push_back(std::move(g));
  }
  return Pipeline(std::move(groups));
}

bool verify_eodds_structure(const Pipeline& pipeline, const Policy& policy, double tolerance) {
  if (pipeline.num_stages() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "structure check applies to single-stage pipelines");
  }
  const auto stages = align(pipeline, policy);
  bool all_zero = true;
  bool all_one = true;
  double lowest = 1.0;
  for (const auto* list : stages) {
    for (const StagePolicy& s : *list) {
      for (double p : {s.pi1, s.pi0}) {
        all_zero = all_zero && p <= tolerance;
        all_one = all_one && p >= 1.0 - tolerance;
        lowest = std::min(lowest, p);
      }
    }
  }
  return all_zero || all_one || lowest <= tolerance;
}

}  // namespace fairscreen
