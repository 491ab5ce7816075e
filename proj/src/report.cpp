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

#include "fairscreen/report.hpp"

namespace fairscreen {

SolverReport make_report(std::string method, const Pipeline& pipeline,
                         const Objective& objective, Policy policy) {
  SolverReport r;
  r.method = std::move(method);
  r.objective = objective;
  r.evaluation = evaluate(pipeline, policy);
  r.score = objective.score(r.evaluation);
  r.policy = std::move(policy);
  return r;
}

}  // namespace fairscreen
