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

#pragma once

#include "fairscreen/model.hpp"
#include "fairscreen/objective.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen {

enum class RatioPolicyKind { kFirstStage, kPerStage };

// Equal-opportunity policy that scales promote-on-pass probabilities down to
// the weakest group's qualified pass rate. Never promotes failers.
Policy opportunity_ratio(const Pipeline& pipeline,
                         RatioPolicyKind kind = RatioPolicyKind::kFirstStage);

// Highest precision reachable by any equal-opportunity policy.
double max_precision(const Pipeline& pipeline);

// Better of all-bypass and the first-stage ratio policy for a linear
// objective. Diagnostics hold both scores.
SolverReport two_approx(const Pipeline& pipeline, const Objective& objective);

}  // namespace fairscreen
