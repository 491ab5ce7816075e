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

#include <cstdint>
#include <optional>
#include <span>

#include "fairscreen/model.hpp"
#include "fairscreen/objective.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen {

// One (x, y) in the unit box meeting every group's tpr lower bound a[X] and
// fpr upper bound b[X], or empty.
std::optional<StagePolicy> joint_stage_feasible(std::span<const TestStats> tests,
                                                std::span<const double> a,
                                                std::span<const double> b);

// As above, additionally requiring each group's pass factor to stay at or
// below a_max[X].
std::optional<StagePolicy> joint_stage_feasible(std::span<const TestStats> tests,
                                                std::span<const double> a,
                                                std::span<const double> a_max,
                                                std::span<const double> b);

struct GroupBlindOptions {
  std::uint64_t cell_budget = 100'000'000;
};

// Shared policy for all groups, for linear, precision or reciprocal
// objectives. Per-stage tpr factors are tracked as geometric brackets, so EO
// holds at grid resolution; the residual gap is diagnostics["eo_gap"].
SolverReport solve_groupblind(const Pipeline& pipeline, const Objective& objective,
                              double eps, const GroupBlindOptions& options = {});

}  // namespace fairscreen
