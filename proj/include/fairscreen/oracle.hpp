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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fairscreen/exact.hpp"
#include "fairscreen/model.hpp"
#include "fairscreen/objective.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen {

enum class GridConstraint { kNone, kEqualOpportunity, kEqualizedOdds };

struct GridSpec {
  int g = 10;  // parameter step 1/g
  double band = 1e-3;
  std::uint64_t point_budget = std::uint64_t{1} << 22;    // per group
  std::uint64_t product_budget = std::uint64_t{1} << 26;  // unconstrained
};

// One grid policy per group, given as an index into that group's point list.
// Points enumerate (pi1, pi0) per stage from 1 down to 0 in steps of 1/g,
// stage 0 most significant.
struct GridCandidate {
  std::span<const std::uint64_t> points;
  std::span<const double> tpr;
  std::span<const double> fpr;
};

std::vector<StagePolicy> grid_point_policy(std::uint64_t point, int g,
                                           std::size_t stages);

// Visits every grid policy satisfying `constraint` within the band, in
// lexicographic order of point indices.
void for_each_grid_policy(const Pipeline& pipeline, const GridSpec& spec,
                          GridConstraint constraint,
                          const std::function<void(const GridCandidate&)>& visit);

SolverReport grid_search(const Pipeline& pipeline, const Objective& objective,
                         const GridSpec& spec, GridConstraint constraint);

using ConfigPredicate = std::function<bool(const Configuration&)>;

// Exact's configuration enumeration with a dense scan over t instead of the
// closed-form inner solve. Configurations rejected by `keep` are skipped.
SolverReport structured_grid_search(const Pipeline& pipeline, const Objective& objective,
                                    std::size_t t_resolution,
                                    const ConfigPredicate& keep = {},
                                    std::uint64_t budget = kDefaultConfigBudget);

// Best precision over dominant configurations admitting common tpr t.
std::optional<double> structured_best_precision_at(const Pipeline& pipeline, double t);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

struct MonteCarloEstimate {
  std::vector<Estimate> tpr;  // pipeline order
  std::vector<Estimate> fpr;
  Estimate recall;
  std::optional<Estimate> precision;  // empty when nobody was promoted
};

MonteCarloEstimate monte_carlo(const Pipeline& pipeline, const Policy& policy,
                               std::uint64_t n_candidates, std::uint64_t seed);

}  // namespace fairscreen
