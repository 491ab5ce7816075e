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
#include <optional>
#include <vector>

#include "fairscreen/model.hpp"
#include "fairscreen/objective.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen {

// Geometric grid with level values (1 - eps_bar)^j.
class Grid {
 public:
  static constexpr int kMaxLevels = 1 << 20;

  // Throws InvalidEps / InvalidBounds on out-of-range inputs.
  Grid(double eps_bar, double l_tpr_bound, double l_fpr_bound);

  double eps_bar() const { return eps_bar_; }
  double tpr_bound() const { return tpr_bound_; }
  double fpr_bound() const { return fpr_bound_; }
  int l_tpr() const { return l_tpr_; }
  int l_fpr() const { return l_fpr_; }
  double value(int j) const { return values_.at(static_cast<std::size_t>(j)); }

 private:
  double eps_bar_;
  double tpr_bound_;
  double fpr_bound_;
  int l_tpr_;
  int l_fpr_;
  std::vector<double> values_;
};

// Smallest l with (1 - eps_bar)^l <= bound.
int grid_index_bound(double eps_bar, double bound);

// Point maximizing tau1 x + (1 - tau1) y subject to tau0 x + (1 - tau0) y <= b
// over the unit box, if it reaches a.
std::optional<StagePolicy> stage_feasible(const TestStats& test, double a, double b);

struct DpStats {
  std::uint64_t feasibility_checks = 0;
  std::uint64_t pair_evaluations = 0;
  std::uint64_t or_operations = 0;
};

// Checks plus (cell, increment) pairs for a full build.
DpStats expected_dp_counts(std::size_t stages, int l_tpr, int l_fpr);

struct DpParent {
  int j1 = 0;  // tpr increment at this stage
  int j0 = 0;  // fpr increment at this stage
  StagePolicy stage;
};

// Reachability table for one group: at(i, j1, j0) is true when some policy on
// stages 0..i has tpr >= value(j1) and fpr <= value(j0).
class DpTable {
 public:
  DpTable(const Group& group, const Grid& grid);

  std::size_t num_stages() const { return stages_.size(); }
  const Grid& grid() const { return grid_; }
  const DpStats& stats() const { return stats_; }

  bool at(std::size_t stage, int j1, int j0) const;
  // Largest j0 with at(stage, j1, j0), or -1.
  int max_fpr_index(std::size_t stage, int j1) const;
  // Largest j0 increment feasible at `stage` for tpr increment j1, or -1.
  int feasible_prefix(std::size_t stage, int j1) const;
  // First witness in scan order (j0 outer, j1 inner). Requires stage >= 1.
  std::optional<DpParent> parent(std::size_t stage, int j1, int j0) const;
  // Stage policies reaching final cell (j1, j0); empty if the cell is false.
  std::vector<StagePolicy> reconstruct(int j1, int j0) const;

 private:
  const std::uint64_t* row(std::size_t stage, int j1) const;

  std::vector<TestStats> stages_;
  Grid grid_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> bits_;
  std::vector<std::vector<int>> prefix_;
  DpStats stats_;
};

struct FptasBounds {
  double tpr = 1.0;
  double fpr = 1.0;
};

FptasBounds fptas_bounds_f(const Pipeline& pipeline, double eps);
FptasBounds fptas_bounds_g(const Pipeline& pipeline, double eps);

struct FptasOptions {
  unsigned threads = 0;
};

SolverReport solve_fptas_f(const Pipeline& pipeline, double alpha, double eps,
                           const FptasOptions& options = {});
SolverReport solve_fptas_g(const Pipeline& pipeline, double alpha, double eps,
                           const FptasOptions& options = {});
// Objective must be monotone non-decreasing in recall and precision (or
// non-increasing when minimized).
SolverReport solve_fptas_custom(const Pipeline& pipeline, const Objective& objective,
                                double eps, const FptasBounds& bounds,
                                const FptasOptions& options = {});

}  // namespace fairscreen
