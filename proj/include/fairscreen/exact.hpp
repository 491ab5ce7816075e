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
#include <string>
#include <vector>

#include "fairscreen/model.hpp"
#include "fairscreen/objective.hpp"
#include "fairscreen/report.hpp"

namespace fairscreen {

enum class PartialType {
  kPassFraction,  // (s, 0) with s in (0, 1]
  kFailFraction,  // (1, y) with y in [0, 1]
};

enum class LevelUsage { kFullUse, kBypass };

struct GroupConfig {
  std::size_t partial_level = 0;
  PartialType partial_type = PartialType::kPassFraction;
  // One entry per stage; the entry at partial_level is ignored.
  std::vector<LevelUsage> usage;
};

struct Configuration {
  std::vector<GroupConfig> groups;  // pipeline order
};

std::string describe(const Pipeline& pipeline, const Configuration& config);

inline constexpr std::uint64_t kDefaultConfigBudget = std::uint64_t{1} << 26;

// Indexable, deterministic enumeration of all dominant configurations:
// k^|X| * 2^((k-1)|X|) * 2^|X| of them.
class ConfigurationSpace {
 public:
  // Throws SizeLimit when the count exceeds `budget`.
  explicit ConfigurationSpace(const Pipeline& pipeline,
                              std::uint64_t budget = kDefaultConfigBudget);

  std::uint64_t size() const { return size_; }
  Configuration at(std::uint64_t index) const;
  void decode(std::uint64_t index, Configuration& out) const;

 private:
  std::size_t num_groups_;
  std::size_t num_stages_;
  std::uint64_t radix_;
  std::uint64_t size_;
};

std::uint64_t configuration_count(const Pipeline& pipeline);

// Calls visit(config) for every configuration in enumeration order.
void enumerate_configs(const Pipeline& pipeline,
                       const std::function<void(const Configuration&)>& visit,
                       std::uint64_t budget = kDefaultConfigBudget);

// Per group, tpr(t) = t and fpr(t) = a t + b on the common interval.
struct GroupLine {
  double fixed_m = 1.0;
  double fixed_n = 1.0;
  double a = 0.0;
  double b = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct InnerProblem {
  std::vector<GroupLine> lines;
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool lo_open = false;  // t_lo = 0 excluded
  double q = 0.0;        // total qualified mass
  double c = 0.0;        // q + sum u a
  double d = 0.0;        // sum u b

  // precision(t) = q t / (c t + d)
  double precision(double t) const;
};

// Empty when the groups' tpr ranges do not intersect.
std::optional<InnerProblem> build_inner(const Pipeline& pipeline,
                                        const Configuration& config);

struct InnerOptimum {
  double t = 0.0;
  double score = 0.0;
};

inline constexpr std::size_t kDefaultCustomResolution = 20001;

// Throws DegenerateInterval if t_lo > t_hi.
InnerOptimum optimize_inner(const InnerProblem& problem, const Objective& objective,
                            std::size_t custom_resolution = kDefaultCustomResolution);

// Back-solves each group's partial parameter so that its tpr equals t.
Policy policy_from_config(const Pipeline& pipeline, const Configuration& config,
                          double t);

struct ExactOptions {
  std::uint64_t config_budget = kDefaultConfigBudget;
  std::size_t custom_resolution = kDefaultCustomResolution;
  unsigned threads = 0;
};

SolverReport solve_exact(const Pipeline& pipeline, const Objective& objective,
                         const ExactOptions& options = {});

}  // namespace fairscreen
