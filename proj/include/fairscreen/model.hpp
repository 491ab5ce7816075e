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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairscreen {

// Pass probabilities of one test for qualified (tau1) and unqualified (tau0)
// members of a group. Valid tests satisfy 0 <= tau0 < tau1 <= 1.
struct TestStats {
  double tau1 = 1.0;
  double tau0 = 0.0;
};

void validate(const TestStats& test);

// q and u are population masses: Pr[group, qualified] and
// Pr[group, unqualified].
struct Group {
  std::string id;
  double q = 0.0;
  double u = 0.0;
  std::vector<TestStats> stages;
};

class Pipeline {
 public:
  static constexpr double kMassTolerance = 1e-9;

  explicit Pipeline(std::vector<Group> groups);

  std::span<const Group> groups() const { return groups_; }
  const Group& group(std::size_t i) const { return groups_.at(i); }
  std::size_t num_groups() const { return groups_.size(); }
  std::size_t num_stages() const { return groups_.front().stages.size(); }

  double qualified_mass() const { return qualified_mass_; }
  double unqualified_mass() const { return unqualified_mass_; }

  std::optional<std::size_t> find(std::string_view id) const;

 private:
  std::vector<Group> groups_;
  double qualified_mass_ = 0.0;
  double unqualified_mass_ = 0.0;
};

// Promotion probabilities for passers (pi1) and failers (pi0) at one stage.
struct StagePolicy {
  double pi1 = 1.0;
  double pi0 = 0.0;

  static constexpr StagePolicy full_use() { return {1.0, 0.0}; }
  static constexpr StagePolicy bypass() { return {1.0, 1.0}; }
  static constexpr StagePolicy reject() { return {0.0, 0.0}; }

  friend bool operator==(const StagePolicy&, const StagePolicy&) = default;
};

struct GroupPolicy {
  std::string id;
  std::vector<StagePolicy> stages;
};

struct Policy {
  std::vector<GroupPolicy> groups;

  // Same stage policy for every group and stage of `pipeline`.
  static Policy uniform(const Pipeline& pipeline, StagePolicy stage);

  const GroupPolicy* find(std::string_view id) const;
};

// Returns, for each pipeline group in order, its stage list in `policy`.
// Throws ShapeMismatch unless the policy covers exactly the pipeline's groups
// and stages with probabilities in [0,1].
std::vector<const std::vector<StagePolicy>*> align(const Pipeline& pipeline,
                                                   const Policy& policy);

struct StageRates {
  double m = 0.0;  // Pr[promoted | qualified]
  double n = 0.0;  // Pr[promoted | unqualified]
};

StageRates stage_rates(const TestStats& test, const StagePolicy& stage);

struct GroupRates {
  std::string id;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct Evaluation {
  std::vector<GroupRates> groups;  // pipeline order
  double recall = 0.0;
  std::optional<double> precision;  // empty when nobody is promoted
};

Evaluation evaluate(const Pipeline& pipeline, const Policy& policy);

// Cumulative rates after each stage: result[i][x] covers stages 0..i.
std::vector<std::vector<GroupRates>> cumulative_rates(const Pipeline& pipeline,
                                                      const Policy& policy);

// Recall and precision from per-group rates given in pipeline order.
void aggregate(const Pipeline& pipeline, Evaluation& evaluation);

}  // namespace fairscreen
