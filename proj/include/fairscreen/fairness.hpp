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
#include <string>
#include <utility>

#include "fairscreen/model.hpp"

namespace fairscreen {

enum class Criterion { kEqualOpportunity, kEqualizedOdds };
enum class Scope { kFinal, kPerStage };

inline constexpr double kDefaultFairnessTolerance = 1e-6;

struct FairnessReport {
  Criterion criterion = Criterion::kEqualOpportunity;
  Scope scope = Scope::kFinal;
  bool satisfied = true;
  double max_gap = 0.0;
  // Group ids realizing max_gap, lexicographically ordered.
  std::pair<std::string, std::string> witness;
  // Zero-based stage where max_gap occurs (always the last stage for kFinal).
  std::size_t stage = 0;
};

FairnessReport check_eo(const Pipeline& pipeline, const Policy& policy,
                        double tolerance = kDefaultFairnessTolerance,
                        Scope scope = Scope::kFinal);

FairnessReport check_eodds(const Pipeline& pipeline, const Policy& policy,
                           double tolerance = kDefaultFairnessTolerance,
                           Scope scope = Scope::kFinal);

}  // namespace fairscreen
