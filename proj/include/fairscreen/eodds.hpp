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

namespace fairscreen {

struct EoddsBound {
  double value = 1.0;
  double rho = 0.0;  // largest per-group product of tau0 / tau1
};

// Precision ceiling for any policy with equal final tpr and fpr.
EoddsBound eodds_precision_bound(const Pipeline& pipeline);

// Instance separating the equal-opportunity and equalized-odds ceilings.
// Throws InvalidParams on out-of-range parameters.
Pipeline gap_instance(double gamma, double mu, double delta, int stages,
                      int num_groups);

// Single-stage only: true if the policy is trivial (all 0 or all 1) or some
// probability is 0 within `tolerance`.
bool verify_eodds_structure(const Pipeline& pipeline, const Policy& policy,
                            double tolerance = 1e-9);

}  // namespace fairscreen
