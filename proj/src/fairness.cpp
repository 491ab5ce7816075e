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

#include "fairscreen/fairness.hpp"

#include <algorithm>
#include <cmath>

#include "fairscreen/errors.hpp"

namespace fairscreen {

namespace {

struct Spread {
  double gap = 0.0;
  std::size_t lo = 0;
  std::size_t hi = 0;
};

// Max minus min of rate(x), ties resolved toward the lexicographically
// smaller id so the witness does not depend on group order.
template <typename Rate>
Spread spread(const std::vector<GroupRates>& rates, Rate rate) {
  Spread s;
  for (std::size_t x = 1; x < rates.size(); ++x) {
    const double v = rate(rates[x]);
    const double lo = rate(rates[s.lo]);
    const double hi = rate(rates[s.hi]);
    if (v < lo || (v == lo && rates[x].id < rates[s.lo].id)) s.lo = x;
    if (v > hi || (v == hi && rates[x].id < rates[s.hi].id)) s.hi = x;
  }
  s.gap = rate(rates[s.hi]) - rate(rates[s.lo]);
  return s;
}

FairnessReport check(const Pipeline& pipeline, const Policy& policy, double tolerance,
                     Scope scope, Criterion criterion) {
  if (!(tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "fairness tolerance must be nonnegative");
  }
  const auto stages = cumulative_rates(pipeline, policy);
  const std::size_t first = scope == Scope::kFinal ? stages.size() - 1 : 0;

  FairnessReport report;
  report.criterion = criterion;
  report.scope = scope;
  report.stage = stages.size() - 1;
  bool have = false;
  Spread worst;
  for (std::size_t i = first; i < stages.size(); ++i) {
    const auto& rates = stages[i];
    Spread s = spread(rates, [](const GroupRates& r) { return r.tpr; });
    if (criterion == Criterion::kEqualizedOdds) {
      const Spread f = spread(rates, [](const GroupRates& r) { return r.fpr; });
      if (f.gap > s.gap) s = f;
    }
    if (!have || s.gap > worst.gap) {
      worst = s;
      report.stage = i;
      report.witness = {rates[s.lo].id, rates[s.hi].id};
      have = true;
    }
  }
  if (report.witness.second < report.witness.first) {
    std::swap(report.witness.first, report.witness.second);
  }
  report.max_gap = worst.gap;
  report.satisfied = worst.gap <= tolerance;
  return report;
}

}  // namespace

FairnessReport check_eo(const Pipeline& pipeline, const Policy& policy, double tolerance,
                        Scope scope) {
  return check(pipeline, policy, tolerance, scope, Criterion::kEqualOpportunity);
}

FairnessReport check_eodds(const Pipeline& pipeline, const Policy& policy,
                           double tolerance, Scope scope) {
  return check(pipeline, policy, tolerance, scope, Criterion::kEqualizedOdds);
}

}  // namespace fairscreen
