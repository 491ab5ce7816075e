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

#include <doctest.h>

#include <cmath>
#include <random>

#include "fairscreen/exact.hpp"
#include "fairscreen/fairness.hpp"
#include "fairscreen/oracle.hpp"
#include "fairscreen/ratio.hpp"
#include "support/random_instances.hpp"

using namespace fairscreen;

namespace {

Pipeline one_stage() {
  return Pipeline({{"A", 0.25, 0.25, {{1.0, 0.5}}}, {"B", 0.25, 0.25, {{0.8, 0.5}}}});
}

Pipeline suboptimal_pipeline() {
  return Pipeline({{"A", 0.25, 0.25, {{0.75, 0.0}, {0.5, 0.25}}},
                   {"B", 0.25, 0.25, {{0.5, 0.25}, {0.75, 0.0}}}});
}

double precision_formula(const Pipeline& pl) {
  double tail = 0.0;
  for (const Group& g : pl.groups()) {
    double r = 1.0;
    for (const TestStats& t : g.stages) r *= t.tau0 / t.tau1;
    tail += g.u * r;
  }
  return pl.qualified_mass() / (pl.qualified_mass() + tail);
}

}  // namespace

TEST_CASE("ratio policy on the one-stage instance") {
  const Pipeline pl = one_stage();
  const Policy p = opportunity_ratio(pl);
  CHECK(std::fabs(p.find("A")->stages[0].pi1 - 0.8) <= 1e-12);
  CHECK(p.find("A")->stages[0].pi0 == 0.0);
  CHECK(p.find("B")->stages[0] == StagePolicy::full_use());
  CHECK(std::fabs(max_precision(pl) - 0.64) <= 1e-12);
  CHECK(std::fabs(*evaluate(pl, p).precision - 0.64) <= 1e-12);
}

TEST_CASE("identical tests need no correction") {
  const Pipeline pl({{"A", 0.2, 0.3, {{0.7, 0.2}, {0.9, 0.4}}},
                     {"B", 0.1, 0.4, {{0.7, 0.2}, {0.9, 0.4}}}});
  for (auto kind : {RatioPolicyKind::kFirstStage, RatioPolicyKind::kPerStage}) {
    for (const GroupPolicy& g : opportunity_ratio(pl, kind).groups) {
      for (const StagePolicy& s : g.stages) CHECK(s == StagePolicy::full_use());
    }
  }
}

TEST_CASE("ratio kinds on the sub-optimality instance") {
  const Pipeline pl = suboptimal_pipeline();
  const Evaluation first = evaluate(pl, opportunity_ratio(pl, RatioPolicyKind::kFirstStage));
  const Evaluation per = evaluate(pl, opportunity_ratio(pl, RatioPolicyKind::kPerStage));
  CHECK(std::fabs(first.recall - 0.375) <= 1e-12);
  CHECK(std::fabs(per.recall - 0.25) <= 1e-12);
  CHECK(std::fabs(*first.precision - 1.0) <= 1e-12);
  CHECK(std::fabs(*per.precision - 1.0) <= 1e-12);
}

TEST_CASE("a zero fpr path in every group gives precision one") {
  const Pipeline pl({{"A", 0.2, 0.3, {{0.7, 0.0}, {0.9, 0.4}}},
                     {"B", 0.1, 0.4, {{0.6, 0.2}, {0.8, 0.0}}}});
  CHECK(max_precision(pl) == 1.0);
}

TEST_CASE("ratio policies reach the precision formula with exact equal opportunity") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 300; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng);
    const double expected = precision_formula(pl);
    CHECK(std::fabs(max_precision(pl) - expected) <= 1e-12);
    for (auto kind : {RatioPolicyKind::kFirstStage, RatioPolicyKind::kPerStage}) {
      const Policy p = opportunity_ratio(pl, kind);
      CHECK(std::fabs(*evaluate(pl, p).precision - expected) <= 1e-12);
      CHECK(check_eo(pl, p, 0.0).max_gap <= 1e-12);
      for (const GroupPolicy& g : p.groups) {
        for (const StagePolicy& s : g.stages) CHECK(s.pi0 == 0.0);
      }
      if (kind == RatioPolicyKind::kPerStage) {
        CHECK(check_eo(pl, p, 0.0, Scope::kPerStage).max_gap <= 1e-12);
      }
    }
  }
}

TEST_CASE("exact equal-opportunity grid policies never beat the precision formula") {
  std::mt19937_64 rng(32);
  GridSpec spec;
  spec.g = 20;
  spec.band = 1e-12;
  for (int rep = 0; rep < 30; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 1});
    const SolverReport r = grid_search(pl, Objective::precision(), spec,
                                       GridConstraint::kEqualOpportunity);
    CHECK(r.score <= max_precision(pl) + 1e-9);
  }
}

TEST_CASE("two-approximation") {
  const Pipeline pl = suboptimal_pipeline();
  const SolverReport half = two_approx(pl, Objective::linear(0.5));
  CHECK(std::fabs(half.score - 0.75) <= 1e-12);
  CHECK(std::fabs(half.diagnostics.at("ratio_score") - 11.0 / 16.0) <= 1e-12);
  CHECK(std::fabs(half.diagnostics.at("bypass_score") - 0.75) <= 1e-12);
  CHECK(std::fabs(two_approx(pl, Objective::linear(0.0)).score - 1.0) <= 1e-12);
  CHECK(std::fabs(two_approx(pl, Objective::linear(1.0)).score - max_precision(pl)) <= 1e-12);
  CHECK_THROWS(two_approx(pl, Objective::reciprocal(0.5)));

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const Pipeline random = testing::random_pipeline(rng, {2, 2});
    const Objective f = Objective::linear(unit(rng));
    const double best = solve_exact(random, f).score;
    const double approx = two_approx(random, f).score;
    CHECK(approx >= 0.5 * best - 1e-12);
    CHECK(approx <= best + 1e-9);
  }
}
