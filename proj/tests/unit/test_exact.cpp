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
#include <set>

#include "fairscreen/errors.hpp"
#include "fairscreen/exact.hpp"
#include "fairscreen/fairness.hpp"
#include "fairscreen/oracle.hpp"
#include "fairscreen/ratio.hpp"
#include "support/random_instances.hpp"

using namespace fairscreen;

namespace {

Pipeline suboptimal_pipeline() {
  return Pipeline({{"A", 0.25, 0.25, {{0.75, 0.0}, {0.5, 0.25}}},
                   {"B", 0.25, 0.25, {{0.5, 0.25}, {0.75, 0.0}}}});
}

Pipeline shape(std::size_t groups, std::size_t stages) {
  std::vector<Group> g;
  const double mass = 0.5 / static_cast<double>(groups);
  for (std::size_t x = 0; x < groups; ++x) {
    g.push_back({"G" + std::to_string(x), mass, mass,
                 std::vector<TestStats>(stages, TestStats{0.8, 0.3})});
  }
  return Pipeline(g);
}

// Objective along the common-tpr line computed straight from per-group lines.
double line_score(const Pipeline& pl, const InnerProblem& ip, const Objective& obj, double t) {
  double promoted_u = 0.0;
  for (std::size_t x = 0; x < pl.num_groups(); ++x) {
    promoted_u += pl.group(x).u * (ip.lines[x].a * t + ip.lines[x].b);
  }
  const double q = pl.qualified_mass();
  return obj.score(t, q * t / (q * t + promoted_u));
}

bool is_structured(const StagePolicy& s) {
  return std::fabs((1.0 - s.pi1) * s.pi0) <= 1e-9 && s.pi1 > 0.0;
}

bool is_partial(const StagePolicy& s) {
  return !(s == StagePolicy::full_use() || s == StagePolicy::bypass());
}

}  // namespace

TEST_CASE("configuration counts") {
  CHECK(configuration_count(shape(1, 1)) == 2);
  CHECK(configuration_count(shape(2, 2)) == 64);
  CHECK(configuration_count(shape(1, 3)) == 24);
  CHECK(configuration_count(shape(3, 2)) == 512);
}

TEST_CASE("enumeration is complete, distinct and indexable") {
  const Pipeline pl = shape(2, 2);
  std::set<std::string> seen;
  std::uint64_t index = 0;
  const ConfigurationSpace space(pl);
  enumerate_configs(pl, [&](const Configuration& c) {
    const std::string d = describe(pl, c);
    CHECK(seen.insert(d).second);
    CHECK(describe(pl, space.at(index)) == d);
    for (const GroupConfig& g : c.groups) {
      CHECK(g.partial_level < 2);
      CHECK(g.usage.size() == 2);
    }
    ++index;
  });
  CHECK(seen.size() == 64);
}

TEST_CASE("configuration budget") {
  try {
    ConfigurationSpace space(shape(3, 3), 1000);
    FAIL("expected a size limit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSizeLimit);
  }
  CHECK_THROWS_AS(solve_exact(shape(3, 3), Objective::linear(0.5), {1000, 20001, 1}), Error);
}

TEST_CASE("inner problem for identical groups") {
  const Pipeline pl({{"A", 0.25, 0.25, {{0.8, 0.3}, {0.6, 0.2}}},
                     {"B", 0.25, 0.25, {{0.8, 0.3}, {0.6, 0.2}}}});
  GroupConfig g{0, PartialType::kPassFraction, {LevelUsage::kFullUse, LevelUsage::kFullUse}};
  const auto ip = build_inner(pl, Configuration{{g, g}});
  REQUIRE(ip.has_value());
  CHECK(std::fabs(ip->t_hi - 0.48) <= 1e-12);
  CHECK(ip->lo_open);
  for (const GroupLine& line : ip->lines) {
    CHECK(std::fabs(line.a - 0.06 / 0.48) <= 1e-12);
    CHECK(line.b == 0.0);
  }
}

TEST_CASE("inner problem on the sub-optimality instance") {
  const Pipeline pl = suboptimal_pipeline();
  const GroupConfig a{0, PartialType::kPassFraction, {LevelUsage::kFullUse, LevelUsage::kBypass}};
  const GroupConfig b{1, PartialType::kPassFraction, {LevelUsage::kBypass, LevelUsage::kFullUse}};
  const auto ip = build_inner(pl, Configuration{{a, b}});
  REQUIRE(ip.has_value());
  CHECK(std::fabs(ip->t_hi - 0.75) <= 1e-12);
  for (const GroupLine& line : ip->lines) {
    CHECK(line.a == 0.0);
    CHECK(line.b == 0.0);
  }
  const InnerOptimum opt = optimize_inner(*ip, Objective::linear(0.5));
  CHECK(std::fabs(opt.t - 0.75) <= 1e-12);
  CHECK(std::fabs(opt.score - 0.875) <= 1e-12);
}

TEST_CASE("disjoint tpr ranges are infeasible") {
  const Pipeline pl({{"A", 0.25, 0.25, {{0.9, 0.1}}}, {"B", 0.25, 0.25, {{0.3, 0.1}}}});
  const GroupConfig pass{0, PartialType::kPassFraction, {LevelUsage::kFullUse}};
  const GroupConfig fail{0, PartialType::kFailFraction, {LevelUsage::kFullUse}};
  CHECK_FALSE(build_inner(pl, Configuration{{fail, pass}}).has_value());
  CHECK(build_inner(pl, Configuration{{pass, fail}}).has_value());
  CHECK(build_inner(pl, Configuration{{pass, pass}}).has_value());
}

TEST_CASE("reconstructed policies follow the inner lines") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 3});
    const ConfigurationSpace space(pl);
    for (int draw = 0; draw < 20; ++draw) {
      const Configuration c = space.at(rng() % space.size());
      const auto ip = build_inner(pl, c);
      if (!ip) continue;
      const double lo = ip->lo_open ? ip->t_hi * 1e-3 : ip->t_lo;
      const double t = lo + (ip->t_hi - lo) * unit(rng);
      const Evaluation e = evaluate(pl, policy_from_config(pl, c, t));
      for (std::size_t x = 0; x < pl.num_groups(); ++x) {
        CHECK(std::fabs(e.groups[x].tpr - t) <= 1e-12);
        CHECK(std::fabs(e.groups[x].fpr - (ip->lines[x].a * t + ip->lines[x].b)) <= 1e-12);
        CHECK(e.groups[x].fpr >= -1e-12);
        CHECK(e.groups[x].fpr <= 1.0 + 1e-12);
      }
      if (e.precision) CHECK(std::fabs(*e.precision - ip->precision(t)) <= 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("inner optimum matches a dense scan") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kPoints = 1'000'000;
  int checked = 0;
  while (checked < 24) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 2});
    const ConfigurationSpace space(pl);
    const Configuration c = space.at(rng() % space.size());
    const auto ip = build_inner(pl, c);
    if (!ip || ip->t_hi - ip->t_lo < 1e-6) continue;
    const Objective obj =
        checked % 2 ? Objective::linear(unit(rng)) : Objective::reciprocal(unit(rng));
    const InnerOptimum opt = optimize_inner(*ip, obj);
    double best = obj.worst();
    for (int i = ip->lo_open ? 1 : 0; i <= kPoints; ++i) {
      const double t = ip->t_lo + (ip->t_hi - ip->t_lo) * i / kPoints;
      const double s = line_score(pl, *ip, obj, t);
      if (obj.better(s, best)) best = s;
    }
    CHECK(std::fabs(opt.score - best) <= 1e-8);
    CHECK_FALSE(obj.better(best, opt.score + (obj.sense() == Sense::kMaximize ? 1e-12 : -1e-12)));
    ++checked;
  }
}

TEST_CASE("degenerate interval") {
  InnerProblem ip;
  ip.t_lo = 0.6;
  ip.t_hi = 0.5;
  ip.q = 0.5;
  ip.c = 0.5;
  CHECK_THROWS_AS(optimize_inner(ip, Objective::linear(0.5)), Error);
}

TEST_CASE("exact optimum on the sub-optimality instance") {
  const Pipeline pl = suboptimal_pipeline();
  const SolverReport f = solve_exact(pl, Objective::linear(0.5));
  CHECK(std::fabs(f.score - 0.875) <= 1e-9);
  CHECK(std::fabs(f.evaluation.recall - 0.75) <= 1e-9);
  CHECK(std::fabs(*f.evaluation.precision - 1.0) <= 1e-9);
  CHECK(f.method == "exact");
  CHECK(f.diagnostics.at("configurations") == 64);
  const SolverReport g = solve_exact(pl, Objective::reciprocal(0.5));
  CHECK(std::fabs(g.score - (0.5 / 0.75 + 0.5)) <= 1e-9);
}

TEST_CASE("exact optimum switches structure with one more stage") {
  const Objective f = Objective::linear(2.0 / 3.0);
  const Pipeline two({{"X", 0.5, 0.5, {{0.5, 0.0}, {0.99, 0.5}}}});
  const SolverReport r2 = solve_exact(two, f);
  CHECK(std::fabs(3.0 * r2.score - 2.5) <= 1e-9);
  CHECK(r2.policy.groups[0].stages[0] == StagePolicy::full_use());
  CHECK(r2.policy.groups[0].stages[1] == StagePolicy::bypass());
  const Pipeline three({{"X", 0.5, 0.5, {{0.5, 0.0}, {0.99, 0.5}, {0.99, 0.5}}}});
  const SolverReport r3 = solve_exact(three, f);
  CHECK(3.0 * r3.score > 2.57);
  CHECK(r3.policy.groups[0].stages[0] == StagePolicy::bypass());
  CHECK(r3.policy.groups[0].stages[1] == StagePolicy::full_use());
  CHECK(r3.policy.groups[0].stages[2] == StagePolicy::full_use());
}

TEST_CASE("exact outputs are fair, structured and agree with the structured oracle") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 3});
    const Objective obj = rep % 3 == 0 ? Objective::reciprocal(unit(rng))
                                       : Objective::linear(unit(rng));
    const SolverReport r = solve_exact(pl, obj);
    CHECK(check_eo(pl, r.policy, 1e-9).satisfied);
    CHECK(std::fabs(r.score - obj.score(r.evaluation)) <= 1e-12);
    for (const GroupPolicy& g : r.policy.groups) {
      int partial = 0;
      for (const StagePolicy& s : g.stages) {
        CHECK(is_structured(s));
        partial += is_partial(s) ? 1 : 0;
      }
      CHECK(partial <= 1);
    }
    const SolverReport scan = structured_grid_search(pl, obj, 2001);
    CHECK(std::fabs(scan.score - r.score) <= 1e-6);
  }
}

TEST_CASE("objective extremes") {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 40; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 3});
    CHECK(std::fabs(solve_exact(pl, Objective::linear(1.0)).score - max_precision(pl)) <= 1e-9);
    CHECK(std::fabs(solve_exact(pl, Objective::precision()).score - max_precision(pl)) <= 1e-9);
    const SolverReport recall = solve_exact(pl, Objective::linear(0.0));
    CHECK(std::fabs(recall.score - 1.0) <= 1e-12);
  }
}

TEST_CASE("custom objectives use the dense inner scan") {
  std::mt19937_64 rng(45);
  for (int rep = 0; rep < 20; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng, {2, 2});
    const Objective custom = Objective::custom(
        "half", [](double r, double p) { return 0.5 * r + 0.5 * p; }, Sense::kMaximize);
    const double linear = solve_exact(pl, Objective::linear(0.5)).score;
    const double dense = solve_exact(pl, custom).score;
    CHECK(dense <= linear + 1e-12);
    CHECK(dense >= linear - 1e-4);
  }
}

TEST_CASE("thread count does not change the answer") {
  std::mt19937_64 rng(46);
  for (int rep = 0; rep < 20; ++rep) {
    const Pipeline pl = testing::random_pipeline(rng);
    const Objective obj = Objective::linear(0.3 + 0.02 * rep);
    ExactOptions one;
    one.threads = 1;
    ExactOptions many;
    many.threads = 4;
    const SolverReport a = solve_exact(pl, obj, one);
    const SolverReport b = solve_exact(pl, obj, many);
    CHECK(a.score == b.score);
    CHECK(a.certificate == b.certificate);
    CHECK(a.diagnostics.at("configuration_index") == b.diagnostics.at("configuration_index"));
  }
}
