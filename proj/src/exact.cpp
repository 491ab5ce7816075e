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

#include "fairscreen/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fairscreen/errors.hpp"
#include "fairscreen/parallel.hpp"

namespace fairscreen {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t group_radix(std::size_t k) {
  if (k >= 63) return kSaturated;
  return saturating_mul(k, std::uint64_t{1} << k);
}

std::uint64_t count(std::size_t groups, std::size_t k) {
  std::uint64_t n = 1;
  const std::uint64_t r = group_radix(k);
  for (std::size_t x = 0; x < groups; ++x) n = saturating_mul(n, r);
  return n;
}

// Fixes score noise so that equal policies reached through different
// configurations compare equal.
double quantize(double score) {
  if (!std::isfinite(score) || std::fabs(score) > 1e3) return score;
  return std::round(score * 1e12) / 1e12;
}

struct Candidate {
  double key = 0.0;  // quantized, oriented so that larger is better
  double score = 0.0;
  double recall = 0.0;
  double t = 0.0;
  std::uint64_t index = 0;
  bool valid = false;
};

bool preferred(const Candidate& a, const Candidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.key != b.key) return a.key > b.key;
  if (a.recall != b.recall) return a.recall > b.recall;
  return a.index < b.index;
}

}  // namespace

ConfigurationSpace::ConfigurationSpace(const Pipeline& pipeline, std::uint64_t budget)
    : num_groups_(pipeline.num_groups()),
      num_stages_(pipeline.num_stages()),
      radix_(group_radix(pipeline.num_stages())),
      size_(count(pipeline.num_groups(), pipeline.num_stages())) {
  if (size_ > budget) {
    std::ostringstream os;
    os << "configuration count ";
    if (size_ == kSaturated) {
      os << "overflows";
    } else {
      os << size_;
    }
    os << " exceeds budget " << budget;
    throw Error(ErrorCode::kSizeLimit, os.str());
  }
}

void ConfigurationSpace::decode(std::uint64_t index, Configuration& out) const {
  const std::uint64_t half = std::uint64_t{1} << num_stages_;
  out.groups.resize(num_groups_);
  for (std::size_t x = num_groups_; x-- > 0;) {
    const std::uint64_t digit = index % radix_;
    index /= radix_;
    GroupConfig& g = out.groups[x];
    g.partial_level = static_cast<std::size_t>(digit / half);
    const std::uint64_t rest = digit % half;
    g.partial_type = (rest & 1) != 0 ? PartialType::kFailFraction : PartialType::kPassFraction;
    std::uint64_t bits = rest >> 1;
    g.usage.assign(num_stages_, LevelUsage::kFullUse);
    for (std::size_t i = 0; i < num_stages_; ++i) {
      if (i == g.partial_level) continue;
      g.usage[i] = (bits & 1) != 0 ? LevelUsage::kBypass : LevelUsage::kFullUse;
      bits >>= 1;
    }
  }
}

Configuration ConfigurationSpace::at(std::uint64_t index) const {
  Configuration c;
  decode(index, c);
  return c;
}

std::uint64_t configuration_count(const Pipeline& pipeline) {
  return count(pipeline.num_groups(), pipeline.num_stages());
}

void enumerate_configs(const Pipeline& pipeline,
                       const std::function<void(const Configuration&)>& visit,
                       std::uint64_t budget) {
  const ConfigurationSpace space(pipeline, budget);
  Configuration c;
  for (std::uint64_t i = 0; i < space.size(); ++i) {
    space.decode(i, c);
    visit(c);
  }
}

std::string describe(const Pipeline& pipeline, const Configuration& config) {
  std::ostringstream os;
  for (std::size_t x = 0; x < config.groups.size(); ++x) {
    const GroupConfig& g = config.groups[x];
    if (x > 0) os << "; ";
    os << pipeline.group(x).id << ":";
    for (std::size_t i = 0; i < g.usage.size(); ++i) {
      os << (i == 0 ? " " : ",");
      if (i == g.partial_level) {
        os << (g.partial_type == PartialType::kPassFraction ? "pass-fraction"
                                                            : "fail-fraction");
      } else {
        os << (g.usage[i] == LevelUsage::kFullUse ? "full" : "bypass");
      }
    }
  }
  return os.str();
}

double InnerProblem::precision(double t) const { return q * t / (c * t + d); }

std::optional<InnerProblem> build_inner(const Pipeline& pipeline,
                                        const Configuration& config) {
  InnerProblem ip;
  ip.q = pipeline.qualified_mass();
  ip.c = ip.q;
  ip.t_hi = std::numeric_limits<double>::infinity();
  ip.lo_open = true;
  for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
    const Group& group = pipeline.group(x);
    const GroupConfig& gc = config.groups.at(x);
    GroupLine line;
    for (std::size_t i = 0; i < group.stages.size(); ++i) {
      if (i == gc.partial_level || gc.usage[i] == LevelUsage::kBypass) continue;
      line.fixed_m *= group.stages[i].tau1;
      line.fixed_n *= group.stages[i].tau0;
    }
    const TestStats& t = group.stages.at(gc.partial_level);
    if (gc.partial_type == PartialType::kPassFraction) {
      line.t_lo = 0.0;
      line.t_hi = line.fixed_m * t.tau1;
      line.a = line.fixed_n * t.tau0 / line.t_hi;
      line.b = 0.0;
    } else {
      ip.lo_open = false;
      line.t_hi = line.fixed_m;
      if (t.tau1 >= 1.0) {
        line.t_lo = line.fixed_m;
        line.a = 0.0;
        line.b = line.fixed_n * t.tau0;
      } else {
        line.t_lo = line.fixed_m * t.tau1;
        line.a = line.fixed_n * (1.0 - t.tau0) / (line.fixed_m * (1.0 - t.tau1));
        line.b = line.fixed_n * (t.tau0 - t.tau1) / (1.0 - t.tau1);
      }
    }
    ip.t_lo = std::max(ip.t_lo, line.t_lo);
    ip.t_hi = std::min(ip.t_hi, line.t_hi);
    ip.c += group.u * line.a;
    ip.d += group.u * line.b;
    ip.lines.push_back(line);
  }
  if (ip.t_lo > ip.t_hi) {
    // Ranges that touch analytically can miss by rounding.
    if (ip.t_lo - ip.t_hi > 1e-12 * std::max(1.0, ip.t_hi)) return std::nullopt;
    ip.t_lo = ip.t_hi;
  }
  return ip;
}

InnerOptimum optimize_inner(const InnerProblem& ip, const Objective& objective,
                            std::size_t custom_resolution) {
  if (!(ip.t_lo <= ip.t_hi) || !(ip.t_hi > 0.0)) {
    throw Error(ErrorCode::kDegenerateInterval, "empty common tpr interval");
  }
  std::vector<double> ts;
  ts.push_back(ip.t_hi);
  if (!ip.lo_open && ip.t_lo < ip.t_hi) ts.push_back(ip.t_lo);

  const double alpha = objective.alpha();
  switch (objective.kind()) {
    case Objective::Kind::kPrecision:
    case Objective::Kind::kLinear:
      if (alpha > 0.0 && alpha < 1.0 && ip.d < 0.0) {
        const double s = std::sqrt(-alpha * ip.q * ip.d / (1.0 - alpha));
        const double t = (s - ip.d) / ip.c;
        if (t > ip.t_lo && t < ip.t_hi) ts.push_back(t);
      }
      break;
    case Objective::Kind::kReciprocal: {
      const double b = (1.0 - alpha) + alpha * ip.d / ip.q;
      ts.resize(1);
      if (b < 0.0 && !ip.lo_open) ts[0] = ip.t_lo;
      break;
    }
    case Objective::Kind::kCustom: {
      const std::size_t n = std::max<std::size_t>(custom_resolution, 2);
      const double span = ip.t_hi - ip.t_lo;
      if (span > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double t = ip.lo_open
                               ? ip.t_lo + span * static_cast<double>(i + 1) / static_cast<double>(n)
                               : ip.t_lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
          ts.push_back(t);
        }
      }
      break;
    }
  }

  InnerOptimum best{ts.front(), objective.score(ts.front(), ip.precision(ts.front()))};
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double s = objective.score(ts[i], ip.precision(ts[i]));
    if (objective.better(s, best.score) || (s == best.score && ts[i] > best.t)) {
      best = {ts[i], s};
    }
  }
  return best;
}

Policy policy_from_config(const Pipeline& pipeline, const Configuration& config, double t) {
  Policy policy;
  for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
    const Group& group = pipeline.group(x);
    const GroupConfig& gc = config.groups.at(x);
    GroupPolicy gp{group.id, {}};
    double fixed_m = 1.0;
    for (std::size_t i = 0; i < group.stages.size(); ++i) {
      if (i == gc.partial_level) {
        gp.stages.push_back(StagePolicy::full_use());
        continue;
      }
      const bool full = gc.usage[i] == LevelUsage::kFullUse;
      gp.stages.push_back(full ? StagePolicy::full_use() : StagePolicy::bypass());
      if (full) fixed_m *= group.stages[i].tau1;
    }
    const TestStats& test = group.stages[gc.partial_level];
    StagePolicy& partial = gp.stages[gc.partial_level];
    if (gc.partial_type == PartialType::kPassFraction) {
      partial = {std::clamp(t / (fixed_m * test.tau1), 0.0, 1.0), 0.0};
    } else {
      const double y =
          test.tau1 >= 1.0 ? 0.0 : (t / fixed_m - test.tau1) / (1.0 - test.tau1);
      partial = {1.0, std::clamp(y, 0.0, 1.0)};
    }
    policy.groups.push_back(std::move(gp));
  }
  return policy;
}

SolverReport solve_exact(const Pipeline& pipeline, const Objective& objective,
                         const ExactOptions& options) {
  const ConfigurationSpace space(pipeline, options.config_budget);
  const unsigned threads = resolve_threads(options.threads);
  const std::uint64_t chunks =
      std::min<std::uint64_t>(space.size(), std::uint64_t{threads} * 16);
  const std::uint64_t per_chunk = (space.size() + chunks - 1) / chunks;
  std::vector<Candidate> best(chunks);
  std::vector<std::uint64_t> feasible(chunks, 0);
  const double orient = objective.sense() == Sense::kMaximize ? 1.0 : -1.0;

  parallel_for(chunks, threads, [&](std::size_t chunk) {
    Configuration config;
    const std::uint64_t begin = chunk * per_chunk;
    const std::uint64_t end = std::min(space.size(), begin + per_chunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      space.decode(i, config);
      const auto ip = build_inner(pipeline, config);
      if (!ip) continue;
      ++feasible[chunk];
      const InnerOptimum opt = optimize_inner(*ip, objective, options.custom_resolution);
      Candidate c{orient * quantize(opt.score), opt.score, opt.t, opt.t, i, true};
      if (preferred(c, best[chunk])) best[chunk] = c;
    }
  });

  Candidate winner;
  std::uint64_t feasible_total = 0;
  for (std::uint64_t chunk = 0; chunk < chunks; ++chunk) {
    feasible_total += feasible[chunk];
    if (preferred(best[chunk], winner)) winner = best[chunk];
  }
  // All-bypass is always a feasible configuration, so a winner exists.
  const Configuration config = space.at(winner.index);
  SolverReport report =
      make_report("exact", pipeline, objective, policy_from_config(pipeline, config, winner.t));
  std::ostringstream cert;
  cert << describe(pipeline, config) << "; t*=" << winner.t;
  report.certificate = cert.str();
  report.diagnostics["configurations"] = static_cast<double>(space.size());
  report.diagnostics["feasible_configurations"] = static_cast<double>(feasible_total);
  report.diagnostics["configuration_index"] = static_cast<double>(winner.index);
  report.diagnostics["t_star"] = winner.t;
  report.diagnostics["inner_score"] = winner.score;
  return report;
}

}  // namespace fairscreen
