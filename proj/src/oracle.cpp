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

#include "fairscreen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fairscreen/errors.hpp"
#include "fairscreen/kernels.hpp"

namespace fairscreen {

namespace {

// Equal policies can score a few ulps apart; compare on a 1e-12 lattice.
double quantize(double score) {
  if (!std::isfinite(score) || std::fabs(score) > 1e3) return score;
  return std::round(score * 1e12) / 1e12;
}


struct PointSet {
  std::vector<double> tpr;
  std::vector<double> fpr;
  std::vector<std::uint64_t> by_tpr;  // indices sorted by (tpr, index)
};

std::uint64_t points_per_group(int g, std::size_t stages, std::uint64_t budget) {
  std::uint64_t n = 1;
  const auto base = static_cast<std::uint64_t>(g) + 1;
  for (std::size_t i = 0; i < 2 * stages; ++i) {
    if (n > budget / base) {
      throw Error(ErrorCode::kSizeLimit, "grid has too many points per group");
    }
    n *= base;
  }
  if (n > budget) throw Error(ErrorCode::kSizeLimit, "grid has too many points per group");
  return n;
}

PointSet enumerate_points(const Group& group, int g, std::uint64_t count) {
  PointSet ps;
  ps.tpr.resize(count);
  ps.fpr.resize(count);
  const std::size_t k = group.stages.size();
  for (std::uint64_t p = 0; p < count; ++p) {
    const auto stages = grid_point_policy(p, g, k);
    double tpr = 1.0;
    double fpr = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const StageRates r = stage_rates(group.stages[i], stages[i]);
      tpr *= r.m;
      fpr *= r.n;
    }
    ps.tpr[p] = tpr;
    ps.fpr[p] = fpr;
  }
  ps.by_tpr.resize(count);
  std::iota(ps.by_tpr.begin(), ps.by_tpr.end(), std::uint64_t{0});
  std::sort(ps.by_tpr.begin(), ps.by_tpr.end(), [&](std::uint64_t a, std::uint64_t b) {
    return ps.tpr[a] != ps.tpr[b] ? ps.tpr[a] < ps.tpr[b] : a < b;
  });
  return ps;
}

class Joiner {
 public:
  Joiner(const std::vector<PointSet>& sets, double band, bool odds,
         const std::function<void(const GridCandidate&)>& visit)
      : sets_(sets), band_(band), odds_(odds), visit_(visit),
        points_(sets.size()), tpr_(sets.size()), fpr_(sets.size()) {}

  void run() { descend(0, 0, 0, 0, 0); }

 private:
  void descend(std::size_t x, double tlo, double thi, double flo, double fhi) {
    if (x == sets_.size()) {
      visit_({points_, tpr_, fpr_});
      return;
    }
    const PointSet& ps = sets_[x];
    std::vector<std::uint64_t> picks;
    if (x == 0) {
      picks.resize(ps.tpr.size());
      std::iota(picks.begin(), picks.end(), std::uint64_t{0});
    } else {
      // Slightly widened window; the exact test happens below.
      const double lo = thi - band_ - 1e-12;
      const double hi = tlo + band_ + 1e-12;
      auto first = std::lower_bound(ps.by_tpr.begin(), ps.by_tpr.end(), lo,
                                    [&](std::uint64_t i, double v) { return ps.tpr[i] < v; });
      for (auto it = first; it != ps.by_tpr.end() && ps.tpr[*it] <= hi; ++it) picks.push_back(*it);
      std::sort(picks.begin(), picks.end());
    }
    for (std::uint64_t p : picks) {
      const double t = ps.tpr[p];
      const double f = ps.fpr[p];
      const double ntlo = x == 0 ? t : std::min(tlo, t);
      const double nthi = x == 0 ? t : std::max(thi, t);
      const double nflo = x == 0 ? f : std::min(flo, f);
      const double nfhi = x == 0 ? f : std::max(fhi, f);
      if (nthi - ntlo > band_) continue;
      if (odds_ && nfhi - nflo > band_) continue;
      points_[x] = p;
      tpr_[x] = t;
      fpr_[x] = f;
      descend(x + 1, ntlo, nthi, nflo, nfhi);
    }
  }

  const std::vector<PointSet>& sets_;
  double band_;
  bool odds_;
  const std::function<void(const GridCandidate&)>& visit_;
  std::vector<std::uint64_t> points_;
  std::vector<double> tpr_;
  std::vector<double> fpr_;
};

}  // namespace

std::vector<StagePolicy> grid_point_policy(std::uint64_t point, int g, std::size_t stages) {
  const auto base = static_cast<std::uint64_t>(g) + 1;
  std::vector<StagePolicy> out(stages);
  for (std::size_t i = stages; i-- > 0;) {
    const auto d0 = static_cast<double>(point % base);
    point /= base;
    const auto d1 = static_cast<double>(point % base);
    point /= base;
    out[i] = {(g - d1) / g, (g - d0) / g};
  }
  return out;
}

void for_each_grid_policy(const Pipeline& pipeline, const GridSpec& spec,
                          GridConstraint constraint,
                          const std::function<void(const GridCandidate&)>& visit) {
  if (spec.g < 2) throw Error(ErrorCode::kInvalidParams, "grid needs g >= 2");
  if (!(spec.band >= 0.0)) throw Error(ErrorCode::kInvalidParams, "band must be nonnegative");
  const std::size_t n = pipeline.num_groups();
  const std::uint64_t count =
      points_per_group(spec.g, pipeline.num_stages(), spec.point_budget);
  if (constraint == GridConstraint::kNone) {
    std::uint64_t total = 1;
    for (std::size_t x = 0; x < n; ++x) {
      if (total > spec.product_budget / count) {
        throw Error(ErrorCode::kSizeLimit, "unconstrained grid product exceeds budget");
      }
      total *= count;
    }
  }
  std::vector<PointSet> sets;
  for (const Group& g : pipeline.groups()) sets.push_back(enumerate_points(g, spec.g, count));

  if (constraint == GridConstraint::kNone) {
    std::vector<std::uint64_t> points(n, 0);
    std::vector<double> tpr(n), fpr(n);
    while (true) {
      for (std::size_t x = 0; x < n; ++x) {
        tpr[x] = sets[x].tpr[points[x]];
        fpr[x] = sets[x].fpr[points[x]];
      }
      visit({points, tpr, fpr});
      std::size_t x = n;
      while (x-- > 0) {
        if (++points[x] < count) break;
        points[x] = 0;
      }
      if (x == static_cast<std::size_t>(-1)) break;
    }
    return;
  }
  Joiner(sets, spec.band, constraint == GridConstraint::kEqualizedOdds, visit).run();
}

SolverReport grid_search(const Pipeline& pipeline, const Objective& objective,
                         const GridSpec& spec, GridConstraint constraint) {
  const double q = pipeline.qualified_mass();
  const double orient = objective.sense() == Sense::kMaximize ? 1.0 : -1.0;
  bool found = false;
  double best_key = 0.0;
  double best_recall = 0.0;
  std::vector<std::uint64_t> best_points;
  std::uint64_t accepted = 0;
  for_each_grid_policy(pipeline, spec, constraint, [&](const GridCandidate& c) {
    ++accepted;
    double pq = 0.0;
    double pu = 0.0;
    for (std::size_t x = 0; x < c.tpr.size(); ++x) {
      pq += pipeline.group(x).q * c.tpr[x];
      pu += pipeline.group(x).u * c.fpr[x];
    }
    std::optional<double> precision;
    if (pq + pu > 0.0) precision = pq / (pq + pu);
    const double s = objective.score(pq / q, precision);
    const double key = orient * quantize(s);
    const double recall = pq / q;
    if (!found || key > best_key || (key == best_key && recall > best_recall)) {
      found = true;
      best_key = key;
      best_recall = recall;
      best_points.assign(c.points.begin(), c.points.end());
    }
  });
  if (!found) throw std::logic_error("grid search accepted no policy");
  Policy policy;
  for (std::size_t x = 0; x < pipeline.num_groups(); ++x) {
    policy.groups.push_back({pipeline.group(x).id,
                             grid_point_policy(best_points[x], spec.g, pipeline.num_stages())});
  }
  SolverReport report = make_report("oracle", pipeline, objective, std::move(policy));
  report.certificate = "grid step 1/" + std::to_string(spec.g);
  report.diagnostics["grid"] = spec.g;
  report.diagnostics["band"] = spec.band;
  report.diagnostics["accepted_policies"] = static_cast<double>(accepted);
  return report;
}

SolverReport structured_grid_search(const Pipeline& pipeline, const Objective& objective,
                                    std::size_t t_resolution, const ConfigPredicate& keep,
                                    std::uint64_t budget) {
  const ConfigurationSpace space(pipeline, budget);
  const std::size_t n = std::max<std::size_t>(t_resolution, 2);
  const bool kernel = objective.kind() != Objective::Kind::kCustom;
  bool found = false;
  double best = objective.worst();
  double best_t = 0.0;
  std::uint64_t best_index = 0;
  std::uint64_t scanned = 0;
  Configuration config;

  for (std::uint64_t i = 0; i < space.size(); ++i) {
    space.decode(i, config);
    if (keep && !keep(config)) continue;
    const auto ip = build_inner(pipeline, config);
    if (!ip) continue;
    ++scanned;
    std::vector<double> ts{ip->t_hi};
    if (!ip->lo_open) ts.push_back(ip->t_lo);
    const double span = ip->t_hi - ip->t_lo;
    if (span > 0.0) {
      const double step = span / static_cast<double>(ip->lo_open ? n : n - 1);
      const double t0 = ip->lo_open ? ip->t_lo + step : ip->t_lo;
      if (kernel) {
        const kernels::ScanParams params{objective.alpha(), ip->q, ip->c, ip->d,
                                         objective.kind() == Objective::Kind::kReciprocal};
        const kernels::ScanResult r = kernels::scan_objective(params, t0, step, n);
        ts.push_back(t0 + static_cast<double>(r.index) * step);
      } else {
        for (std::size_t j = 0; j < n; ++j) ts.push_back(t0 + static_cast<double>(j) * step);
      }
    }
    for (double t : ts) {
      if (!(t > 0.0)) continue;
      const double s = objective.score(t, ip->precision(t));
      if (!found || objective.better(s, best)) {
        found = true;
        best = s;
        best_t = t;
        best_index = i;
      }
    }
  }
  if (!found) throw Error(ErrorCode::kInvalidParams, "no configuration passed the filter");
  const Configuration winner = space.at(best_index);
  SolverReport report = make_report("structured-oracle", pipeline, objective,
                                    policy_from_config(pipeline, winner, best_t));
  std::ostringstream cert;
  cert << describe(pipeline, winner) << "; t=" << best_t;
  report.certificate = cert.str();
  report.diagnostics["configurations"] = static_cast<double>(space.size());
  report.diagnostics["scanned_configurations"] = static_cast<double>(scanned);
  report.diagnostics["t_resolution"] = static_cast<double>(n);
  report.diagnostics["scan_score"] = best;
  return report;
}

std::optional<double> structured_best_precision_at(const Pipeline& pipeline, double t) {
  std::optional<double> best;
  enumerate_configs(pipeline, [&](const Configuration& config) {
    const auto ip = build_inner(pipeline, config);
    if (!ip || t > ip->t_hi || t < ip->t_lo || (ip->lo_open && !(t > 0.0))) return;
    const double p = ip->precision(t);
    if (!best || p > *best) best = p;
  });
  return best;
}

MonteCarloEstimate monte_carlo(const Pipeline& pipeline, const Policy& policy,
                               std::uint64_t n_candidates, std::uint64_t seed) {
  if (n_candidates == 0) throw Error(ErrorCode::kInvalidParams, "need at least one candidate");
  const auto stages = align(pipeline, policy);
  const std::size_t n = pipeline.num_groups();
  std::vector<double> weights;
  for (const Group& g : pipeline.groups()) {
    weights.push_back(g.q);
    weights.push_back(g.u);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::uint64_t> seen(2 * n, 0), promoted(2 * n, 0);

  for (std::uint64_t c = 0; c < n_candidates; ++c) {
    const std::size_t cell = pick(rng);
    const Group& g = pipeline.group(cell / 2);
    const bool qualified = cell % 2 == 0;
    const auto& plan = *stages[cell / 2];
    bool advanced = true;
    for (std::size_t i = 0; i < plan.size() && advanced; ++i) {
      const double pass_rate = qualified ? g.stages[i].tau1 : g.stages[i].tau0;
      const bool passed = unit(rng) < pass_rate;
      advanced = unit(rng) < (passed ? plan[i].pi1 : plan[i].pi0);
    }
    ++seen[cell];
    if (advanced) ++promoted[cell];
  }

  auto estimate = [](std::uint64_t hits, std::uint64_t trials) {
    Estimate e;
    e.trials = trials;
    if (trials == 0) return e;
    e.value = static_cast<double>(hits) / static_cast<double>(trials);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
    return e;
  };
  MonteCarloEstimate out;
  std::uint64_t qual = 0, qual_hits = 0, all_hits = 0;
  for (std::size_t x = 0; x < n; ++x) {
    out.tpr.push_back(estimate(promoted[2 * x], seen[2 * x]));
    out.fpr.push_back(estimate(promoted[2 * x + 1], seen[2 * x + 1]));
    qual += seen[2 * x];
    qual_hits += promoted[2 * x];
    all_hits += promoted[2 * x] + promoted[2 * x + 1];
  }
  out.recall = estimate(qual_hits, qual);
  if (all_hits > 0) out.precision = estimate(qual_hits, all_hits);
  return out;
}

}  // namespace fairscreen
