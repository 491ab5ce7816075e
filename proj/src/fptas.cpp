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

#include "fairscreen/fptas.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fairscreen/errors.hpp"
#include "fairscreen/kernels.hpp"
#include "fairscreen/parallel.hpp"
#include "fairscreen/ratio.hpp"

namespace fairscreen {

namespace {

std::uint64_t triangle(int l) {
  const auto n = static_cast<std::uint64_t>(l) + 1;
  return n * (n + 1) / 2;
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kInvalidEps, "eps must lie in (0,1)");
}

void set_bits(std::uint64_t* row, int count) {
  for (int w = 0; count > 0; ++w, count -= 64) {
    row[w] = count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
  }
}

}  // namespace

int grid_index_bound(double eps_bar, double bound) {
  const double base = 1.0 - eps_bar;
  double estimate = std::ceil(std::log(bound) / std::log1p(-eps_bar));
  if (!(estimate <= Grid::kMaxLevels)) {
    throw Error(ErrorCode::kSizeLimit, "grid too fine: lower bound or eps too small");
  }
  int l = std::max(0, static_cast<int>(estimate));
  while (std::pow(base, l) > bound) ++l;
  while (l > 0 && std::pow(base, l - 1) <= bound) --l;
  return l;
}

Grid::Grid(double eps_bar, double l_tpr_bound, double l_fpr_bound)
    : eps_bar_(eps_bar), tpr_bound_(l_tpr_bound), fpr_bound_(l_fpr_bound) {
  if (!(eps_bar > 0.0 && eps_bar < 1.0)) {
    throw Error(ErrorCode::kInvalidEps, "grid accuracy must lie in (0,1)");
  }
  if (!(l_tpr_bound > 0.0 && l_tpr_bound <= 1.0) || !(l_fpr_bound > 0.0 && l_fpr_bound <= 1.0)) {
    throw Error(ErrorCode::kInvalidBounds, "grid lower bounds must lie in (0,1]");
  }
  l_tpr_ = grid_index_bound(eps_bar, l_tpr_bound);
  l_fpr_ = grid_index_bound(eps_bar, l_fpr_bound);
  const int top = std::max(l_tpr_, l_fpr_);
  values_.resize(static_cast<std::size_t>(top) + 1);
  for (int j = 0; j <= top; ++j) values_[static_cast<std::size_t>(j)] = std::pow(1.0 - eps_bar, j);
}

std::optional<StagePolicy> stage_feasible(const TestStats& test, double a, double b) {
  StagePolicy p;
  if (test.tau0 == 0.0) {
    p = {1.0, std::min(1.0, b)};
  } else if (b >= test.tau0) {
    p = {1.0, std::min(1.0, (b - test.tau0) / (1.0 - test.tau0))};
  } else {
    p = {b / test.tau0, 0.0};
  }
  if (test.tau1 * p.pi1 + (1.0 - test.tau1) * p.pi0 >= a) return p;
  return std::nullopt;
}

DpStats expected_dp_counts(std::size_t stages, int l_tpr, int l_fpr) {
  DpStats s;
  s.feasibility_checks = stages * static_cast<std::uint64_t>(l_tpr + 1) *
                         static_cast<std::uint64_t>(l_fpr + 1);
  s.pair_evaluations = (stages - 1) * triangle(l_tpr) * triangle(l_fpr);
  return s;
}

DpTable::DpTable(const Group& group, const Grid& grid)
    : stages_(group.stages), grid_(grid) {
  const int l1 = grid.l_tpr();
  const int l0 = grid.l_fpr();
  const std::size_t rows = static_cast<std::size_t>(l1) + 1;
  words_ = (static_cast<std::size_t>(l0) + 1 + 63) / 64;
  words_ = (words_ + 3) / 4 * 4;
  const std::size_t k = stages_.size();
  bits_.assign(k, std::vector<std::uint64_t>(rows * words_, 0));
  prefix_.assign(k, std::vector<int>(rows, -1));

  for (std::size_t s = 0; s < k; ++s) {
    for (int j1 = 0; j1 <= l1; ++j1) {
      int last = -1;
      bool gap = false;
      for (int j0 = 0; j0 <= l0; ++j0) {
        ++stats_.feasibility_checks;
        if (stage_feasible(stages_[s], grid.value(j1), grid.value(j0))) {
          if (gap) throw std::logic_error("stage feasibility is not a prefix in j0");
          last = j0;
        } else {
          gap = true;
        }
      }
      prefix_[s][static_cast<std::size_t>(j1)] = last;
    }
  }

  for (int j1 = 0; j1 <= l1; ++j1) {
    set_bits(bits_[0].data() + static_cast<std::size_t>(j1) * words_, prefix_[0][j1] + 1);
  }

  const std::uint64_t tail_mask =
      (l0 + 1) % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << ((l0 + 1) % 64)) - 1;
  const std::size_t last_word = static_cast<std::size_t>(l0) / 64;
  std::vector<std::uint64_t> a(words_), b(words_);
  std::vector<char> empty(rows);
  for (std::size_t s = 1; s < k; ++s) {
    const std::vector<std::uint64_t>& prev = bits_[s - 1];
    for (std::size_t r = 0; r < rows; ++r) {
      const auto* p = prev.data() + r * words_;
      empty[r] = std::all_of(p, p + words_, [](std::uint64_t w) { return w == 0; });
    }
    for (int tpr = 0; tpr <= l1; ++tpr) {
      std::uint64_t* out = bits_[s].data() + static_cast<std::size_t>(tpr) * words_;
      for (int j1 = 0; j1 <= tpr; ++j1) {
        stats_.pair_evaluations += triangle(l0);
        const int reach = prefix_[s][static_cast<std::size_t>(j1)];
        const auto src_row = static_cast<std::size_t>(tpr - j1);
        if (reach < 0 || empty[src_row]) continue;
        // OR of the source row shifted by every j0 in [0, reach], by doubling.
        std::copy_n(prev.data() + src_row * words_, words_, a.data());
        int covered = 1;
        while (covered < reach + 1) {
          const int step = std::min(covered, reach + 1 - covered);
          kernels::shift_or(b, a, static_cast<std::size_t>(step));
          std::swap(a, b);
          covered += step;
          ++stats_.or_operations;
        }
        kernels::or_into({out, words_}, a);
        ++stats_.or_operations;
      }
      out[last_word] &= tail_mask;
      std::fill(out + last_word + 1, out + words_, 0);
    }
  }
}

const std::uint64_t* DpTable::row(std::size_t stage, int j1) const {
  return bits_.at(stage).data() + static_cast<std::size_t>(j1) * words_;
}

bool DpTable::at(std::size_t stage, int j1, int j0) const {
  if (j1 < 0 || j0 < 0 || j1 > grid_.l_tpr() || j0 > grid_.l_fpr()) return false;
  const std::uint64_t* r = row(stage, j1);
  return ((r[static_cast<std::size_t>(j0) / 64] >> (j0 % 64)) & 1) != 0;
}

int DpTable::max_fpr_index(std::size_t stage, int j1) const {
  const std::uint64_t* r = row(stage, j1);
  for (std::size_t w = words_; w-- > 0;) {
    if (r[w] != 0) return static_cast<int>(w * 64 + 63 - std::countl_zero(r[w]));
  }
  return -1;
}

int DpTable::feasible_prefix(std::size_t stage, int j1) const {
  return prefix_.at(stage).at(static_cast<std::size_t>(j1));
}

std::optional<DpParent> DpTable::parent(std::size_t stage, int j1, int j0) const {
  if (stage == 0 || !at(stage, j1, j0)) return std::nullopt;
  for (int d0 = 0; d0 <= j0; ++d0) {
    for (int d1 = 0; d1 <= j1; ++d1) {
      if (d0 > prefix_[stage][static_cast<std::size_t>(d1)]) continue;
      if (!at(stage - 1, j1 - d1, j0 - d0)) continue;
      return DpParent{d1, d0, *stage_feasible(stages_[stage], grid_.value(d1), grid_.value(d0))};
    }
  }
  return std::nullopt;
}

std::vector<StagePolicy> DpTable::reconstruct(int j1, int j0) const {
  const std::size_t k = stages_.size();
  if (!at(k - 1, j1, j0)) return {};
  std::vector<StagePolicy> out(k);
  for (std::size_t s = k - 1; s >= 1; --s) {
    const DpParent p = *parent(s, j1, j0);
    out[s] = p.stage;
    j1 -= p.j1;
    j0 -= p.j0;
  }
  out[0] = *stage_feasible(stages_[0], grid_.value(j1), grid_.value(j0));
  return out;
}

FptasBounds fptas_bounds_f(const Pipeline& pipeline, double eps) {
  check_eps(eps);
  const double k = static_cast<double>(pipeline.num_stages());
  const double eps_bar = eps / (2.0 * k);
  const double q = pipeline.qualified_mass();
  const double u = pipeline.unqualified_mass();
  FptasBounds b;
  b.tpr = std::min(1.0, eps / (1.0 - eps) * std::pow(1.0 - eps_bar, k - 1.0));
  b.fpr = u > 0.0 ? std::min(1.0, eps * eps * q / ((2.0 - eps) * (1.0 - eps) * u)) : 1.0;
  return b;
}

FptasBounds fptas_bounds_g(const Pipeline& pipeline, double eps) {
  check_eps(eps);
  const double k = static_cast<double>(pipeline.num_stages());
  const double eps_bar = eps / (2.0 * k);
  double tau_min = 1.0;
  for (const Group& g : pipeline.groups()) {
    for (const TestStats& t : g.stages) tau_min = std::min(tau_min, t.tau1);
  }
  const double floor = std::pow(tau_min, k);
  const double q = pipeline.qualified_mass();
  const double u = pipeline.unqualified_mass();
  FptasBounds b;
  b.tpr = floor * std::pow(1.0 - eps_bar, k - 1.0);
  b.fpr = u > 0.0 ? std::min(1.0, eps * q * floor / ((2.0 - eps) * u)) : 1.0;
  return b;
}

namespace {

struct Boundary {
  SolverReport bypass;
  SolverReport ratio;
};

Boundary boundary_policies(const Pipeline& pipeline, const Objective& objective) {
  return {make_report("fptas", pipeline, objective,
                      Policy::uniform(pipeline, StagePolicy::bypass())),
          make_report("fptas", pipeline, objective,
                      opportunity_ratio(pipeline, RatioPolicyKind::kFirstStage))};
}

// Replaces `report` with a boundary policy that scores strictly better.
void keep_best(SolverReport& report, Boundary& boundary, const Objective& objective) {
  report.diagnostics["bypass_score"] = boundary.bypass.score;
  report.diagnostics["ratio_score"] = boundary.ratio.score;
  for (SolverReport* alt : {&boundary.bypass, &boundary.ratio}) {
    if (!objective.better(alt->score, report.score)) continue;
    alt->diagnostics = report.diagnostics;
    alt->certificate = alt == &boundary.bypass ? "all-bypass" : "opportunity-ratio";
    alt->eps = report.eps;
    report = *alt;
  }
}

SolverReport run_dp(const Pipeline& pipeline, const Objective& objective, double eps,
                    const FptasBounds& bounds, const FptasOptions& options) {
  const std::size_t k = pipeline.num_stages();
  const std::size_t n = pipeline.num_groups();
  const Grid grid(eps / (2.0 * static_cast<double>(k)), bounds.tpr, bounds.fpr);

  std::vector<std::optional<DpTable>> tables(n);
  parallel_for(n, resolve_threads(options.threads),
               [&](std::size_t x) { tables[x].emplace(pipeline.group(x), grid); });

  const double q = pipeline.qualified_mass();
  int best_j1 = -1;
  std::vector<int> best_j0;
  double best_score = objective.worst();
  std::vector<int> j0(n);
  for (int j1 = 0; j1 <= grid.l_tpr(); ++j1) {
    double false_mass = 0.0;
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      j0[x] = tables[x]->max_fpr_index(k - 1, j1);
      ok = j0[x] >= 0;
      if (ok) false_mass += pipeline.group(x).u * grid.value(j0[x]);
    }
    if (!ok) continue;
    const double t = grid.value(j1);
    const double score = objective.score(t, q * t / (q * t + false_mass));
    if (best_j1 < 0 || objective.better(score, best_score)) {
      best_j1 = j1;
      best_j0 = j0;
      best_score = score;
    }
  }
  if (best_j1 < 0) throw std::logic_error("grid table has no reachable final cell");

  Policy policy;
  const double target = grid.value(best_j1);
  for (std::size_t x = 0; x < n; ++x) {
    const Group& g = pipeline.group(x);
    GroupPolicy gp{g.id, tables[x]->reconstruct(best_j1, best_j0[x])};
    double tpr = 1.0;
    for (std::size_t i = 0; i < k; ++i) tpr *= stage_rates(g.stages[i], gp.stages[i]).m;
    const double scale = std::min(1.0, target / tpr);
    gp.stages[0].pi1 *= scale;
    gp.stages[0].pi0 *= scale;
    policy.groups.push_back(std::move(gp));
  }

  SolverReport report = make_report("fptas", pipeline, objective, std::move(policy));
  report.eps = eps;
  std::ostringstream cert;
  cert << "tpr index " << best_j1 << ", fpr indices [";
  for (std::size_t x = 0; x < n; ++x) cert << (x ? "," : "") << best_j0[x];
  cert << "]";
  report.certificate = cert.str();

  DpStats total;
  for (const auto& t : tables) {
    total.feasibility_checks += t->stats().feasibility_checks;
    total.pair_evaluations += t->stats().pair_evaluations;
    total.or_operations += t->stats().or_operations;
  }
  auto& d = report.diagnostics;
  d["eps_bar"] = grid.eps_bar();
  d["tpr_bound"] = grid.tpr_bound();
  d["fpr_bound"] = grid.fpr_bound();
  d["l_tpr"] = grid.l_tpr();
  d["l_fpr"] = grid.l_fpr();
  d["grid_score"] = best_score;
  d["grid_tpr_index"] = best_j1;
  d["dp_score"] = report.score;
  d["feasibility_checks"] = static_cast<double>(total.feasibility_checks);
  d["pair_evaluations"] = static_cast<double>(total.pair_evaluations);
  d["or_operations"] = static_cast<double>(total.or_operations);

  Boundary boundary = boundary_policies(pipeline, objective);
  keep_best(report, boundary, objective);
  return report;
}

}  // namespace

SolverReport solve_fptas_f(const Pipeline& pipeline, double alpha, double eps,
                           const FptasOptions& options) {
  check_eps(eps);
  const Objective objective = Objective::linear(alpha);
  if (alpha <= eps || alpha >= 1.0 - eps) {
    Boundary boundary = boundary_policies(pipeline, objective);
    const bool ratio = boundary.ratio.score > boundary.bypass.score;
    SolverReport report = ratio ? boundary.ratio : boundary.bypass;
    report.eps = eps;
    report.certificate = ratio ? "opportunity-ratio" : "all-bypass";
    report.diagnostics["bypass_score"] = boundary.bypass.score;
    report.diagnostics["ratio_score"] = boundary.ratio.score;
    return report;
  }
  return run_dp(pipeline, objective, eps, fptas_bounds_f(pipeline, eps), options);
}

SolverReport solve_fptas_g(const Pipeline& pipeline, double alpha, double eps,
                           const FptasOptions& options) {
  check_eps(eps);
  return run_dp(pipeline, Objective::reciprocal(alpha), eps, fptas_bounds_g(pipeline, eps),
                options);
}

SolverReport solve_fptas_custom(const Pipeline& pipeline, const Objective& objective,
                                double eps, const FptasBounds& bounds,
                                const FptasOptions& options) {
  check_eps(eps);
  if (!(bounds.tpr > 0.0 && bounds.tpr <= 1.0) || !(bounds.fpr > 0.0 && bounds.fpr <= 1.0)) {
    throw Error(ErrorCode::kInvalidBounds, "lower bounds must lie in (0,1]");
  }
  return run_dp(pipeline, objective, eps, bounds, options);
}

}  // namespace fairscreen
