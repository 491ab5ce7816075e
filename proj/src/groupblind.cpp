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

#include "fairscreen/groupblind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fairscreen/errors.hpp"
#include "fairscreen/fairness.hpp"
#include "fairscreen/fptas.hpp"

namespace fairscreen {

namespace {

constexpr double kLpTolerance = 1e-12;

// p x + q y (>= or <=) r
struct HalfPlane {
  double p;
  double q;
  double r;
  bool at_least;
};

bool satisfies(const HalfPlane& h, double x, double y) {
  const double v = h.p * x + h.q * y;
  return h.at_least ? v >= h.r - kLpTolerance : v <= h.r + kLpTolerance;
}

std::optional<StagePolicy> solve_box_lp(const std::vector<HalfPlane>& constraints) {
  std::vector<HalfPlane> lines = constraints;
  lines.push_back({1, 0, 0, true});
  lines.push_back({1, 0, 1, true});
  lines.push_back({0, 1, 0, true});
  lines.push_back({0, 1, 1, true});

  std::optional<StagePolicy> best;
  auto consider = [&](double x, double y) {
    if (!(x >= -kLpTolerance && x <= 1 + kLpTolerance && y >= -kLpTolerance &&
          y <= 1 + kLpTolerance)) {
      return;
    }
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    for (const HalfPlane& h : constraints) {
      if (!satisfies(h, x, y)) return;
    }
    if (!best || x - y > best->pi1 - best->pi0 ||
        (x - y == best->pi1 - best->pi0 && x > best->pi1)) {
      best = StagePolicy{x, y};
    }
  };
  for (double x : {0.0, 1.0}) {
    for (double y : {0.0, 1.0}) consider(x, y);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const HalfPlane& u = lines[i];
      const HalfPlane& v = lines[j];
      const double det = u.p * v.q - u.q * v.p;
      if (std::fabs(det) < 1e-15) continue;
      consider((u.r * v.q - u.q * v.r) / det, (u.p * v.r - u.r * v.p) / det);
    }
  }
  return best;
}

// Mixed-radix tuples, last group fastest.
struct Radix {
  std::size_t dims;
  std::size_t base;
  std::size_t size;
  std::vector<std::size_t> stride;

  Radix(std::size_t d, std::size_t b) : dims(d), base(b), size(1), stride(d) {
    for (std::size_t x = d; x-- > 0;) {
      stride[x] = size;
      size *= b;
    }
  }
  int digit(std::size_t index, std::size_t x) const {
    return static_cast<int>(index / stride[x] % base);
  }
};

using Block = std::vector<std::uint8_t>;

// Cells not implied by a neighbour with a larger fpr index in some group.
std::vector<std::size_t> generators(const std::uint8_t* cells, const Radix& r) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < r.size; ++c) {
    if (!cells[c]) continue;
    bool maximal = true;
    for (std::size_t x = 0; x < r.dims && maximal; ++x) {
      if (static_cast<std::size_t>(r.digit(c, x)) + 1 < r.base && cells[c + r.stride[x]]) {
        maximal = false;
      }
    }
    if (maximal) out.push_back(c);
  }
  return out;
}

void close_downward(std::uint8_t* cells, const Radix& r) {
  for (std::size_t x = 0; x < r.dims; ++x) {
    for (std::size_t c = r.size; c-- > 0;) {
      if (!cells[c] && static_cast<std::size_t>(r.digit(c, x)) + 1 < r.base &&
          cells[c + r.stride[x]]) {
        cells[c] = 1;
      }
    }
  }
}

class JointTable {
 public:
  JointTable(const Pipeline& pipeline, const Grid& grid, std::uint64_t budget)
      : pipeline_(pipeline),
        n_(pipeline.num_groups()),
        k_(pipeline.num_stages()),
        l1_(grid.l_tpr()),
        l0_(grid.l_fpr()),
        tpr_(n_, static_cast<std::size_t>(l1_) + 1),
        fpr_(n_, static_cast<std::size_t>(l0_) + 1) {
    const double cells = std::pow(static_cast<double>(l1_ + 1), static_cast<double>(n_)) *
                         std::pow(static_cast<double>(l0_ + 1), static_cast<double>(n_)) *
                         static_cast<double>(k_);
    if (cells > static_cast<double>(budget)) {
      std::ostringstream os;
      os << "group-blind state space of " << cells << " cells exceeds budget " << budget;
      throw Error(ErrorCode::kSizeLimit, os.str());
    }
    const int top = std::max(l1_ + static_cast<int>(k_) + 1, l0_);
    values_.resize(static_cast<std::size_t>(top) + 1);
    for (int j = 0; j <= top; ++j) {
      values_[static_cast<std::size_t>(j)] = std::pow(1.0 - grid.eps_bar(), j);
    }
    build();
  }

  std::size_t tpr_tuples() const { return tpr_.size; }
  std::size_t fpr_tuples() const { return fpr_.size; }
  const Radix& tpr_radix() const { return tpr_; }
  const Radix& fpr_radix() const { return fpr_; }
  double value(int j) const { return values_.at(static_cast<std::size_t>(j)); }
  std::uint64_t generator_pairs() const { return generator_pairs_; }

  bool at(std::size_t stage, std::size_t t, std::size_t c) const {
    return table_[stage][t * fpr_.size + c] != 0;
  }

  std::vector<StagePolicy> reconstruct(std::size_t t, std::size_t c) const {
    std::vector<StagePolicy> out(k_);
    for (std::size_t s = k_ - 1; s >= 1; --s) {
      if (!find_parent(s, t, c, out[s])) {
        throw std::logic_error("group-blind table has no witness for a reachable cell");
      }
    }
    const auto point = stage_point(0, t, c);
    if (!point) throw std::logic_error("group-blind first stage cell is infeasible");
    out[0] = *point;
    return out;
  }

 private:
  std::optional<StagePolicy> stage_point(std::size_t stage, std::size_t d1,
                                         std::size_t d0) const {
    std::vector<HalfPlane> h;
    for (std::size_t x = 0; x < n_; ++x) {
      const TestStats& test = pipeline_.group(x).stages[stage];
      const int j1 = tpr_.digit(d1, x);
      const int j0 = fpr_.digit(d0, x);
      h.push_back({test.tau1, 1 - test.tau1, value(j1 + 1), true});
      h.push_back({test.tau1, 1 - test.tau1, value(j1), false});
      h.push_back({test.tau0, 1 - test.tau0, value(j0), false});
    }
    return solve_box_lp(h);
  }

  bool within(std::size_t small, std::size_t large, const Radix& r) const {
    for (std::size_t x = 0; x < r.dims; ++x) {
      if (r.digit(small, x) > r.digit(large, x)) return false;
    }
    return true;
  }

  // Finds the first (d1, d0) in index order explaining cell (t, c) at stage s
  // and moves (t, c) to the predecessor cell.
  bool find_parent(std::size_t s, std::size_t& t, std::size_t& c, StagePolicy& stage) const {
    for (std::size_t d1 = 0; d1 < tpr_.size; ++d1) {
      if (!within(d1, t, tpr_)) continue;
      for (std::size_t d0 = 0; d0 < fpr_.size; ++d0) {
        if (!within(d0, c, fpr_) || !feasible_[s][d1 * fpr_.size + d0]) continue;
        if (!at(s - 1, t - d1, c - d0)) continue;
        const auto point = stage_point(s, d1, d0);
        if (!point) continue;
        stage = *point;
        t -= d1;
        c -= d0;
        return true;
      }
    }
    return false;
  }

  // Feasible fpr tuples are down-closed, so each line along the last group is
  // a prefix whose length is found by bisection, capped by the lines before it.
  void fill_feasible(std::size_t s, std::size_t d1, std::uint8_t* row) const {
    if (!stage_point(s, d1, 0)) return;
    const std::size_t base = fpr_.base;
    const std::size_t lines = fpr_.size / base;
    std::vector<int> top(lines, -1);
    for (std::size_t line = 0; line < lines; ++line) {
      const std::size_t start = line * base;
      int hi = static_cast<int>(base) - 1;
      for (std::size_t x = 0; x + 1 < fpr_.dims; ++x) {
        if (fpr_.digit(start, x) > 0) {
          hi = std::min(hi, top[(start - fpr_.stride[x]) / base]);
        }
      }
      if (hi < 0 || !stage_point(s, d1, start)) continue;
      int lo = 0;
      while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (stage_point(s, d1, start + static_cast<std::size_t>(mid))) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
      top[line] = lo;
      std::fill(row + start, row + start + lo + 1, std::uint8_t{1});
    }
  }

  void build() {
    const std::size_t nc = fpr_.size;
    feasible_.assign(k_, Block(tpr_.size * nc, 0));
    for (std::size_t s = 0; s < k_; ++s) {
      for (std::size_t d1 = 0; d1 < tpr_.size; ++d1) {
        fill_feasible(s, d1, feasible_[s].data() + d1 * nc);
      }
    }
    table_.assign(k_, Block());
    table_[0] = feasible_[0];
    for (std::size_t s = 1; s < k_; ++s) {
      std::vector<std::vector<std::size_t>> prev_gen(tpr_.size), inc_gen(tpr_.size);
      for (std::size_t t = 0; t < tpr_.size; ++t) {
        prev_gen[t] = generators(table_[s - 1].data() + t * nc, fpr_);
        inc_gen[t] = generators(feasible_[s].data() + t * nc, fpr_);
      }
      Block next(tpr_.size * nc, 0);
      for (std::size_t t = 0; t < tpr_.size; ++t) {
        std::uint8_t* block = next.data() + t * nc;
        for (std::size_t d1 = 0; d1 < tpr_.size; ++d1) {
          if (!within(d1, t, tpr_)) continue;
          const auto& a = inc_gen[d1];
          const auto& b = prev_gen[t - d1];
          for (std::size_t ga : a) {
            for (std::size_t gb : b) {
              ++generator_pairs_;
              std::size_t cell = 0;
              for (std::size_t x = 0; x < n_; ++x) {
                const int sum = std::min(fpr_.digit(ga, x) + fpr_.digit(gb, x), l0_);
                cell += static_cast<std::size_t>(sum) * fpr_.stride[x];
              }
              block[cell] = 1;
            }
          }
        }
        close_downward(block, fpr_);
      }
      table_[s] = std::move(next);
    }
  }

  const Pipeline& pipeline_;
  std::size_t n_;
  std::size_t k_;
  int l1_;
  int l0_;
  Radix tpr_;
  Radix fpr_;
  std::vector<double> values_;
  std::vector<Block> feasible_;
  std::vector<Block> table_;
  std::uint64_t generator_pairs_ = 0;
};

}  // namespace

std::optional<StagePolicy> joint_stage_feasible(std::span<const TestStats> tests,
                                                std::span<const double> a,
                                                std::span<const double> b) {
  return joint_stage_feasible(tests, a, {}, b);
}

std::optional<StagePolicy> joint_stage_feasible(std::span<const TestStats> tests,
                                                std::span<const double> a,
                                                std::span<const double> a_max,
                                                std::span<const double> b) {
  if (a.size() != tests.size() || b.size() != tests.size() ||
      (!a_max.empty() && a_max.size() != tests.size())) {
    throw Error(ErrorCode::kShapeMismatch, "one bound per group is required");
  }
  std::vector<HalfPlane> h;
  for (std::size_t x = 0; x < tests.size(); ++x) {
    const TestStats& t = tests[x];
    h.push_back({t.tau1, 1 - t.tau1, a[x], true});
    if (!a_max.empty()) h.push_back({t.tau1, 1 - t.tau1, a_max[x], false});
    h.push_back({t.tau0, 1 - t.tau0, b[x], false});
  }
  return solve_box_lp(h);
}

SolverReport solve_groupblind(const Pipeline& pipeline, const Objective& objective,
                              double eps, const GroupBlindOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kInvalidEps, "eps must lie in (0,1)");
  if (objective.kind() == Objective::Kind::kCustom) {
    throw Error(ErrorCode::kIncompatibleFlags,
                "group-blind solver supports linear, precision and reciprocal objectives");
  }
  const std::size_t k = pipeline.num_stages();
  const std::size_t n = pipeline.num_groups();
  const FptasBounds bounds = objective.kind() == Objective::Kind::kReciprocal
                                 ? fptas_bounds_g(pipeline, eps)
                                 : fptas_bounds_f(pipeline, eps);
  const Grid grid(eps / (2.0 * static_cast<double>(k)), bounds.tpr, bounds.fpr);
  const JointTable table(pipeline, grid, options.cell_budget);
  const Radix& tr = table.tpr_radix();
  const Radix& fr = table.fpr_radix();
  const double q = pipeline.qualified_mass();
  const int kk = static_cast<int>(k);

  bool found = false;
  std::size_t best_t = 0;
  std::size_t best_c = 0;
  double best_score = objective.worst();
  for (std::size_t t = 0; t < tr.size; ++t) {
    int lo = std::numeric_limits<int>::max();
    int hi = -1;
    for (std::size_t x = 0; x < n; ++x) {
      lo = std::min(lo, tr.digit(t, x));
      hi = std::max(hi, tr.digit(t, x));
    }
    if (hi - lo > kk - 1) continue;
    const double common = table.value(hi + kk);
    for (std::size_t c = 0; c < fr.size; ++c) {
      if (!table.at(k - 1, t, c)) continue;
      double false_mass = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        const double floor = table.value(tr.digit(t, x) + kk);
        false_mass += pipeline.group(x).u * table.value(fr.digit(c, x)) * common / floor;
      }
      const double score = objective.score(common, q * common / (q * common + false_mass));
      if (!found || objective.better(score, best_score)) {
        found = true;
        best_t = t;
        best_c = c;
        best_score = score;
      }
    }
  }

  SolverReport bypass = make_report("groupblind", pipeline, objective,
                                    Policy::uniform(pipeline, StagePolicy::bypass()));
  SolverReport report = bypass;
  report.certificate = "all-bypass";
  double certified = bypass.score;
  if (found) {
    const std::vector<StagePolicy> shared = table.reconstruct(best_t, best_c);
    Policy policy;
    for (const Group& g : pipeline.groups()) policy.groups.push_back({g.id, shared});
    SolverReport dp = make_report("groupblind", pipeline, objective, std::move(policy));
    if (!objective.better(bypass.score, dp.score)) {
      report = std::move(dp);
      certified = best_score;
      std::ostringstream cert;
      cert << "tpr indices [";
      for (std::size_t x = 0; x < n; ++x) cert << (x ? "," : "") << tr.digit(best_t, x);
      cert << "], fpr indices [";
      for (std::size_t x = 0; x < n; ++x) cert << (x ? "," : "") << fr.digit(best_c, x);
      cert << "]";
      report.certificate = cert.str();
    }
  }
  report.eps = eps;
  auto& d = report.diagnostics;
  d["eps_bar"] = grid.eps_bar();
  d["l_tpr"] = grid.l_tpr();
  d["l_fpr"] = grid.l_fpr();
  d["grid_score"] = certified;
  d["bypass_score"] = bypass.score;
  d["state_cells"] = static_cast<double>(tr.size * fr.size * k);
  d["generator_pairs"] = static_cast<double>(table.generator_pairs());
  d["eo_gap"] = check_eo(pipeline, report.policy, 0.0).max_gap;
  return report;
}

}  // namespace fairscreen
